"""Dynamic rays and Thurston classification for maps p(exp(z))."""


class SpecRejected(ValueError):
    """Target spec refused before any iteration; ``reason`` is a short tag."""

    def __init__(self, reason, message=""):
        super().__init__(message or reason)
        self.reason = reason


from ._core import (  # noqa: E402
    Address,
    DegenerateInput,
    DomainError,
    Error,
    NotConverged,
    PolyExpMap,
    RayPoint,
    Unsupported,
    classify,
    eval_F,
    eval_F_inverse,
    extract,
    homotopy_word,
    run_cli,
    singular_values,
    trace_ray,
    trace_segment,
)

__all__ = [
    "Address",
    "DegenerateInput",
    "DomainError",
    "Error",
    "NotConverged",
    "PolyExpMap",
    "RayPoint",
    "SpecRejected",
    "Unsupported",
    "classify",
    "eval_F",
    "eval_F_inverse",
    "extract",
    "homotopy_word",
    "run_cli",
    "singular_values",
    "trace_ray",
    "trace_segment",
]
