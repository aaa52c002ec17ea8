import json
import math
import os
from pathlib import Path

import pytest

import rayforge as rf

DATA = Path(os.environ.get("RAYFORGE_DATA", Path(__file__).resolve().parents[2] / "data"))


def load(rel):
    return json.loads((DATA / rel).read_text())


def test_F():
    assert rf.eval_F(1, 1.0) == pytest.approx(math.e - 1, rel=1e-15)
    assert rf.eval_F_inverse(2, rf.eval_F(2, 3.0)) == pytest.approx(3.0, rel=1e-12)


def test_ray_functional_equation():
    f = rf.PolyExpMap(1, [0])
    s = rf.Address([7, -3], [2])
    for p in rf.trace_segment(f, s, 1.0, 5.0, 8):
        q = rf.trace_ray(f, s.shift(), rf.eval_F(1, p.t))
        assert abs(f(p.z) - q.z) < 1e-8 * max(1.0, rf.eval_F(1, p.t))


def test_round_trip():
    f = rf.PolyExpMap(2, [0, 0.1])
    s = rf.Address([], [1, -1])
    p = rf.trace_ray(f, s, 2.7)
    t, prefix = rf.extract(f, p.z)
    assert t == pytest.approx(2.7, rel=1e-6)
    assert prefix == [s.entry(k) for k in range(len(prefix))]


def test_classify_d1():
    res = rf.classify(load("specs/d1_zero.json"))
    kappa = res["map"]["coeffs"][0]
    assert kappa["re"] == pytest.approx(1.5713905392840270, abs=1e-9)
    assert abs(kappa["im"]) < 1e-6
    assert res["certificate"]["passed"]


def test_spec_rejected():
    with pytest.raises(rf.SpecRejected) as e:
        rf.classify(load("specs/cluster_counterexample.json"))
    assert e.value.reason == "cluster"


def test_homotopy_word():
    marked = [complex(p["re"], p["im"]) for p in load("fixtures/loop_marked.json")["points"]]
    verts = [complex(p["re"], p["im"]) for p in load("fixtures/loop_curve.json")["vertices"]]
    assert rf.homotopy_word(marked, verts) == [(1, 1)]
    with pytest.raises(rf.DegenerateInput):
        rf.homotopy_word(marked, [0, complex(4, 1)])


def test_cli_in_process():
    code, out, _ = rf.run_cli(["tracts", "inspect", "--map", str(DATA / "maps/exp2.json")])
    assert code == 0
    assert json.loads(out)["tracts"]["certified"]
    code, _, _ = rf.run_cli(["ray", "trace"])
    assert code == 2
