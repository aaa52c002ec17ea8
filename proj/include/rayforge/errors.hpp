#pragma once
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rayforge {

using cplx = std::complex<double>;

// base of everything we throw on purpose
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OverflowError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

// numeric failure to converge; the cli maps these to exit code 3
struct NotConverged : Error {
    std::vector<double> history;
    NotConverged(const std::string& what, std::vector<double> h = {})
        : Error(what), history(std::move(h)) {}
};

struct RootSolverFailure : NotConverged {
    double worst_residual;
    RootSolverFailure(const std::string& what, double r) : NotConverged(what), worst_residual(r) {}
};

struct AmbiguousTract : Error {
    long lo, hi;
    AmbiguousTract(const std::string& what, long a, long b) : Error(what), lo(a), hi(b) {}
};

struct BranchSelectionFailure : Error {
    std::vector<cplx> candidates;
    BranchSelectionFailure(const std::string& what, std::vector<cplx> c)
        : Error(what), candidates(std::move(c)) {}
};

struct NotEscaping : Error {
    std::vector<cplx> orbit;
    NotEscaping(const std::string& what, std::vector<cplx> o) : Error(what), orbit(std::move(o)) {}
};

struct DegenerateInput : Error {
    using Error::Error;
};

// grid point fell out of the right half plane during a pullback
struct InvariantViolation : Error {
    using Error::Error;
};

struct Unsupported : Error {
    using Error::Error;
};

// target spec refused before any iteration (exit code 4)
struct SpecRejected : Error {
    std::string reason;  // short machine tag: "cluster", "periodic", ...
    SpecRejected(const std::string& tag, const std::string& what) : Error(what), reason(tag) {}
};

}  // namespace rayforge
