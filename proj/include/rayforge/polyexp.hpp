#pragma once
#include <cstdint>
#include <vector>

#include "rayforge/errors.hpp"

namespace rayforge {

// f = p o exp with p(w) = w^d + b_{d-1} w^{d-1} + ... + b_0
struct PolyExpMap {
    int d = 1;
    std::vector<cplx> b{0.0};  // b_0 first

    PolyExpMap() = default;
    PolyExpMap(int deg, std::vector<cplx> coeffs);
    static PolyExpMap pure(int deg) { return PolyExpMap(deg, std::vector<cplx>(deg, 0.0)); }

    cplx p(cplx w) const;
    cplx dp(cplx w) const;
    cplx eval(cplx z) const;   // throws OverflowError when e^{dz} is not representable
    cplx deriv(cplx z) const;  // p'(e^z) e^z
    // sum_j b_j e^{(j-d) z}, so that f(z) = e^{dz} (1 + S(z)); safe for huge Re z
    cplx tail(cplx z) const;
    double coeff_weight(double x) const;  // sum |b_j| e^{(j-d) x}
};

// monic polynomial x^n + a_{n-1} x^{n-1} + ... + a_0, all n roots
struct RootOptions {
    int max_iter = 200;
    double tol = 1e-12;  // relative to max(1, scale)
};
std::vector<cplx> monic_roots(const std::vector<cplx>& a, const std::vector<cplx>& init,
                              double scale, const RootOptions& opt = {});

// d roots of p(zeta) = w from the d-th root fan, with a rotated fallback
std::vector<cplx> poly_roots(const std::vector<cplx>& b, cplx w, const RootOptions& opt = {});

struct SingularData {
    std::vector<cplx> critical_points;
    std::vector<cplx> critical_values;  // d-1 with multiplicity
    cplx asymptotic_value;
    std::vector<cplx> all;  // distinct members of the union
    double max_abs() const;
};

SingularData singular_values(const PolyExpMap& f);

struct BoundCheck {
    bool holds = false;
    double margin = 0;  // the ratio that was compared
};

// max |critical point| / rho^{1/d} against M; p(0)=0 is required unless translate
BoundCheck check_critical_point_bound(const PolyExpMap& f, double rho, double M = 4.0,
                                      bool translate = false);

struct CoefficientCheck {
    std::vector<double> ratios;  // |b_k| / rho^{(d-k)/d}
    std::vector<bool> holds;
    bool all = true;
};
CoefficientCheck check_coefficient_bound(const PolyExpMap& f, double rho, double L = 8.0);

struct DiskCheck {
    bool part1 = true;  // p^{-1}(D_r) inside D_r
    bool part2 = true;  // p(D_{rho^2}) inside D_{rho^{2d+1}}
    bool inconclusive = false;
    double worst_root_ratio = 0;  // max |root| / r over samples
    double worst_image_log = 0;   // max log|p(z)| - (2d+1) log rho
    bool holds() const { return part1 && part2 && !inconclusive; }
};
DiskCheck check_disk_containment(const PolyExpMap& f, double rho, double r, int samples = 360);

struct MRhoBound {
    double log_formula = 0;    // log K + d^3 t_n
    double log_empirical = 0;  // log sup |f'| on Re z = (d+1) t_n
    bool holds() const { return log_empirical <= log_formula; }
};
// empirical sup over the given maps (boundary line sampling, maximum principle)
MRhoBound M_rho_bound(int d, double t_n, const std::vector<PolyExpMap>& maps, int samples = 360,
                      double K = 4.0);
double log_max_deriv_on_line(const PolyExpMap& f, double x, int samples);

// deterministic per-index random streams
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next();
    double uniform();  // [0, 1)
    cplx disk();       // uniform in the unit disk
};
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// random monic p with p(0)=0 scaled so that max |SV| = u rho, u uniform in (0.05, 1)
PolyExpMap sample_map_in_disk(int d, double rho, Rng& rng);

// the ladder t with (t + F(t))/2 = rho, i.e. the t_n whose midpoint is rho
double t_n_for_rho(int d, double rho);

struct DiskBoundReport {
    int d = 2;
    double rho = 100;
    int samples = 0;
    double max_crit_ratio = 0;
    int worst_crit_sample = -1;
    std::vector<double> max_coeff_ratio;
    int part1_failures = 0, part2_failures = 0, inconclusive = 0;
    double t_n = 0;
    MRhoBound mrho;
};
DiskBoundReport disk_bound_monte_carlo(int d, double rho, int samples, std::uint64_t seed,
                                       int circle_samples = 360, int threads = 0);

}  // namespace rayforge
