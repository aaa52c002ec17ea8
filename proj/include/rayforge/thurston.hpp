#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rayforge/homotopy.hpp"
#include "rayforge/potentials.hpp"
#include "rayforge/rays.hpp"
#include "rayforge/tracts.hpp"

namespace rayforge {

enum class AddressSemantics {
    Exact,    // the address is exactly the given eventually periodic sequence
    Horizon,  // it only fixes the digits up to the truncation depth; the tail is free
};

struct TargetSpec {
    int d = 1;
    std::vector<Orbit> orbits;
    int J = -1;  // -1: default depth for d
    int asymptotic_orbit = 0;
    AddressSemantics semantics = AddressSemantics::Exact;

    int m() const { return static_cast<int>(orbits.size()); }
    int depth() const { return J >= 0 ? J : (d == 1 ? 6 : 4); }
};

struct SpecLimits {
    int max_J = 64;
};

// throws SpecRejected (or Unsupported) with a reason
void validate_spec(const TargetSpec& spec, const SpecLimits& lim = {});

// z[i][j] = u[i][j] + 2 pi i s[i][j]/d + delta[i][j]; column J+1 is the frozen tail
struct MarkedGrid {
    int d = 1, m = 0, J = 0;
    std::vector<std::vector<double>> u;   // m x (J+2), +inf once past the cap
    std::vector<std::vector<long>> s;     // m x (J+2)
    std::vector<std::vector<cplx>> delta; // m x (J+2), tail column stays 0

    cplx asymptotic(int i, int j) const;  // u + c (throws if u is not finite)
    cplx z(int i, int j) const;
    bool finite(int i, int j) const { return std::isfinite(u[i][j]); }
};

MarkedGrid straight_grid(const TargetSpec& spec, double cap = kDefaultCap);

struct FitResult {
    PolyExpMap map;
    std::vector<cplx> critical_points;  // ordered like the non-asymptotic orbits
    bool tie = false;                   // d=2 sign ambiguous at b ~ 0
};

// targets in orbit order; the asymptotic orbit goes to p(0)
FitResult fit_map(int d, const std::vector<cplx>& targets, int asymptotic_orbit,
                  const FitResult* warm = nullptr);

struct ThurstonOptions {
    int max_iter = 50;
    double tol = 1e-10;
    double perturb = 0;  // size of the perturbation of column 0 at init
    std::uint64_t seed = 1;
    bool log_iterates = false;
    int threads = 0;
    double cap = kDefaultCap;
};

struct Snapshot {
    int iteration = 0;
    PolyExpMap map;
    std::vector<std::vector<cplx>> delta;
    double delta_sup = 0;
};

struct ThurstonState {
    FitResult fit;
    TractConfig cfg;
    MarkedGrid grid;
    int iteration = 0;
    std::vector<double> deltas;
    std::vector<Snapshot> log;
    const PolyExpMap& map() const { return fit.map; }
};

ThurstonState init_state(const TargetSpec& spec, const ThurstonOptions& opt = {});
void pullback_step(ThurstonState& st, const TargetSpec& spec, const ThurstonOptions& opt = {});

struct OrbitCertificate {
    int orbit = 0;
    cplx singular_value;
    double t = 0, t_error = INFINITY;
    std::vector<long> prefix;
    int match_len = 0;
    int horizon = 0;  // deepest finite iterate
    double residual = INFINITY;
    bool passed = false;
    std::string failure;
    std::vector<cplx> orbit_dump;
};

struct Certificate {
    std::vector<OrbitCertificate> orbits;
    bool passed = false;
    double fixed_point_backward = 0;  // sup |z_ij - L(z_{i,j+1})| in offset form
    double fixed_point_forward = 0;   // sup |f(z_ij) - z_{i,j+1}| where the image is small enough
};

struct VerifyOptions {
    int n_steps = 64;
    double rel_tol = 1e-6;
};

Certificate verify(const PolyExpMap& f, const TargetSpec& spec, const VerifyOptions& opt = {});
void add_fixed_point_residuals(Certificate& c, const ThurstonState& st);

struct ClassifyResult {
    ThurstonState state;
    Certificate certificate;
    bool converged = false;
};

ClassifyResult classify(const TargetSpec& spec, const ThurstonOptions& opt = {});

struct InvariantRow {
    int iteration = 0;
    double rho = 0;
    bool rho_above_t_prime = false;
    std::vector<int> N;
    bool cond1 = true, cond2 = true, cond3 = true, cond4 = true;
    bool pullback_real = true, real_part_bound = true;
    double worst_sep_log_margin = INFINITY;  // log|dz| - log(pi/(2d M^n)) at the worst pair
    int max_word_len = 0;
    bool ladder_checks = true;  // the t' sampling checks evaluated at rho
};

struct InvariantOptions {
    std::optional<double> rho;
    double K = 4, A = 1, C = 1;
};

InvariantRow invariant_set_diagnostics(const MarkedGrid& g, const PolyExpMap& f, const TargetSpec& spec,
                                       const PotentialLadder& lad, const InvariantOptions& opt = {});

}  // namespace rayforge
