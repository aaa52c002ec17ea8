#pragma once
#include <vector>

#include "rayforge/potentials.hpp"
#include "rayforge/tracts.hpp"

namespace rayforge {

struct RayOptions {
    double cap = kDefaultCap;
    double tol = 1e-10;
    int max_depth = 200;
    int threads = 0;
};

struct RayPoint {
    cplx z;
    double t = 0;
    Address address;
    int depth_used = 0;
    double error_estimate = 0;
    cplx offset;                   // z - t - 2 pi i s_0 / d, kept separately for precision
    double convergence_delta = 0;  // |g_n - g_{n-1}|
};

struct RaySegment {
    std::vector<RayPoint> samples;
};

// backward chain of offsets delta_0..delta_n (index k is the point at potential F^k(t));
// seeded with delta_n = 0
std::vector<cplx> ray_offsets(const PolyExpMap& f, const Address& s, double t, int n,
                              double cap = kDefaultCap);

RayPoint trace_ray(const PolyExpMap& f, const TractConfig& cfg, const Address& s, double t,
                   const RayOptions& opt = {});

std::vector<double> geometric_grid(double lo, double hi, int n);

RaySegment trace_segment(const PolyExpMap& f, const TractConfig& cfg, const Address& s, double t_lo,
                         double t_hi, int n_samples, const RayOptions& opt = {});

struct Extraction {
    double t = 0;
    std::vector<long> prefix;  // address digits that could be read reliably
    int certified = 0;         // leading digits also inside the tract bounds (Re >= t_*)
    double residual = 0;       // |f^n(z) - F^n(t) - 2 pi i s_n/d| at the deepest readable n
    int depth = 0;             // deepest finite iterate used for t
    int entry_step = -1;       // first k with Re f^j(z) > r for all j >= k
    std::vector<cplx> orbit;
};

struct ExtractOptions {
    double cap = kDefaultCap;
    double read_limit = 1e12;  // beyond this |f^k(z)| the imaginary part carries no digits
};

Extraction extract_potential_address(const PolyExpMap& f, const TractConfig& cfg, cplx z, int n_steps,
                                     const ExtractOptions& opt = {});

struct MonotoneReport {
    int N = 0;                     // smallest n with no violation from n on (within testable range)
    std::vector<int> violations;   // per n
    int testable = 0;              // iterates that could be computed for all samples
    bool truncated_by_overflow = false;
};

MonotoneReport check_monotone(const RaySegment& seg, const PolyExpMap& f, int n_iterates);

}  // namespace rayforge
