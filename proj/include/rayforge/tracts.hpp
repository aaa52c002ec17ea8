#pragma once
#include <vector>

#include "rayforge/polyexp.hpp"

namespace rayforge {

struct TractConfig {
    int d = 1;
    double eps = 0;
    double r = 2;
    double t_star_upper = 0;  // t*: tracts live in Re z >= t*
    double t_star_lower = 0;  // t_*: the inner strip [t_*, inf) x (center +- (pi/2d - eps)) is inside
    int doublings = 0;        // how often r had to be doubled
    int edge_samples = 720;
    bool certified = false;
    double strip_center(long n) const { return 2 * M_PI * double(n) / d; }
};

struct TractOptions {
    double r_floor = 2;
    int edge_samples = 720;
    int budget = 40;
    double edge_span = 20;  // how far right the horizontal edges are sampled
};

double default_eps(int d);

TractConfig make_tract_config(const PolyExpMap& f, double eps = -1, const TractOptions& opt = {});

// nearest strip; throws AmbiguousTract in the gap between the widened strips
long tract_index(cplx z, int d, double eps);
long tract_index(cplx z, const TractConfig& cfg);
// nearest strip centre without the ambiguity check
long nearest_strip(cplx z, int d);

cplx inverse_branch(const PolyExpMap& f, const TractConfig& cfg, long n, cplx w);

// branch selection without the half-plane precondition; candidates are the
// log branches nearest the strip for every root (used for error reports)
cplx branch_preimage(const PolyExpMap& f, long n, cplx w, std::vector<cplx>* candidates = nullptr);

double contraction_check(const PolyExpMap& f, const TractConfig& cfg, cplx w1, cplx w2, long n);

// log(1 + x) without cancellation for small x
cplx clog1p(cplx x);

// One backward step on points written as z = u + c + delta with u a potential
// (possibly +inf), c = 2 pi i s / d. Given the image in that form, returns the
// offset of its preimage in strip s_k. Uses the asymptotic series when the
// coefficient tail is tiny and the root solver otherwise.
cplx pull_offset(const PolyExpMap& f, long s_k, double u_k, double u_next, long s_next, cplx delta_next);

}  // namespace rayforge
