#include "rayforge/tracts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rayforge {

double default_eps(int d) { return M_PI / (4.0 * d); }

namespace {

// h(rho) = rho^d + sum |b_j| rho^j bounds |p| on |w| = rho
double h_bound(const PolyExpMap& f, double rho) {
    double s = 1;
    for (int j = f.d - 1; j >= 0; --j) s = s * rho + std::abs(f.b[j]);
    return s;
}

bool bounds_ok(const PolyExpMap& f, double eps, double tstar) {
    double sg = f.coeff_weight(tstar);
    if (!(sg < 1)) return false;
    if (std::asin(sg) > f.d * eps) return false;
    // with r = 2|SV| + 2 and d = 1 this is an equality at the exact t*, keep a rounding slack
    return f.d * std::exp(f.d * tstar) * (1 - sg) >= 2 * (1 - 1e-9);
}

bool sample_edges(const PolyExpMap& f, const TractConfig& c, const TractOptions& opt) {
    const int N = opt.edge_samples;
    const int d = f.d;
    auto re_f = [&](cplx z) { return f.eval(z).real(); };
    // left edge: nothing in H_r to the left of t*
    for (int k = 0; k < N; ++k) {
        cplx z(c.t_star_upper, 2 * M_PI * k / N);
        if (re_f(z) > c.r) return false;
    }
    for (long n = 0; n < d; ++n) {
        double cen = c.strip_center(n);
        double outer = M_PI / (2 * d) + c.eps, inner = M_PI / (2 * d) - c.eps;
        for (int k = 0; k < N; ++k) {
            double x = c.t_star_upper + opt.edge_span * k / (N - 1);
            if (d * x > 700) break;
            for (double sgn : {-1.0, 1.0}) {
                // outer edges of the widened strip stay outside H_r
                if (re_f(cplx(x, cen + sgn * outer)) > c.r) return false;
            }
            double xi = c.t_star_lower + opt.edge_span * k / (N - 1);
            if (d * xi > 700) continue;
            for (double sgn : {-1.0, 1.0}) {
                cplx z(xi, cen + sgn * inner);
                if (!(re_f(z) > c.r)) return false;
                if (std::abs(f.deriv(z)) < 2) return false;
            }
        }
        for (int k = 0; k < N; ++k) {
            cplx z(c.t_star_lower, cen - inner + 2 * inner * k / (N - 1));
            if (!(re_f(z) > c.r)) return false;
            if (std::abs(f.deriv(z)) < 2) return false;
        }
    }
    return true;
}

}  // namespace

TractConfig make_tract_config(const PolyExpMap& f, double eps, const TractOptions& opt) {
    const int d = f.d;
    if (eps < 0) eps = default_eps(d);
    if (!(eps > 0 && eps < M_PI / (2 * d))) throw DomainError("eps must lie in (0, pi/2d)");
    TractConfig c;
    c.d = d;
    c.eps = eps;
    c.edge_samples = opt.edge_samples;
    c.r = std::max(opt.r_floor, 2 * singular_values(f).max_abs() + 2);
    for (int attempt = 0; attempt <= opt.budget; ++attempt, c.r *= 2) {
        c.doublings = attempt;
        double lo = 0, hi = std::pow(c.r, 1.0 / d);
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (h_bound(f, mid) < c.r ? lo : hi) = mid;
        }
        c.t_star_upper = std::log(lo);
        if (!bounds_ok(f, eps, c.t_star_upper)) continue;
        // smallest x with e^{dx} (1 - sigma) sin(d eps - asin sigma) > r
        auto g = [&](double x) {
            double sg = f.coeff_weight(x);
            double a = d * eps - std::asin(std::min(sg, 1.0));
            if (a <= 0) return -1.0;
            return std::exp(d * x) * (1 - sg) * std::sin(a) - c.r;
        };
        double a = c.t_star_upper, b = a + 1;
        while (g(b) <= 0) b += 1;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (a + b);
            (g(mid) > 0 ? b : a) = mid;
        }
        c.t_star_lower = std::max(b, c.t_star_upper);
        if (sample_edges(f, c, opt)) {
            c.certified = true;
            return c;
        }
    }
    throw NotConverged("tract configuration could not be certified within the doubling budget");
}

long nearest_strip(cplx z, int d) {
    double y = z.imag() * d / (2 * M_PI);
    double fl = std::floor(y);
    double fr = y - fl;
    long n;
    if (fr > 0.5) n = long(fl) + 1;
    else if (fr < 0.5) n = long(fl);
    else n = std::labs(long(fl)) <= std::labs(long(fl) + 1) ? long(fl) : long(fl) + 1;
    return n;
}

long tract_index(cplx z, int d, double eps) {
    long n = nearest_strip(z, d);
    double off = z.imag() - 2 * M_PI * double(n) / d;
    if (std::fabs(off) > M_PI / (2 * d) + eps) {
        long other = off > 0 ? n + 1 : n - 1;
        std::ostringstream os;
        os << "Im z = " << z.imag() << " lies between strips " << std::min(n, other) << " and "
           << std::max(n, other);
        throw AmbiguousTract(os.str(), std::min(n, other), std::max(n, other));
    }
    return n;
}

long tract_index(cplx z, const TractConfig& cfg) { return tract_index(z, cfg.d, cfg.eps); }

cplx branch_preimage(const PolyExpMap& f, long n, cplx w, std::vector<cplx>* candidates) {
    const double cen = 2 * M_PI * double(n) / f.d;
    cplx best;
    bool have = false;
    for (cplx zeta : poly_roots(f.b, w)) {
        cplx L = std::log(zeta);
        double k = std::round((cen - L.imag()) / (2 * M_PI));
        cplx cand = L + cplx(0, 2 * M_PI * k);
        if (candidates) candidates->push_back(cand);
        if (!have || std::fabs(cand.imag() - cen) < std::fabs(best.imag() - cen)) {
            best = cand;
            have = true;
        }
    }
    // polish in z; roots of p can lose digits when a critical point is nearby
    if (f.d * best.real() < 700) {
        for (int it = 0; it < 3; ++it) {
            cplx fz = f.eval(best) - w, dz = f.deriv(best);
            if (dz == 0.0) break;
            cplx nz = best - fz / dz;
            if (!(std::abs(f.eval(nz) - w) < std::abs(fz))) break;
            best = nz;
        }
    }
    return best;
}

cplx inverse_branch(const PolyExpMap& f, const TractConfig& cfg, long n, cplx w) {
    if (!(w.real() > cfg.r)) {
        std::ostringstream os;
        os << "inverse branch needs Re w > r = " << cfg.r << ", got " << w.real();
        throw DomainError(os.str());
    }
    std::vector<cplx> cands;
    cplx z = branch_preimage(f, n, w, &cands);
    long got;
    try {
        got = tract_index(z, cfg);
    } catch (const AmbiguousTract&) {
        throw BranchSelectionFailure("no branch lands inside strip " + std::to_string(n), cands);
    }
    if (got != n) throw BranchSelectionFailure("no branch lands inside strip " + std::to_string(n), cands);
    return z;
}

double contraction_check(const PolyExpMap& f, const TractConfig& cfg, cplx w1, cplx w2, long n) {
    if (w1 == w2) return 0.0;
    return std::abs(inverse_branch(f, cfg, n, w1) - inverse_branch(f, cfg, n, w2)) / std::abs(w1 - w2);
}

cplx clog1p(cplx x) {
    double a = x.real(), b = x.imag();
    return {0.5 * std::log1p(2 * a + a * a + b * b), std::atan2(b, 1 + a)};
}

cplx pull_offset(const PolyExpMap& f, long s_k, double u_k, double u_next, long s_next, cplx delta_next) {
    const int d = f.d;
    const cplx c_k(0, 2 * M_PI * double(s_k) / d), c_next(0, 2 * M_PI * double(s_next) / d);
    if (f.coeff_weight(u_k) <= 1e-3) {
        // e^{d delta}(1 + S(z)) = 1 + (c' + delta' - 1) e^{-d u}
        cplx A = clog1p((c_next + delta_next - 1.0) * std::exp(-d * u_k));
        cplx delta = A / double(d);
        if (u_k == INFINITY) return delta;
        for (int it = 0; it < 60; ++it) {
            cplx nd = (A - clog1p(f.tail(cplx(u_k, 0) + c_k + delta))) / double(d);
            bool done = std::abs(nd - delta) <= 1e-18 * std::max(1e-300, std::abs(nd)) || nd == delta;
            delta = nd;
            if (done) break;
        }
        return delta;
    }
    if (!std::isfinite(u_next)) throw OverflowError("image point not representable for the root solver");
    cplx w = cplx(u_next, 0) + c_next + delta_next;
    cplx z = branch_preimage(f, s_k, w);
    return z - u_k - c_k;
}

}  // namespace rayforge
