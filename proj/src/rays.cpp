#include "rayforge/rays.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rayforge/parallel.hpp"

namespace rayforge {

std::vector<cplx> ray_offsets(const PolyExpMap& f, const Address& s, double t, int n, double cap) {
    auto u = potential_chain(f.d, t, n, cap);
    std::vector<cplx> delta(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k)
        delta[k] = pull_offset(f, s.entry(k), u[k], u[k + 1], s.entry(k + 1), delta[k + 1]);
    return delta;
}

RayPoint trace_ray(const PolyExpMap& f, const TractConfig& cfg, const Address& s, double t,
                   const RayOptions& opt) {
    (void)cfg;
    if (!(t > t_s_estimate(s, f.d))) throw DomainError("ray potential must be > t_s = 0");
    auto u = potential_chain(f.d, t, opt.max_depth, opt.cap);
    int n = 0;
    while (n + 1 <= opt.max_depth && std::isfinite(u[n + 1])) ++n;
    // one more level past the cap: the offset step only needs e^{-d u} there
    if (n + 1 <= opt.max_depth && f.coeff_weight(u[n]) <= 1e-3) ++n;

    auto deep = ray_offsets(f, s, t, n, opt.cap);
    RayPoint rp;
    rp.t = t;
    rp.address = s;
    rp.depth_used = n;
    rp.offset = deep[0];
    rp.z = cplx(t, 2 * M_PI * double(s.entry(0)) / f.d) + rp.offset;
    if (n >= 1) {
        auto shallow = ray_offsets(f, s, t, n - 1, opt.cap);
        rp.convergence_delta = std::abs(deep[0] - shallow[0]);
    }
    // tail bound from the seed level plus rounding in z
    rp.error_estimate = std::max(rp.convergence_delta, std::isfinite(u[n]) ? std::exp(-u[n] / 2) : 0.0) +
                        8 * std::numeric_limits<double>::epsilon() * std::abs(rp.z);
    if (rp.convergence_delta > opt.tol) {
        std::ostringstream os;
        os << "ray did not converge at t=" << t << ": depth " << n << " vs " << n - 1 << " differ by "
           << rp.convergence_delta;
        throw NotConverged(os.str(), {rp.convergence_delta});
    }
    return rp;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (n < 1) throw DomainError("need at least one sample");
    if (!(lo > 0 && hi >= lo)) throw DomainError("need 0 < t_lo <= t_hi");
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = n == 1 ? lo : lo * std::pow(hi / lo, double(k) / (n - 1));
    if (n > 1) t[n - 1] = hi;
    return t;
}

RaySegment trace_segment(const PolyExpMap& f, const TractConfig& cfg, const Address& s, double t_lo,
                         double t_hi, int n_samples, const RayOptions& opt) {
    if (n_samples > 1 && !(t_lo < t_hi)) throw DomainError("need t_lo < t_hi");
    auto ts = geometric_grid(t_lo, t_hi, n_samples);
    RaySegment seg;
    seg.samples.resize(n_samples);
    parallel_for(
        ts.size(), [&](std::size_t k) { seg.samples[k] = trace_ray(f, cfg, s, ts[k], opt); }, opt.threads);
    return seg;
}

Extraction extract_potential_address(const PolyExpMap& f, const TractConfig& cfg, cplx z, int n_steps,
                                     const ExtractOptions& opt) {
    Extraction ex;
    ex.orbit.push_back(z);
    for (int k = 1; k <= n_steps; ++k) {
        cplx prev = ex.orbit.back();
        if (f.d * prev.real() > 709.0) break;
        cplx nz = f.eval(prev);
        if (!(std::abs(nz) <= opt.cap)) break;
        ex.orbit.push_back(nz);
    }
    const int last = static_cast<int>(ex.orbit.size()) - 1;
    // low potentials can poke past r and fall back; the entry is where the orbit stays
    for (int k = last; k >= 0 && ex.orbit[k].real() > cfg.r; --k) ex.entry_step = k;
    bool stays = ex.entry_step >= 0;
    if (!stays) throw NotEscaping("orbit does not escape to the right within " + std::to_string(n_steps) + " steps",
                                  ex.orbit);

    ex.depth = last;
    ex.t = eval_F_inverse_iter(f.d, ex.orbit[last].real(), last);

    bool cert = true;
    for (int k = 0; k <= last; ++k) {
        if (std::abs(ex.orbit[k]) > opt.read_limit) break;
        long sk = nearest_strip(ex.orbit[k], f.d);
        ex.prefix.push_back(sk);
        if (cert) {
            try {
                cert = ex.orbit[k].real() >= cfg.t_star_lower && tract_index(ex.orbit[k], cfg) == sk;
            } catch (const AmbiguousTract&) {
                cert = false;
            }
            if (cert) ++ex.certified;
        }
    }
    if (!ex.prefix.empty()) {
        int L = static_cast<int>(ex.prefix.size()) - 1;
        auto it = iterate_F(f.d, ex.t, L, opt.cap);
        cplx target(it.value, 2 * M_PI * double(ex.prefix[L]) / f.d);
        ex.residual = it.overflow ? INFINITY : std::abs(ex.orbit[L] - target);
    }
    return ex;
}

MonotoneReport check_monotone(const RaySegment& seg, const PolyExpMap& f, int n_iterates) {
    MonotoneReport rep;
    const std::size_t m = seg.samples.size();
    std::vector<cplx> cur(m);
    for (std::size_t i = 0; i < m; ++i) cur[i] = seg.samples[i].z;
    rep.testable = -1;
    for (int n = 0; n <= n_iterates; ++n) {
        if (n > 0) {
            bool ok = true;
            for (auto& z : cur) {
                if (f.d * z.real() > 709.0) {
                    ok = false;
                    break;
                }
                z = f.eval(z);
            }
            if (!ok) {
                rep.truncated_by_overflow = true;
                break;
            }
        }
        int v = 0;
        for (std::size_t i = 0; i + 1 < m; ++i)
            if (!(cur[i + 1].real() > cur[i].real())) ++v;
        rep.violations.push_back(v);
        rep.testable = n;
    }
    rep.N = 0;
    for (int n = rep.testable; n >= 0; --n) {
        if (rep.violations[n] != 0) {
            rep.N = n + 1;
            break;
        }
    }
    return rep;
}

}  // namespace rayforge
