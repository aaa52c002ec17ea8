#include "rayforge/polyexp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "rayforge/parallel.hpp"

namespace rayforge {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// x^n + a_{n-1} x^{n-1} + ... + a_0 and its derivative
void horner(const std::vector<cplx>& a, cplx x, cplx& p, cplx& dp) {
    p = 1.0;
    dp = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) {
        dp = dp * x + p;
        p = p * x + a[k];
    }
}

double rounding_floor(const std::vector<cplx>& a, cplx x) {
    double ax = std::abs(x), s = 1.0;
    for (std::size_t k = a.size(); k-- > 0;) s = s * ax + std::abs(a[k]);
    return 8 * kEps * (a.size() + 1) * s;
}

// rotated circle through a crude root bound; used when the fan degenerates
std::vector<cplx> bound_circle(const std::vector<cplx>& a) {
    std::size_t n = a.size();
    double R = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double c = std::abs(a[k]);
        if (c > 0) R = std::max(R, std::pow(c, 1.0 / double(n - k)));
    }
    R = R > 0 ? 2 * R : 1.0;
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(R, 2 * M_PI * double(k) / double(n) + 0.4);
    return z;
}

}  // namespace

PolyExpMap::PolyExpMap(int deg, std::vector<cplx> coeffs) : d(deg), b(std::move(coeffs)) {
    if (d < 1) throw DomainError("degree must be >= 1");
    if (static_cast<int>(b.size()) != d) throw DomainError("need exactly d coefficients b_0..b_{d-1}");
}

cplx PolyExpMap::p(cplx w) const {
    cplx r = 1.0;
    for (int k = d - 1; k >= 0; --k) r = r * w + b[k];
    return r;
}

cplx PolyExpMap::dp(cplx w) const {
    cplx r = double(d);
    for (int k = d - 1; k >= 1; --k) r = r * w + double(k) * b[k];
    return r;
}

cplx PolyExpMap::eval(cplx z) const {
    if (d * z.real() > 709.0) throw OverflowError("f(z) overflows: Re z too large");
    cplx v = p(std::exp(z));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw OverflowError("f(z) not finite");
    return v;
}

cplx PolyExpMap::deriv(cplx z) const {
    if (d * z.real() > 709.0) throw OverflowError("f'(z) overflows: Re z too large");
    cplx w = std::exp(z);
    return dp(w) * w;
}

cplx PolyExpMap::tail(cplx z) const {
    if (z.real() == INFINITY) return 0.0;
    cplx q = std::exp(-z);
    cplx s = 0.0;
    for (int j = 0; j < d; ++j) s = (s + b[j]) * q;
    return s;
}

double PolyExpMap::coeff_weight(double x) const {
    if (x == INFINITY) return 0.0;
    double q = std::exp(-x), s = 0;
    for (int j = 0; j < d; ++j) s = (s + std::abs(b[j])) * q;
    return s;
}

std::vector<cplx> monic_roots(const std::vector<cplx>& a, const std::vector<cplx>& init, double scale,
                              const RootOptions& opt) {
    const std::size_t n = a.size();
    // exact roots at 0 (pure maps): a residual test would stop at |z| ~ tol^(1/multiplicity)
    std::size_t k0 = 0;
    while (k0 < n && a[k0] == 0.0) ++k0;
    if (k0 > 0) {
        std::vector<cplx> z(k0, 0.0);
        if (k0 < n) {
            std::vector<cplx> rest(a.begin() + k0, a.end());
            auto r = monic_roots(rest, bound_circle(rest), scale, opt);
            z.insert(z.end(), r.begin(), r.end());
        }
        return z;
    }
    std::vector<cplx> z = init;
    const double tol = opt.tol * std::max(1.0, scale);
    double worst = INFINITY;
    for (int it = 0; it <= opt.max_iter; ++it) {
        worst = 0;
        bool done = true;
        for (std::size_t k = 0; k < n; ++k) {
            cplx pv, dv;
            horner(a, z[k], pv, dv);
            double res = std::abs(pv);
            if (!std::isfinite(res)) throw RootSolverFailure("root iteration diverged", INFINITY);
            worst = std::max(worst, res);
            if (res > std::max(tol, rounding_floor(a, z[k]))) done = false;
        }
        if (done) return z;
        if (it == opt.max_iter) break;
        for (std::size_t k = 0; k < n; ++k) {
            cplx pv, dv;
            horner(a, z[k], pv, dv);
            if (pv == 0.0) continue;
            cplx ratio = pv / dv;
            cplx s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            cplx step = ratio / (1.0 - ratio * s);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = ratio;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
                throw RootSolverFailure("root iteration hit a critical point", worst);
            z[k] -= step;
        }
    }
    throw RootSolverFailure("Aberth iteration did not converge, worst residual " + std::to_string(worst), worst);
}

std::vector<cplx> poly_roots(const std::vector<cplx>& b, cplx w, const RootOptions& opt) {
    const std::size_t d = b.size();
    if (d == 0) throw DomainError("empty polynomial");
    if (d == 1) return {w - b[0]};
    std::vector<cplx> a = b;
    a[0] -= w;
    double R = std::pow(std::abs(w), 1.0 / double(d));
    double th = std::arg(w);
    if (R > 0) {
        std::vector<cplx> fan(d);
        for (std::size_t k = 0; k < d; ++k) fan[k] = std::polar(R, (th + 2 * M_PI * double(k)) / double(d));
        try {
            return monic_roots(a, fan, std::abs(w), opt);
        } catch (const RootSolverFailure&) {
        }
    }
    return monic_roots(a, bound_circle(a), std::abs(w), opt);
}

double SingularData::max_abs() const {
    double m = 0;
    for (auto v : all) m = std::max(m, std::abs(v));
    return m;
}

SingularData singular_values(const PolyExpMap& f) {
    SingularData sd;
    sd.asymptotic_value = f.b[0];
    if (f.d > 1) {
        std::vector<cplx> a(f.d - 1);
        for (int k = 1; k < f.d; ++k) a[k - 1] = double(k) * f.b[k] / double(f.d);
        double sc = 0;
        for (auto v : a) sc = std::max(sc, std::abs(v));
        sd.critical_points = monic_roots(a, bound_circle(a), sc);
        for (auto c : sd.critical_points) sd.critical_values.push_back(f.p(c));
    }
    auto add = [&](cplx v) {
        for (auto u : sd.all)
            if (std::abs(u - v) <= 1e-9 * std::max(1.0, std::abs(u))) return;
        sd.all.push_back(v);
    };
    add(sd.asymptotic_value);
    for (auto v : sd.critical_values) add(v);
    return sd;
}

BoundCheck check_critical_point_bound(const PolyExpMap& f, double rho, double M, bool translate) {
    auto sd = singular_values(f);
    if (!(sd.max_abs() < rho)) throw DomainError("singular values are not inside D_rho");
    cplx shift = 0.0;
    if (translate) {
        auto roots = poly_roots(f.b, 0.0);
        shift = *std::min_element(roots.begin(), roots.end(),
                                  [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
    } else if (std::abs(f.b[0]) > 1e-12) {
        throw DomainError("critical point bound needs p(0) = 0 (or translate = true)");
    }
    double m = 0;
    for (auto c : sd.critical_points) m = std::max(m, std::abs(c - shift));
    BoundCheck r;
    r.margin = m / std::pow(rho, 1.0 / f.d);
    r.holds = r.margin <= M;
    return r;
}

CoefficientCheck check_coefficient_bound(const PolyExpMap& f, double rho, double L) {
    CoefficientCheck c;
    for (int k = 0; k < f.d; ++k) {
        double r = std::abs(f.b[k]) / std::pow(rho, double(f.d - k) / f.d);
        c.ratios.push_back(r);
        c.holds.push_back(r < L);
        if (!(r < L)) c.all = false;
    }
    return c;
}

DiskCheck check_disk_containment(const PolyExpMap& f, double rho, double r, int samples) {
    DiskCheck dc;
    if (samples < 1) {
        dc.inconclusive = true;
        return dc;
    }
    for (int k = 0; k < samples; ++k) {
        cplx w = std::polar(r, 2 * M_PI * k / samples);
        try {
            for (auto z : poly_roots(f.b, w)) {
                double q = std::abs(z) / r;
                dc.worst_root_ratio = std::max(dc.worst_root_ratio, q);
                if (!(q < 1)) dc.part1 = false;
            }
        } catch (const RootSolverFailure&) {
            dc.inconclusive = true;
        }
    }
    double R2 = rho * rho, lim = (2.0 * f.d + 1) * std::log(rho);
    dc.worst_image_log = -INFINITY;
    for (int k = 0; k < samples; ++k) {
        cplx z = std::polar(R2, 2 * M_PI * k / samples);
        double lg = std::log(std::abs(f.p(z)));
        dc.worst_image_log = std::max(dc.worst_image_log, lg - lim);
        if (!(lg < lim)) dc.part2 = false;
    }
    return dc;
}

double log_max_deriv_on_line(const PolyExpMap& f, double x, int samples) {
    double best = -INFINITY;
    for (int k = 0; k < samples; ++k) {
        cplx z(x, 2 * M_PI * k / samples);
        cplx q = std::exp(-z);  // 1/w
        // p'(w) / w^{d-1} = d + sum_k k b_k w^{k-d}
        cplx s = double(f.d);
        cplx qp = 1.0;
        for (int j = f.d - 1; j >= 1; --j) {
            qp *= q;
            s += double(j) * f.b[j] * qp;
        }
        double lg = (f.d - 1) * x + std::log(std::abs(s)) + x;
        best = std::max(best, lg);
    }
    return best;
}

MRhoBound M_rho_bound(int d, double t_n, const std::vector<PolyExpMap>& maps, int samples, double K) {
    MRhoBound m;
    m.log_formula = std::log(K) + double(d) * d * d * t_n;
    m.log_empirical = -INFINITY;
    for (const auto& f : maps) m.log_empirical = std::max(m.log_empirical, log_max_deriv_on_line(f, (d + 1) * t_n, samples));
    return m;
}

std::uint64_t Rng::next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return double(next() >> 11) * 0x1.0p-53; }

cplx Rng::disk() {
    for (;;) {
        double x = 2 * uniform() - 1, y = 2 * uniform() - 1;
        if (x * x + y * y < 1) return {x, y};
    }
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    Rng a(seed ^ (stream * 0xd1b54a32d192ed03ULL));
    std::uint64_t h = a.next();
    Rng b(h ^ (index * 0x8cb92ba72f3d8dd7ULL));
    return b.next();
}

PolyExpMap sample_map_in_disk(int d, double rho, Rng& rng) {
    if (d < 2) throw DomainError("Monte-Carlo sampling needs d >= 2");
    std::vector<cplx> b(d, 0.0);
    for (int k = 1; k < d; ++k) b[k] = 3.0 * rng.disk();
    PolyExpMap f(d, b);
    double S = singular_values(f).max_abs();
    double u = 0.05 + 0.95 * rng.uniform();
    if (S > 0) {
        double lam = std::pow(u * rho / S, 1.0 / d);
        for (int k = 1; k < d; ++k) f.b[k] *= std::pow(lam, d - k);
    }
    return f;
}

double t_n_for_rho(int d, double rho) {
    if (!(rho > 0)) throw DomainError("rho must be positive");
    double lo = 0, hi = std::log1p(2 * rho) / d;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (0.5 * (mid + std::expm1(d * mid)) < rho) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

DiskBoundReport disk_bound_monte_carlo(int d, double rho, int samples, std::uint64_t seed, int circle_samples,
                                       int threads) {
    DiskBoundReport rep;
    rep.d = d;
    rep.rho = rho;
    rep.samples = samples;
    rep.t_n = t_n_for_rho(d, rho);
    std::uint64_t bits;
    std::memcpy(&bits, &rho, sizeof bits);
    std::uint64_t stream = bits ^ std::uint64_t(d);

    struct One {
        PolyExpMap f;
        double crit = 0;
        std::vector<double> coeff;
        DiskCheck disk;
        double lderiv = -INFINITY;
    };
    std::vector<One> out(samples);
    const double xline = (d + 1) * rep.t_n;
    parallel_for(
        samples,
        [&](std::size_t i) {
            Rng rng(stream_seed(seed, stream, i));
            One o;
            o.f = sample_map_in_disk(d, rho, rng);
            o.crit = check_critical_point_bound(o.f, rho).margin;
            o.coeff = check_coefficient_bound(o.f, rho).ratios;
            o.disk = check_disk_containment(o.f, rho, rho, circle_samples);
            o.lderiv = log_max_deriv_on_line(o.f, xline, circle_samples);
            out[i] = std::move(o);
        },
        threads);

    rep.max_coeff_ratio.assign(d, 0.0);
    rep.mrho.log_formula = std::log(4.0) + double(d) * d * d * rep.t_n;
    rep.mrho.log_empirical = -INFINITY;
    for (int i = 0; i < samples; ++i) {
        const auto& o = out[i];
        if (o.crit > rep.max_crit_ratio) {
            rep.max_crit_ratio = o.crit;
            rep.worst_crit_sample = i;
        }
        for (int k = 0; k < d; ++k) rep.max_coeff_ratio[k] = std::max(rep.max_coeff_ratio[k], o.coeff[k]);
        if (!o.disk.part1) ++rep.part1_failures;
        if (!o.disk.part2) ++rep.part2_failures;
        if (o.disk.inconclusive) ++rep.inconclusive;
        rep.mrho.log_empirical = std::max(rep.mrho.log_empirical, o.lderiv);
    }
    return rep;
}

}  // namespace rayforge
