#include "rayforge/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rayforge {

Address::Address(std::vector<long> preperiod, std::vector<long> per)
    : pre(std::move(preperiod)), period(std::move(per)) {
    if (period.empty()) throw DomainError("address period must be nonempty");
}

long Address::entry(std::size_t n) const {
    if (n < pre.size()) return pre[n];
    return period[(n - pre.size()) % period.size()];
}

Address Address::shift() const {
    if (!pre.empty()) return Address(std::vector<long>(pre.begin() + 1, pre.end()), period);
    std::vector<long> p(period.begin() + 1, period.end());
    p.push_back(period.front());
    return Address({}, p);
}

Address Address::shift(std::size_t k) const {
    if (k <= pre.size()) return Address(std::vector<long>(pre.begin() + k, pre.end()), period);
    std::size_t r = (k - pre.size()) % period.size();
    std::vector<long> p(period.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = period[(i + r) % period.size()];
    return Address({}, p);
}

long Address::max_abs() const {
    long m = 0;
    for (long v : pre) m = std::max(m, std::labs(v));
    for (long v : period) m = std::max(m, std::labs(v));
    return m;
}

std::vector<long> Address::prefix(std::size_t n) const {
    std::vector<long> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = entry(i);
    return out;
}

bool same_sequence(const Address& a, const Address& b) {
    std::size_t n = std::max(a.pre.size(), b.pre.size()) + std::lcm(a.period.size(), b.period.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.entry(i) != b.entry(i)) return false;
    return true;
}

bool overlapping(const Address& a, const Address& b) {
    // any coincidence of shifts persists, so it suffices to compare the purely periodic tails
    Address ta = a.shift(a.pre.size());
    for (std::size_t l = 0; l < b.period.size(); ++l)
        if (same_sequence(ta, b.shift(b.pre.size() + l))) return true;
    return false;
}

double eval_F(int d, double t) {
    if (d < 1) throw DomainError("degree must be >= 1");
    double y = std::expm1(d * t);
    if (!std::isfinite(y)) {
        std::ostringstream os;
        os << "F overflows at t=" << t << ", d=" << d;
        throw OverflowError(os.str());
    }
    return y;
}

double eval_F_inverse(int d, double y) {
    if (d < 1) throw DomainError("degree must be >= 1");
    if (!(y > -1)) throw DomainError("F inverse needs y > -1");
    return std::log1p(y) / d;
}

double eval_F_inverse_iter(int d, double y, int n) {
    for (int k = 0; k < n; ++k) y = eval_F_inverse(d, y);
    return y;
}

FIterate iterate_F(int d, double t, int n, double cap) {
    if (d < 1) throw DomainError("degree must be >= 1");
    if (n < 0) throw DomainError("iteration count must be >= 0");
    FIterate r;
    double x = t;
    if (x > cap) {
        r.overflow = true;
        r.overflow_at = 0;
        return r;
    }
    for (int k = 1; k <= n; ++k) {
        x = std::expm1(d * x);
        if (!(x <= cap)) {
            r.overflow = true;
            r.overflow_at = k;
            return r;
        }
    }
    r.value = x;
    return r;
}

std::vector<double> potential_chain(int d, double t, int n, double cap) {
    std::vector<double> u(n + 1, INFINITY);
    double x = t;
    for (int k = 0; k <= n; ++k) {
        if (!(x <= cap)) break;
        u[k] = x;
        x = std::expm1(d * x);
    }
    return u;
}

double t_s_estimate(const Address& s, int d) {
    if (d < 1) throw DomainError("degree must be >= 1");
    (void)s;  // every representable address is bounded
    return 0.0;
}

bool potentials_equal(double a, double b, double rel_tol) {
    return std::fabs(a - b) <= rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

std::optional<double> PotentialLadder::below(double rho) const {
    std::optional<double> out;
    for (double t : potentials)
        if (t < rho) out = t;
    return out;
}

std::optional<double> PotentialLadder::default_rho() const {
    for (double r : midpoints)
        if (r > t_prime) return r;
    return std::nullopt;
}

namespace {

struct SamplePoint {
    double u;    // potential
    double mod;  // |u + 2 pi i s / d|
};

std::vector<SamplePoint> sample_points(const std::vector<Orbit>& orbits, int d, int depth, double cap) {
    std::vector<SamplePoint> pts;
    for (const auto& o : orbits) {
        auto u = potential_chain(d, o.T, depth, cap);
        for (int j = 0; j <= depth; ++j) {
            if (!std::isfinite(u[j])) break;
            double c = 2 * M_PI * o.s.entry(j) / d;
            pts.push_back({u[j], std::hypot(u[j], c)});
        }
    }
    return pts;
}

}  // namespace

LadderChecks ladder_checks(const std::vector<Orbit>& orbits, int d, const PotentialLadder& lad,
                           double cand, int sample_depth, double cap) {
    LadderChecks ch;
    const auto& P = lad.potentials;
    for (std::size_t i = 0; i + 1 < P.size(); ++i)
        if (P[i] > cand && P[i + 1] - P[i] <= 2) ch.gaps = false;

    auto pts = sample_points(orbits, d, sample_depth, cap);
    for (const auto& a : pts) {
        if (!(a.u > cand)) continue;
        for (const auto& b : pts) {
            if (b.u > a.u && !potentials_equal(a.u, b.u) && !(b.mod > a.mod + 2)) ch.moduli = false;
        }
    }
    for (double rho : lad.midpoints) {
        if (!(rho > cand)) continue;
        for (const auto& a : pts) {
            if (a.u < rho && !(a.mod < rho - 1)) ch.disks = false;
            if (a.u > rho && !(a.mod > rho + 1)) ch.disks = false;
        }
    }
    return ch;
}

PotentialLadder build_ladder(const std::vector<Orbit>& orbits, int d, int J, const LadderOptions& opt) {
    if (J < 0) throw DomainError("ladder depth must be >= 0");
    PotentialLadder lad;
    std::vector<double> all;
    for (const auto& o : orbits) {
        if (!(o.T > t_s_estimate(o.s, d))) throw DomainError("orbit potential must exceed t_s = 0");
        auto u = potential_chain(d, o.T, J, opt.cap);
        for (double v : u) {
            if (std::isfinite(v)) all.push_back(v);
            else lad.truncated = true;
        }
    }
    std::sort(all.begin(), all.end());
    for (double v : all)
        if (lad.potentials.empty() || !potentials_equal(lad.potentials.back(), v, opt.rel_tol))
            lad.potentials.push_back(v);
    for (std::size_t i = 0; i + 1 < lad.potentials.size(); ++i)
        lad.midpoints.push_back(0.5 * (lad.potentials[i] + lad.potentials[i + 1]));

    // grand orbits of potentials: T_i ~ T_k when some iterates coincide
    std::vector<int> cls(orbits.size(), -1);
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        if (cls[i] >= 0) continue;
        cls[i] = lad.period++;
        for (std::size_t k = i + 1; k < orbits.size(); ++k) {
            if (cls[k] >= 0) continue;
            for (int a = 0; a <= J && cls[k] < 0; ++a) {
                if (grid_potentials_equal(d, orbits[i].T, a, orbits[k].T, 0, opt.cap, opt.rel_tol) ||
                    grid_potentials_equal(d, orbits[i].T, 0, orbits[k].T, a, opt.cap, opt.rel_tol))
                    cls[k] = cls[i];
            }
        }
    }

    int depth = opt.sample_depth >= 0 ? opt.sample_depth : J + 2;
    std::vector<double> cands{0.0};
    cands.insert(cands.end(), lad.potentials.begin(), lad.potentials.end());
    lad.t_prime = cands.back();
    for (double c : cands) {
        if (ladder_checks(orbits, d, lad, c, depth, opt.cap).all()) {
            lad.t_prime = c;
            break;
        }
    }
    return lad;
}

bool grid_potentials_equal(int d, double Ti, int j, double Tk, int l, double cap, double rel_tol) {
    // F is injective, so strip the common number of iterations first
    int m = std::min(j, l);
    j -= m;
    l -= m;
    auto a = iterate_F(d, Ti, j, cap);
    auto b = iterate_F(d, Tk, l, cap);
    if (a.overflow || b.overflow) return false;
    return potentials_equal(a.value, b.value, rel_tol);
}

ClusterReport detect_clusters(const std::vector<Orbit>& orbits, int d, int J, double cap) {
    const int m = static_cast<int>(orbits.size());
    std::vector<std::pair<int, int>> idx;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= J; ++j) idx.emplace_back(i, j);
    const int n = static_cast<int>(idx.size());

    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            auto [i, j] = idx[p];
            auto [k, l] = idx[q];
            if (orbits[i].s.entry(j) != orbits[k].s.entry(l)) continue;
            if (!grid_potentials_equal(d, orbits[i].T, j, orbits[k].T, l, cap)) continue;
            parent[find(q)] = find(p);
        }
    }
    ClusterReport rep;
    std::vector<int> slot(n, -1);
    for (int p = 0; p < n; ++p) {
        int r = find(p);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(rep.clusters.size());
            rep.clusters.emplace_back();
        }
        rep.clusters[slot[r]].push_back(idx[p]);
    }
    for (const auto& c : rep.clusters)
        if (c.size() > 1) ++rep.nontrivial_count;

    // infinitely many coincidences: once potentials of two orbits line up at (j,l),
    // they stay aligned at (j+n, l+n); the periodic tails decide whether tracts agree
    // infinitely often
    for (int i = 0; i < m; ++i) {
        for (int k = i + 1; k < m; ++k) {
            bool inf = false;
            for (int a = 0; a <= J && !inf; ++a) {
                for (int side = 0; side < 2 && !inf; ++side) {
                    int j = side == 0 ? a : 0;
                    int l = side == 0 ? 0 : a;
                    if (!grid_potentials_equal(d, orbits[i].T, j, orbits[k].T, l, cap)) continue;
                    const auto& si = orbits[i].s;
                    const auto& sk = orbits[k].s;
                    std::size_t n0 = std::max(si.pre.size(), sk.pre.size());
                    std::size_t w = std::lcm(si.period.size(), sk.period.size());
                    for (std::size_t t = n0; t < n0 + w; ++t)
                        if (si.entry(j + t) == sk.entry(l + t)) inf = true;
                }
            }
            if (inf) {
                rep.infinite = true;
                rep.infinite_pairs.emplace_back(i, k);
            }
        }
    }
    return rep;
}

}  // namespace rayforge
