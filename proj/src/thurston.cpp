#include "rayforge/thurston.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rayforge/parallel.hpp"

namespace rayforge {

void validate_spec(const TargetSpec& spec, const SpecLimits& lim) {
    const int d = spec.d, m = spec.m(), J = spec.depth();
    if (d < 1) throw SpecRejected("degree", "degree must be >= 1");
    if (m < 1) throw SpecRejected("orbits", "need at least one singular orbit");
    if (m > d)
        throw SpecRejected("too_many_orbits", "a map of degree " + std::to_string(d) + " has at most " +
                                                  std::to_string(d) + " singular values, got " + std::to_string(m));
    if (spec.asymptotic_orbit < 0 || spec.asymptotic_orbit >= m)
        throw SpecRejected("assignment", "asymptotic_orbit out of range");
    if (J > lim.max_J)
        throw SpecRejected("depth", "J=" + std::to_string(J) + " is deeper than the supported " + std::to_string(lim.max_J) +
                                        "; use a smaller J");
    for (const auto& o : spec.orbits)
        if (!(o.T > 0) || !std::isfinite(o.T)) throw SpecRejected("potential", "potentials must be finite and > t_s = 0");

    auto cl = detect_clusters(spec.orbits, d, J);
    if (cl.infinite) {
        std::ostringstream os;
        os << "infinite cluster: orbits";
        for (auto [i, k] : cl.infinite_pairs) os << " (" << i << "," << k << ")";
        os << " share potential and tract infinitely often";
        throw SpecRejected("cluster", os.str());
    }
    for (int i = 0; i < m; ++i)
        for (int k = i + 1; k < m; ++k)
            if (overlapping(spec.orbits[i].s, spec.orbits[k].s))
                throw SpecRejected("overlapping", "addresses of orbits " + std::to_string(i) + " and " +
                                                      std::to_string(k) + " overlap under shifts");
    if (spec.semantics == AddressSemantics::Exact)
        throw SpecRejected("periodic",
                           "address is (pre-)periodic; only non-(pre-)periodic addresses can be classified "
                           "(set address_semantics to \"horizon\" to treat it as a finite prefix)");
    if (d > 2 && m != 1 && m != d)
        throw Unsupported("fitting for d > 2 supports m = 1 or m = d only");
}

cplx MarkedGrid::asymptotic(int i, int j) const {
    if (!std::isfinite(u[i][j])) throw OverflowError("grid point beyond the representable range");
    return {u[i][j], 2 * M_PI * double(s[i][j]) / d};
}

cplx MarkedGrid::z(int i, int j) const { return asymptotic(i, j) + delta[i][j]; }

MarkedGrid straight_grid(const TargetSpec& spec, double cap) {
    MarkedGrid g;
    g.d = spec.d;
    g.m = spec.m();
    g.J = spec.depth();
    for (const auto& o : spec.orbits) {
        g.u.push_back(potential_chain(spec.d, o.T, g.J + 1, cap));
        std::vector<long> s(g.J + 2);
        for (int j = 0; j <= g.J + 1; ++j) s[j] = o.s.entry(j);
        g.s.push_back(s);
        g.delta.emplace_back(g.J + 2, cplx(0.0));
    }
    return g;
}

namespace {

// small dense complex solve, partial pivoting
std::vector<cplx> solve(std::vector<std::vector<cplx>> A, std::vector<cplx> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
        if (std::abs(A[p][c]) == 0) throw NotConverged("singular Jacobian in map fitting");
        std::swap(A[p], A[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            cplx f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t r = n; r-- > 0;) {
        cplx s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
        x[r] = s / A[r][r];
    }
    return x;
}

std::vector<cplx> crit_points_from(const PolyExpMap& f, const std::vector<cplx>& init) {
    std::vector<cplx> a(f.d - 1);
    double sc = 0;
    for (int k = 1; k < f.d; ++k) {
        a[k - 1] = double(k) * f.b[k] / double(f.d);
        sc = std::max(sc, std::abs(a[k - 1]));
    }
    auto z = monic_roots(a, init, sc);
    // keep the labels of the previous points (continuity)
    std::vector<cplx> out(init.size());
    std::vector<bool> used(z.size(), false);
    for (std::size_t k = 0; k < init.size(); ++k) {
        std::size_t best = 0;
        double bd = INFINITY;
        for (std::size_t q = 0; q < z.size(); ++q)
            if (!used[q] && std::abs(z[q] - init[k]) < bd) {
                bd = std::abs(z[q] - init[k]);
                best = q;
            }
        used[best] = true;
        out[k] = z[best];
    }
    return out;
}

// Newton on b_1..b_{d-1} so that p(c_k) = v_k; d p(c_k)/d b_j = c_k^j at a critical point
void newton_fit(FitResult& fr, const std::vector<cplx>& v) {
    auto& f = fr.map;
    const int n = f.d - 1;
    auto resid = [&](const PolyExpMap& g, const std::vector<cplx>& cp) {
        std::vector<cplx> r(n);
        for (int k = 0; k < n; ++k) r[k] = g.p(cp[k]) - v[k];
        return r;
    };
    auto norm = [](const std::vector<cplx>& r) {
        double s = 0;
        for (auto x : r) s = std::max(s, std::abs(x));
        return s;
    };
    double scale = 1;
    for (auto x : v) scale = std::max(scale, std::abs(x));
    auto r = resid(f, fr.critical_points);
    for (int it = 0; it < 60; ++it) {
        if (norm(r) <= 1e-13 * scale) return;
        std::vector<std::vector<cplx>> Jm(n, std::vector<cplx>(n));
        for (int k = 0; k < n; ++k) {
            cplx pw = 1.0;
            for (int j = 1; j <= n; ++j) {
                pw *= fr.critical_points[k];
                Jm[k][j - 1] = pw;
            }
        }
        std::vector<cplx> rhs(n);
        for (int k = 0; k < n; ++k) rhs[k] = -r[k];
        auto step = solve(Jm, rhs);
        double lam = 1;
        bool moved = false;
        for (int h = 0; h < 30; ++h, lam *= 0.5) {
            PolyExpMap g = f;
            for (int j = 1; j <= n; ++j) g.b[j] += lam * step[j - 1];
            std::vector<cplx> cp;
            try {
                cp = crit_points_from(g, fr.critical_points);
            } catch (const RootSolverFailure&) {
                continue;
            }
            auto nr = resid(g, cp);
            if (norm(nr) < norm(r)) {
                f = g;
                fr.critical_points = cp;
                r = nr;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (norm(r) > 1e-10 * scale)
        throw NotConverged("map fitting (Newton on critical values) stalled, residual " + std::to_string(norm(r)));
}

}  // namespace

FitResult fit_map(int d, const std::vector<cplx>& targets, int a, const FitResult* warm) {
    const int m = static_cast<int>(targets.size());
    if (m < 1 || m > d) throw DomainError("fit_map needs 1 <= m <= d targets");
    if (a < 0 || a >= m) throw DomainError("asymptotic orbit index out of range");
    std::vector<cplx> crit_targets;
    for (int i = 0; i < m; ++i)
        if (i != a) crit_targets.push_back(targets[i]);
    const cplx b0 = targets[a];
    FitResult fr;
    if (d == 1) {
        fr.map = PolyExpMap(1, {b0});
        return fr;
    }
    if (m == 1) {
        std::vector<cplx> b(d, 0.0);
        b[0] = b0;
        fr.map = PolyExpMap(d, b);
        fr.critical_points.assign(d - 1, 0.0);
        return fr;
    }
    if (d == 2) {
        cplx v = crit_targets[0];
        cplx b = 2.0 * std::sqrt(b0 - v);
        if (warm && std::abs(-b - warm->map.b[1]) < std::abs(b - warm->map.b[1])) b = -b;
        fr.tie = std::abs(b) <= 1e-12 * std::max(1.0, std::abs(b0));
        fr.map = PolyExpMap(2, {b0, b});
        fr.critical_points = {-b / 2.0};
        return fr;
    }
    if (m != d) throw Unsupported("fitting for d > 2 supports m = 1 or m = d only");

    // continuation from a start polynomial with simple critical points
    FitResult cur;
    std::vector<cplx> v_start;
    if (warm && warm->map.d == d && static_cast<int>(warm->critical_points.size()) == d - 1) {
        cur = *warm;
    } else {
        std::vector<cplx> b(d, 0.0);
        b[1] = -double(d);  // p' = d (z^{d-1} - 1)
        cur.map = PolyExpMap(d, b);
        for (int k = 0; k < d - 1; ++k) cur.critical_points.push_back(std::polar(1.0, 2 * M_PI * k / (d - 1)));
    }
    cplx shift = b0 - cur.map.b[0];
    cur.map.b[0] = b0;
    for (auto c : cur.critical_points) v_start.push_back(cur.map.p(c));
    (void)shift;
    const int steps = warm ? 4 : 24;
    for (int k = 1; k <= steps; ++k) {
        double lam = double(k) / steps;
        std::vector<cplx> v(d - 1);
        for (int q = 0; q < d - 1; ++q) v[q] = (1 - lam) * v_start[q] + lam * crit_targets[q];
        newton_fit(cur, v);
    }
    return cur;
}

ThurstonState init_state(const TargetSpec& spec, const ThurstonOptions& opt) {
    validate_spec(spec);
    ThurstonState st;
    st.grid = straight_grid(spec, opt.cap);
    if (!std::isfinite(st.grid.u[0][0])) throw SpecRejected("potential", "potential too large to represent");
    if (opt.perturb != 0) {
        Rng rng(stream_seed(opt.seed, 0x7075, 0));
        for (int i = 0; i < st.grid.m; ++i) st.grid.delta[i][0] = opt.perturb * std::polar(1.0, 2 * M_PI * rng.uniform());
    }
    std::vector<cplx> col0;
    for (int i = 0; i < st.grid.m; ++i) col0.push_back(st.grid.z(i, 0));
    st.fit = fit_map(spec.d, col0, spec.asymptotic_orbit);
    st.cfg = make_tract_config(st.fit.map);
    if (opt.log_iterates) st.log.push_back({0, st.fit.map, st.grid.delta, 0});
    return st;
}

void pullback_step(ThurstonState& st, const TargetSpec& spec, const ThurstonOptions& opt) {
    auto& g = st.grid;
    const auto& f = st.fit.map;
    const int m = g.m, J = g.J;
    auto nd = g.delta;
    // branches of f^{-1} are univalent on any half plane free of singular values; the
    // certified tract radius is only needed for the strip geometry
    const double r_free = singular_values(f).max_abs();
    std::vector<std::pair<int, int>> work;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= J; ++j) work.emplace_back(i, j);
    parallel_for(
        work.size(),
        [&](std::size_t w) {
            auto [i, j] = work[w];
            double re_src = g.u[i][j + 1] + g.delta[i][j + 1].real();
            if (!(re_src > r_free)) {
                std::ostringstream os;
                os << "marked point (" << i << "," << j + 1 << ") has Re " << re_src << " <= max|SV| = " << r_free
                   << ": it left the right half plane, the points do not stay inside the invariant disk";
                throw InvariantViolation(os.str());
            }
            cplx dl = pull_offset(f, g.s[i][j], g.u[i][j], g.u[i][j + 1], g.s[i][j + 1], g.delta[i][j + 1]);
            if (std::fabs(dl.imag()) > M_PI / (2 * g.d) + st.cfg.eps)
                throw Unsupported("pullback of (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") leaves its strip; a nontrivial leg homotopy would be needed");
            nd[i][j] = dl;
        },
        opt.threads);
    double sup = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= J; ++j) sup = std::max(sup, std::abs(nd[i][j] - g.delta[i][j]));
    g.delta = nd;
    std::vector<cplx> col0;
    for (int i = 0; i < m; ++i) col0.push_back(g.z(i, 0));
    FitResult prev = st.fit;
    st.fit = fit_map(spec.d, col0, spec.asymptotic_orbit, &prev);
    st.cfg = make_tract_config(st.fit.map);
    ++st.iteration;
    st.deltas.push_back(sup);
    if (opt.log_iterates) st.log.push_back({st.iteration, st.fit.map, g.delta, sup});
}

Certificate verify(const PolyExpMap& f, const TargetSpec& spec, const VerifyOptions& opt) {
    Certificate cert;
    auto cfg = make_tract_config(f);
    auto sd = singular_values(f);
    std::vector<cplx> crit;
    for (auto v : sd.critical_values) crit.push_back(v);
    std::vector<bool> used(crit.size(), false);
    cert.passed = true;
    for (int i = 0; i < spec.m(); ++i) {
        OrbitCertificate oc;
        oc.orbit = i;
        const auto& o = spec.orbits[i];
        std::vector<std::pair<cplx, int>> cands;
        if (i == spec.asymptotic_orbit) cands.push_back({sd.asymptotic_value, -1});
        else
            for (std::size_t q = 0; q < crit.size(); ++q)
                if (!used[q]) cands.push_back({crit[q], int(q)});
        int pick = -1;
        double best_score = INFINITY;
        for (auto [v, q] : cands) {
            OrbitCertificate t;
            t.orbit = i;
            t.singular_value = v;
            try {
                auto ex = extract_potential_address(f, cfg, v, opt.n_steps);
                t.t = ex.t;
                t.t_error = std::fabs(ex.t - o.T);
                t.prefix = ex.prefix;
                t.horizon = ex.depth;
                t.residual = ex.residual;
                while (t.match_len < int(ex.prefix.size()) && ex.prefix[t.match_len] == o.s.entry(t.match_len))
                    ++t.match_len;
                bool full = t.match_len == int(ex.prefix.size()) && int(ex.prefix.size()) >= ex.depth;
                t.passed = full && t.t_error < opt.rel_tol * std::max(1.0, o.T);
                if (!full) t.failure = "address prefix mismatch at digit " + std::to_string(t.match_len);
                else if (!t.passed) t.failure = "potential error " + std::to_string(t.t_error);
            } catch (const NotEscaping& e) {
                t.failure = e.what();
                t.orbit_dump = e.orbit;
            }
            double score = (t.passed ? 0 : 1e6) + (t.failure.empty() ? 0 : 1e3) - t.match_len + t.t_error;
            if (std::isnan(score)) score = 1e12;
            if (score < best_score) {
                best_score = score;
                oc = t;
                pick = q;
            }
        }
        if (pick >= 0) used[pick] = true;
        if (cands.empty()) oc.failure = "no singular value left to match this orbit";
        cert.passed = cert.passed && oc.passed;
        cert.orbits.push_back(oc);
    }
    return cert;
}

void add_fixed_point_residuals(Certificate& c, const ThurstonState& st) {
    const auto& g = st.grid;
    const auto& f = st.fit.map;
    double back = 0, fwd = 0;
    for (int i = 0; i < g.m; ++i) {
        for (int j = 0; j < g.J; ++j) {
            cplx dl = pull_offset(f, g.s[i][j], g.u[i][j], g.u[i][j + 1], g.s[i][j + 1], g.delta[i][j + 1]);
            back = std::max(back, std::abs(dl - g.delta[i][j]));
            if (g.finite(i, j + 1) && std::abs(g.z(i, j + 1)) <= 1e4)
                fwd = std::max(fwd, std::abs(f.eval(g.z(i, j)) - g.z(i, j + 1)));
        }
    }
    c.fixed_point_backward = back;
    c.fixed_point_forward = fwd;
}

ClassifyResult classify(const TargetSpec& spec, const ThurstonOptions& opt) {
    ClassifyResult res;
    res.state = init_state(spec, opt);
    for (int it = 0; it < opt.max_iter; ++it) {
        pullback_step(res.state, spec, opt);
        if (res.state.deltas.back() < opt.tol) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) {
        std::ostringstream os;
        os << "pullback did not reach delta < " << opt.tol << " in " << opt.max_iter << " iterations; last delta "
           << res.state.deltas.back();
        throw NotConverged(os.str(), res.state.deltas);
    }
    res.certificate = verify(res.state.fit.map, spec);
    add_fixed_point_residuals(res.certificate, res.state);
    return res;
}

InvariantRow invariant_set_diagnostics(const MarkedGrid& g, const PolyExpMap& f, const TargetSpec& spec,
                                       const PotentialLadder& lad, const InvariantOptions& opt) {
    (void)f;
    InvariantRow row;
    const int d = g.d, m = g.m, J = g.J;
    if (opt.rho) row.rho = *opt.rho;
    else if (auto r = lad.default_rho()) row.rho = *r;
    else throw DomainError("ladder has no midpoint above t'");
    const double rho = row.rho;
    row.rho_above_t_prime = rho > lad.t_prime;
    row.ladder_checks = ladder_checks(spec.orbits, d, lad, std::min(rho, lad.t_prime), J + 2).all() &&
                        ladder_checks(spec.orbits, d, lad, rho >= lad.t_prime ? lad.t_prime : rho - 1e-300, J + 2).all();
    double t_n = lad.below(rho).value_or(0.0);
    double logM = std::log(opt.K) + double(d) * d * d * t_n;

    row.N.assign(m, -1);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= J; ++j)
            if (g.u[i][j] < rho) row.N[i] = j;

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= J; ++j) {
            if (!g.finite(i, j)) continue;
            if (j <= row.N[i]) {
                if (!(std::abs(g.z(i, j)) < rho)) row.cond1 = false;
            } else if (j >= 1 && !(std::abs(g.delta[i][j]) < 1.0 / j)) {
                row.cond2 = false;
            }
        }
    }
    // separation inside D_rho, in log form to keep M^n representable
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= row.N[i]; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l <= row.N[k]; ++l) {
                    if (k * (J + 1) + l <= i * (J + 1) + j) continue;
                    int n = std::min(row.N[i] + 1 - j, row.N[k] + 1 - l);
                    double lhs = std::log(std::abs(g.z(i, j) - g.z(k, l)));
                    double margin = lhs - (std::log(M_PI / (2 * d)) - n * logM);
                    row.worst_sep_log_margin = std::min(row.worst_sep_log_margin, margin);
                    if (!(margin > 0)) row.cond3 = false;
                }
    // bounded homotopy for straight legs relative the earlier points
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= row.N[i]; ++j) {
            std::vector<cplx> V;
            int start = -1;
            for (int l = 0; l <= j; ++l)
                for (int k = 0; k < m; ++k) {
                    if (l == j && k > i) continue;
                    if (!g.finite(k, l)) continue;
                    if (k == i && l == j) start = static_cast<int>(V.size());
                    V.push_back(g.z(k, l));
                }
            MarkedSet ms(V);
            PolylineCurve leg{{ms.points[start]}};
            int len = static_cast<int>(word_of_curve(ms, leg).size());
            row.max_word_len = std::max(row.max_word_len, len);
            if (!(len < homotopy_budget(row.N[i], j, opt.A, opt.C))) row.cond4 = false;
        }
    }
    // Re of pullbacks inside D_rho below rho/2 (also across the boundary)
    double big = 0;
    for (int i = 0; i < m; ++i) {
        int Ni = row.N[i];
        for (int j = 0; j + 1 <= Ni; ++j)
            if (!(g.z(i, j).real() < rho / 2)) row.pullback_real = false;
        if (Ni >= 0 && Ni + 1 <= J + 1 && g.finite(i, Ni + 1)) {
            if (std::abs(g.delta[i][Ni + 1]) < 1 && !(g.z(i, Ni).real() < rho / 2)) row.pullback_real = false;
            big = std::max(big, std::abs(g.asymptotic(i, Ni + 1)));
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= J; ++j) {
            if (!g.finite(i, j + 1)) continue;
            if (std::abs(g.z(i, j + 1)) < big + 1 && !(g.z(i, j).real() < (d + 1) * t_n)) row.real_part_bound = false;
        }
    return row;
}

}  // namespace rayforge
