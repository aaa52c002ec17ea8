#include "rayforge/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace rayforge {

json cplx_to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

cplx cplx_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    throw DomainError("expected a complex number: {\"re\":..,\"im\":..} or [re, im]");
}

json map_to_json(const PolyExpMap& f) {
    json c = json::array();
    for (auto b : f.b) c.push_back(cplx_to_json(b));
    return json{{"d", f.d}, {"coeffs", c}};
}

PolyExpMap map_from_json(const json& j) {
    if (!j.contains("d") || !j.contains("coeffs")) throw DomainError("map JSON needs \"d\" and \"coeffs\"");
    int d = j.at("d").get<int>();
    std::vector<cplx> b;
    for (const auto& c : j.at("coeffs")) b.push_back(cplx_from_json(c));
    if (static_cast<int>(b.size()) != d)
        throw DomainError("map JSON: expected " + std::to_string(d) + " coefficients b_0..b_{d-1}");
    return PolyExpMap(d, b);
}

json address_to_json(const Address& a) { return json{{"preperiod", a.pre}, {"period", a.period}}; }

Address address_from_json(const json& j) {
    std::vector<long> pre = j.value("preperiod", std::vector<long>{});
    if (!j.contains("period")) throw DomainError("address JSON needs a \"period\"");
    auto per = j.at("period").get<std::vector<long>>();
    return Address(pre, per);
}

json spec_to_json(const TargetSpec& s) {
    json o = json::array();
    for (const auto& orb : s.orbits) o.push_back(json{{"T", orb.T}, {"address", address_to_json(orb.s)}});
    return json{{"d", s.d},
                {"J", s.depth()},
                {"asymptotic_orbit", s.asymptotic_orbit},
                {"address_semantics", s.semantics == AddressSemantics::Exact ? "exact" : "horizon"},
                {"orbits", o}};
}

TargetSpec spec_from_json(const json& j) {
    TargetSpec s;
    if (!j.contains("d") || !j.contains("orbits")) throw DomainError("spec JSON needs \"d\" and \"orbits\"");
    s.d = j.at("d").get<int>();
    for (const auto& o : j.at("orbits")) s.orbits.push_back({o.at("T").get<double>(), address_from_json(o.at("address"))});
    s.J = j.value("J", -1);
    s.asymptotic_orbit = j.value("asymptotic_orbit", 0);
    std::string sem = j.value("address_semantics", std::string("exact"));
    if (sem == "exact") s.semantics = AddressSemantics::Exact;
    else if (sem == "horizon") s.semantics = AddressSemantics::Horizon;
    else throw DomainError("address_semantics must be \"exact\" or \"horizon\"");
    return s;
}

json grid_to_json(const MarkedGrid& g) {
    json z = json::array(), dl = json::array();
    for (int i = 0; i < g.m; ++i) {
        json zr = json::array(), dr = json::array();
        for (int j = 0; j <= g.J + 1; ++j) {
            zr.push_back(g.finite(i, j) ? cplx_to_json(g.z(i, j)) : json(nullptr));
            dr.push_back(cplx_to_json(g.delta[i][j]));
        }
        z.push_back(zr);
        dl.push_back(dr);
    }
    return json{{"d", g.d}, {"m", g.m}, {"J", g.J}, {"z", z}, {"delta", dl}};
}

MarkedGrid grid_from_json(const TargetSpec& spec, const json& delta) {
    MarkedGrid g = straight_grid(spec);
    if (static_cast<int>(delta.size()) != g.m) throw DomainError("grid offsets do not match the spec");
    for (int i = 0; i < g.m; ++i) {
        if (static_cast<int>(delta[i].size()) != g.J + 2) throw DomainError("grid offsets do not match the spec depth");
        for (int j = 0; j <= g.J + 1; ++j) g.delta[i][j] = cplx_from_json(delta[i][j]);
    }
    return g;
}

namespace {
json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
}  // namespace

json certificate_to_json(const Certificate& c) {
    json orbs = json::array();
    for (const auto& o : c.orbits) {
        json e{{"orbit", o.orbit},
               {"singular_value", cplx_to_json(o.singular_value)},
               {"t", num_or_null(o.t)},
               {"potential_error", num_or_null(o.t_error)},
               {"address_prefix", o.prefix},
               {"prefix_match", o.match_len},
               {"horizon", o.horizon},
               {"residual", num_or_null(o.residual)},
               {"passed", o.passed}};
        if (!o.failure.empty()) e["failure"] = o.failure;
        if (!o.orbit_dump.empty()) {
            json od = json::array();
            for (auto z : o.orbit_dump) od.push_back(cplx_to_json(z));
            e["orbit"] = od;
        }
        orbs.push_back(e);
    }
    return json{{"passed", c.passed},
                {"fixed_point_residual_backward", c.fixed_point_backward},
                {"fixed_point_residual_forward", c.fixed_point_forward},
                {"orbits", orbs}};
}

json tract_config_to_json(const TractConfig& c) {
    json strips = json::array();
    for (long n = 0; n < c.d; ++n) {
        double cen = c.strip_center(n), h = M_PI / (2 * c.d);
        strips.push_back(json{{"n", n},
                              {"center", cen},
                              {"outer", {cen - h - c.eps, cen + h + c.eps}},
                              {"inner", {cen - h + c.eps, cen + h - c.eps}}});
    }
    return json{{"d", c.d},       {"eps", c.eps},
                {"r", c.r},       {"t_star_upper", c.t_star_upper},
                {"t_star_lower", c.t_star_lower}, {"doublings", c.doublings},
                {"edge_samples", c.edge_samples}, {"certified", c.certified},
                {"strips_mod_period", strips}};
}

json disk_report_to_json(const DiskBoundReport& r) {
    return json{{"d", r.d},
                {"rho", r.rho},
                {"samples", r.samples},
                {"max_critical_point_ratio", r.max_crit_ratio},
                {"worst_critical_sample", r.worst_crit_sample},
                {"max_coefficient_ratio", r.max_coeff_ratio},
                {"containment_failures", r.part1_failures},
                {"image_bound_failures", r.part2_failures},
                {"inconclusive", r.inconclusive},
                {"t_n", r.t_n},
                {"log_M_rho_formula", r.mrho.log_formula},
                {"log_M_rho_empirical", r.mrho.log_empirical},
                {"M_rho_holds", r.mrho.holds()}};
}

json invariant_row_to_json(const InvariantRow& r) {
    return json{{"iteration", r.iteration},
                {"rho", r.rho},
                {"rho_above_t_prime", r.rho_above_t_prime},
                {"N", r.N},
                {"marked_points_inside", r.cond1},
                {"precise_asymptotics", r.cond2},
                {"separation", r.cond3},
                {"bounded_homotopy", r.cond4},
                {"pullback_real_part", r.pullback_real},
                {"real_part_bound", r.real_part_bound},
                {"worst_separation_log_margin", num_or_null(r.worst_sep_log_margin)},
                {"max_word_length", r.max_word_len},
                {"ladder_checks", r.ladder_checks}};
}

json word_to_json(const Word& w) {
    json a = json::array();
    for (const auto& l : w) a.push_back(json::array({l.index, l.sign}));
    return a;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("bad JSON in " + path + ": " + e.what());
    }
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace rayforge
