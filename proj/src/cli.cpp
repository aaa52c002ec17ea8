#include "rayforge/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "rayforge/parallel.hpp"

namespace rayforge {

json run_config_to_json(const RunConfig& c) {
    return json{{"command", c.command},     {"seed", c.seed},           {"tol", c.tol},
                {"cap", c.cap},             {"max_depth", c.max_depth}, {"max_iter", c.max_iter},
                {"format", c.format},       {"verbosity", c.verbosity}, {"args", c.args}};
}

namespace {

json envelope(const RunConfig& rc) { return json{{"schema", kSchema}, {"config", run_config_to_json(rc)}}; }

void emit(const json& j, std::ostream& out) { out << j.dump(2) << "\n"; }

// writes to the file if given, else to out
void emit_to(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        emit(j, out);
        return;
    }
    std::ofstream f(path);
    if (!f) throw DomainError("cannot write " + path);
    emit(j, f);
}

json error_json(const RunConfig& rc, const std::string& kind, const std::string& msg) {
    json j = envelope(rc);
    j["error"] = kind;
    j["message"] = msg;
    return j;
}

std::vector<cplx> points_from_json(const json& j, const char* key) {
    const json& arr = j.is_object() ? j.at(key) : j;
    std::vector<cplx> v;
    for (const auto& p : arr) v.push_back(cplx_from_json(p));
    return v;
}

struct RayArgs {
    std::string map, address, out = "csv";
    double t_lo = 1, t_hi = 5;
    int samples = 16;
    std::string output;
};

int cmd_ray(RunConfig& rc, const RayArgs& a, int threads, std::ostream& out) {
    auto f = map_from_json(read_json_file(a.map));
    auto s = address_from_json(read_json_file(a.address));
    rc.format = a.out;
    rc.args = json{{"map", map_to_json(f)}, {"address", address_to_json(s)}, {"t_lo", a.t_lo},
                   {"t_hi", a.t_hi},        {"samples", a.samples}};
    auto cfg = make_tract_config(f);
    RayOptions ro;
    ro.cap = rc.cap;
    ro.tol = rc.tol;
    ro.max_depth = rc.max_depth;
    ro.threads = threads;
    RaySegment seg;
    try {
        seg = trace_segment(f, cfg, s, a.t_lo, a.t_hi, a.samples, ro);
    } catch (const NotConverged& e) {
        json j = error_json(rc, "not_converged", e.what());
        j["history"] = e.history;
        emit(j, out);
        throw;
    }
    std::ostringstream os;
    if (a.out == "csv") {
        os << "# schema " << kSchema << "\n# config " << run_config_to_json(rc).dump() << "\n";
        os << "t,re,im,depth,err\n";
        for (const auto& p : seg.samples)
            os << fmt_double(p.t) << "," << fmt_double(p.z.real()) << "," << fmt_double(p.z.imag()) << ","
               << p.depth_used << "," << fmt_double(p.error_estimate) << "\n";
    } else {
        json j = envelope(rc);
        json arr = json::array();
        for (const auto& p : seg.samples)
            arr.push_back(json{{"t", p.t},
                               {"z", cplx_to_json(p.z)},
                               {"offset", cplx_to_json(p.offset)},
                               {"depth", p.depth_used},
                               {"err", p.error_estimate},
                               {"convergence_delta", p.convergence_delta}});
        j["samples"] = arr;
        os << j.dump(2) << "\n";
    }
    if (a.output.empty()) out << os.str();
    else {
        std::ofstream fo(a.output);
        if (!fo) throw DomainError("cannot write " + a.output);
        fo << os.str();
    }
    return kOk;
}

struct ClassifyArgs {
    std::string spec, out;
    bool log_iterates = false;
    double perturb = 0;
};

int cmd_classify(RunConfig& rc, const ClassifyArgs& a, int threads, std::ostream& out, std::ostream& err) {
    auto spec = spec_from_json(read_json_file(a.spec));
    rc.args = json{{"spec", spec_to_json(spec)}, {"perturb", a.perturb}, {"log_iterates", a.log_iterates}};
    ThurstonOptions opt;
    opt.max_iter = rc.max_iter;
    opt.tol = rc.tol;
    opt.perturb = a.perturb;
    opt.seed = rc.seed;
    opt.log_iterates = a.log_iterates;
    opt.threads = threads;
    opt.cap = rc.cap;
    ClassifyResult res;
    try {
        res = classify(spec, opt);
    } catch (const SpecRejected& e) {
        json j = error_json(rc, "spec_rejected", e.what());
        j["reason"] = e.reason;
        emit(j, out);
        throw;
    } catch (const NotConverged& e) {
        json j = error_json(rc, "not_converged", e.what());
        j["delta_history"] = e.history;
        emit(j, out);
        throw;
    }
    if (rc.verbosity > 0)
        for (std::size_t k = 0; k < res.state.deltas.size(); ++k)
            err << "iteration " << k + 1 << " delta " << res.state.deltas[k] << "\n";
    json j = envelope(rc);
    j["spec"] = spec_to_json(spec);
    j["map"] = map_to_json(res.state.map());
    j["coeffs"] = j["map"]["coeffs"];
    j["converged"] = res.converged;
    j["iterations"] = res.state.iteration;
    j["grid"] = grid_to_json(res.state.grid);
    j["certificate"] = certificate_to_json(res.certificate);
    j["delta_history"] = res.state.deltas;
    if (a.log_iterates) {
        json it = json::array();
        for (const auto& s : res.state.log) {
            MarkedGrid g = res.state.grid;
            g.delta = s.delta;
            it.push_back(json{{"iteration", s.iteration},
                              {"map", map_to_json(s.map)},
                              {"delta_sup", s.delta_sup},
                              {"delta", grid_to_json(g)["delta"]}});
        }
        j["iterates"] = it;
    }
    emit_to(j, a.out, out);
    if (!res.certificate.passed) {
        err << "certificate failed\n";
        return kNumeric;
    }
    return kOk;
}

int cmd_verify(RunConfig& rc, const std::string& map_path, const std::string& spec_path, int n_steps,
               std::ostream& out) {
    auto f = map_from_json(read_json_file(map_path));
    json sj = read_json_file(spec_path);
    auto spec = spec_from_json(sj.contains("spec") ? sj.at("spec") : sj);
    rc.args = json{{"map", map_to_json(f)}, {"spec", spec_to_json(spec)}, {"n_steps", n_steps}};
    VerifyOptions vo;
    vo.n_steps = n_steps;
    auto cert = verify(f, spec, vo);
    json j = envelope(rc);
    j["certificate"] = certificate_to_json(cert);
    emit(j, out);
    return cert.passed ? kOk : kNumeric;
}

int cmd_appendix(RunConfig& rc, int d, double rho, int samples, int circle, int threads, std::ostream& out) {
    rc.args = json{{"d", d}, {"rho", rho}, {"samples", samples}, {"circle_samples", circle}};
    auto rep = disk_bound_monte_carlo(d, rho, samples, rc.seed, circle, threads);
    json j = envelope(rc);
    j["report"] = disk_report_to_json(rep);
    emit(j, out);
    return kOk;
}

struct InvArgs {
    std::string run;
    double rho = 0;
    double K = 4, A = 1, C = 1;
};

int cmd_invariant(RunConfig& rc, const InvArgs& a, std::ostream& out) {
    json run = read_json_file(a.run);
    if (!run.contains("spec") || !run.contains("grid")) throw DomainError("run JSON needs \"spec\" and \"grid\"");
    auto spec = spec_from_json(run.at("spec"));
    rc.args = json{{"spec", spec_to_json(spec)}, {"K", a.K}, {"A", a.A}, {"C", a.C}};
    if (a.rho > 0) rc.args["rho"] = a.rho;
    auto lad = build_ladder(spec.orbits, spec.d, spec.depth());
    InvariantOptions io;
    if (a.rho > 0) io.rho = a.rho;
    io.K = a.K;
    io.A = a.A;
    io.C = a.C;
    std::vector<std::pair<int, std::pair<json, json>>> snaps;  // iteration, (map, delta)
    if (run.contains("iterates"))
        for (const auto& s : run.at("iterates")) snaps.push_back({s.at("iteration").get<int>(), {s.at("map"), s.at("delta")}});
    else
        snaps.push_back({run.value("iterations", 0), {run.at("map"), run.at("grid").at("delta")}});
    json rows = json::array();
    for (const auto& [it, md] : snaps) {
        auto f = map_from_json(md.first);
        auto g = grid_from_json(spec, md.second);
        auto row = invariant_set_diagnostics(g, f, spec, lad, io);
        row.iteration = it;
        rows.push_back(invariant_row_to_json(row));
    }
    json j = envelope(rc);
    j["t_prime"] = lad.t_prime;
    j["ladder"] = json{{"potentials", lad.potentials}, {"midpoints", lad.midpoints}, {"truncated", lad.truncated}};
    j["rows"] = rows;
    emit(j, out);
    return kOk;
}

int cmd_tracts(RunConfig& rc, const std::string& map_path, double eps, std::ostream& out) {
    auto f = map_from_json(read_json_file(map_path));
    rc.args = json{{"map", map_to_json(f)}, {"eps", eps}};
    auto cfg = make_tract_config(f, eps > 0 ? eps : -1);
    json j = envelope(rc);
    j["tracts"] = tract_config_to_json(cfg);
    auto sd = singular_values(f);
    json sv = json::array();
    for (auto v : sd.all) sv.push_back(cplx_to_json(v));
    j["singular_values"] = sv;
    emit(j, out);
    return kOk;
}

int cmd_word(RunConfig& rc, const std::string& marked, const std::string& curve, double half_plane,
             std::ostream& out) {
    auto V = points_from_json(read_json_file(marked), "points");
    auto C = points_from_json(read_json_file(curve), "vertices");
    json vp = json::array(), cp = json::array();
    for (auto z : V) vp.push_back(cplx_to_json(z));
    for (auto z : C) cp.push_back(cplx_to_json(z));
    rc.args = json{{"marked", vp}, {"curve", cp}};
    MarkedSet ms(V);
    std::optional<double> hp;
    if (std::isfinite(half_plane)) {
        hp = half_plane;
        rc.args["half_plane"] = half_plane;
    }
    auto w = word_of_curve(ms, PolylineCurve{C}, hp);
    json j = envelope(rc);
    j["word"] = word_to_json(w);
    j["length"] = w.size();
    j["abelianization"] = abelianize(w, static_cast<int>(V.size()));
    emit(j, out);
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"rayforge: dynamic rays and Thurston pullbacks for f = p o exp"};
    app.require_subcommand(1);
    RunConfig rc;
    int threads = 1;
    app.add_option("--threads", threads, "worker threads (RAYFORGE_THREADS overrides)");
    app.add_option("--seed", rc.seed, "seed for Monte-Carlo diagnostics and perturbations");
    app.add_option("--tol", rc.tol, "tracer / pullback tolerance");
    app.add_option("--cap", rc.cap, "overflow cap for F iterates");
    app.add_option("--max-depth", rc.max_depth, "ray tracer depth budget");
    app.add_option("--max-iter", rc.max_iter, "pullback iteration budget");
    app.add_flag("-v,--verbose", rc.verbosity, "progress on stderr");
    app.fallthrough();

    auto* ray = app.add_subcommand("ray", "dynamic rays");
    ray->require_subcommand(1);
    RayArgs ra;
    auto* trace = ray->add_subcommand("trace", "trace a ray segment");
    trace->add_option("--map", ra.map, "map JSON")->required();
    trace->add_option("--address", ra.address, "address JSON")->required();
    trace->add_option("--t-lo", ra.t_lo, "lowest potential")->required();
    trace->add_option("--t-hi", ra.t_hi, "highest potential")->required();
    trace->add_option("--samples", ra.samples, "geometric samples")->capture_default_str();
    trace->add_option("--out", ra.out, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    trace->add_option("-o,--output", ra.output, "write to file instead of stdout");

    ClassifyArgs ca;
    auto* cls = app.add_subcommand("classify", "Thurston pullback for a target spec");
    cls->add_option("--spec", ca.spec, "spec JSON")->required();
    cls->add_option("--out", ca.out, "result JSON path (stdout if omitted)");
    cls->add_flag("--log-iterates", ca.log_iterates, "store every iterate in the result");
    cls->add_option("--perturb", ca.perturb, "perturb the initial first column by this much");

    std::string vmap, vspec;
    int vsteps = 64;
    auto* ver = app.add_subcommand("verify", "certify a map against a spec");
    ver->add_option("--map", vmap, "map JSON")->required();
    ver->add_option("--spec", vspec, "spec JSON (or a classify result)")->required();
    ver->add_option("--n-steps", vsteps, "forward iteration budget")->capture_default_str();

    auto* diag = app.add_subcommand("diag", "diagnostics");
    diag->require_subcommand(1);
    int ad = 2, as = 1000, acirc = 360;
    double arho = 100;
    auto* appx = diag->add_subcommand("appendix-a", "Monte-Carlo coefficient and disk bounds");
    appx->add_option("--d", ad, "degree")->required();
    appx->add_option("--rho", arho, "disk radius")->required();
    appx->add_option("--samples", as, "maps")->capture_default_str();
    appx->add_option("--circle-samples", acirc, "points per circle")->capture_default_str();
    InvArgs ia;
    auto* inv = diag->add_subcommand("invariant-set", "conditions of the invariant set per iteration");
    inv->add_option("--run", ia.run, "classify result JSON")->required();
    inv->add_option("--rho", ia.rho, "override the ladder radius");
    inv->add_option("--K", ia.K, "M_rho constant")->capture_default_str();
    inv->add_option("--A", ia.A, "growth constant")->capture_default_str();
    inv->add_option("--C", ia.C, "budget constant")->capture_default_str();

    auto* tr = app.add_subcommand("tracts", "tract geometry");
    tr->require_subcommand(1);
    std::string tmap;
    double teps = -1;
    auto* insp = tr->add_subcommand("inspect", "strip bounds of a map");
    insp->add_option("--map", tmap, "map JSON")->required();
    insp->add_option("--eps", teps, "strip widening (default pi/4d)");

    auto* hom = app.add_subcommand("homotopy", "homotopy words");
    hom->require_subcommand(1);
    std::string hmarked, hcurve;
    double hhalf = NAN;
    auto* word = hom->add_subcommand("word", "reduced word of a curve");
    word->add_option("--marked", hmarked, "marked points JSON")->required();
    word->add_option("--curve", hcurve, "polyline JSON")->required();
    word->add_option("--half-plane", hhalf, "check everything lies in Re > r");

    std::vector<const char*> cargv;
    for (const auto& s : argv) cargv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (const char* env = std::getenv("RAYFORGE_THREADS")) {
        try {
            threads = std::stoi(env);
        } catch (...) {
            err << "ignoring bad RAYFORGE_THREADS=" << env << "\n";
        }
    }
    if (threads < 1) threads = 1;
    set_default_threads(threads);

    try {
        if (*trace) {
            rc.command = "ray trace";
            return cmd_ray(rc, ra, threads, out);
        }
        if (*cls) {
            rc.command = "classify";
            return cmd_classify(rc, ca, threads, out, err);
        }
        if (*ver) {
            rc.command = "verify";
            return cmd_verify(rc, vmap, vspec, vsteps, out);
        }
        if (*appx) {
            rc.command = "diag appendix-a";
            return cmd_appendix(rc, ad, arho, as, acirc, threads, out);
        }
        if (*inv) {
            rc.command = "diag invariant-set";
            return cmd_invariant(rc, ia, out);
        }
        if (*insp) {
            rc.command = "tracts inspect";
            return cmd_tracts(rc, tmap, teps, out);
        }
        if (*word) {
            rc.command = "homotopy word";
            return cmd_word(rc, hmarked, hcurve, hhalf, out);
        }
    } catch (const SpecRejected& e) {
        err << "rejected (" << e.reason << "): " << e.what() << "\n";
        return kRejected;
    } catch (const Unsupported& e) {
        err << "unsupported: " << e.what() << "\n";
        emit(error_json(rc, "unsupported", e.what()), out);
        return kRejected;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DegenerateInput& e) {
        err << "degenerate input: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        err << "bad JSON: " << e.what() << "\n";
        return kUsage;
    } catch (const NotConverged& e) {
        err << "not converged: " << e.what() << "\n";
        return kNumeric;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << "\n";
        emit(error_json(rc, "numeric_failure", e.what()), out);
        return kNumeric;
    }
    err << app.help();
    return kUsage;
}

}  // namespace rayforge
