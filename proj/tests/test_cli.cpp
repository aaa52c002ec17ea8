#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "rayforge/cli.hpp"

using namespace rayforge;
namespace fs = std::filesystem;

namespace {
struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "rayforge");
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

std::string D(const std::string& rel) { return data_path(rel); }

fs::path tmpdir() {
    auto p = fs::temp_directory_path() / "rayforge_cli_test";
    fs::create_directories(p);
    return p;
}
}  // namespace

TEST_CASE("ray trace csv and json") {
    auto r = run({"ray", "trace", "--map", D("maps/exp.json"), "--address", D("addresses/zero.json"), "--t-lo", "1",
                  "--t-hi", "5", "--samples", "4", "--out", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    CHECK(l1 == "# schema rayforge/1");
    CHECK(l2.rfind("# config {", 0) == 0);
    CHECK(l3 == "t,re,im,depth,err");
    int rows = 0;
    for (std::string l; std::getline(in, l);) ++rows;
    CHECK(rows == 4);

    auto j = run({"ray", "trace", "--map", D("maps/exp.json"), "--address", D("addresses/one.json"), "--t-lo", "1",
                  "--t-hi", "2", "--samples", "3", "--out", "json"});
    REQUIRE(j.code == 0);
    auto doc = json::parse(j.out);
    CHECK(doc["schema"] == kSchema);
    CHECK(doc["config"]["command"] == "ray trace");
    CHECK(doc["samples"].size() == 3);
}

TEST_CASE("exit codes") {
    CHECK(run({"ray", "trace", "--address", D("addresses/zero.json"), "--t-lo", "1", "--t-hi", "2"}).code == kUsage);
    CHECK(run({"nonsense"}).code == kUsage);
    CHECK(run({"classify", "--spec", "/nonexistent.json"}).code == kUsage);

    auto bad = tmpdir() / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run({"classify", "--spec", bad.string()}).code == kUsage);

    auto cl = run({"classify", "--spec", D("specs/cluster_counterexample.json")});
    CHECK(cl.code == kRejected);
    CHECK(json::parse(cl.out)["reason"] == "cluster");
    auto per = run({"classify", "--spec", D("specs/d1_zero_exact.json")});
    CHECK(per.code == kRejected);
    CHECK(json::parse(per.out)["reason"] == "periodic");
    CHECK(run({"classify", "--spec", D("specs/too_many_orbits.json")}).code == kRejected);

    auto nc = run({"--max-iter", "2", "classify", "--spec", D("specs/d1_zero.json")});
    CHECK(nc.code == kNumeric);
    CHECK(json::parse(nc.out)["delta_history"].size() == 2);
}

TEST_CASE("classify, verify and invariant-set") {
    auto out = tmpdir() / "run_d1.json";
    auto r = run({"classify", "--spec", D("specs/d1_zero.json"), "--out", out.string(), "--log-iterates"});
    REQUIRE(r.code == 0);
    auto doc = read_json_file(out.string());
    CHECK(doc["converged"] == true);
    CHECK(doc["certificate"]["passed"] == true);
    CHECK(std::fabs(doc["coeffs"][0]["re"].get<double>() - 1.5713905392840270) < 1e-9);
    // iterates include the initial straight grid
    CHECK(doc["iterates"].size() == doc["delta_history"].size() + 1);

    auto v = run({"verify", "--map", D("maps/exp.json"), "--spec", D("specs/d1_zero.json")});
    // e^z is not the classified map: the certificate fails and so does the exit code
    CHECK(v.code == kNumeric);
    CHECK(json::parse(v.out)["certificate"]["passed"] == false);
    auto vr = run({"verify", "--map", D("maps/exp.json"), "--spec", out.string()});
    CHECK(vr.code == kNumeric);
    auto mp = tmpdir() / "kappa.json";
    std::ofstream(mp) << doc["map"].dump();
    auto vk = run({"verify", "--map", mp.string(), "--spec", out.string()});
    CHECK(vk.code == kOk);
    CHECK(json::parse(vk.out)["certificate"]["passed"] == true);

    auto inv = run({"diag", "invariant-set", "--run", out.string()});
    REQUIRE(inv.code == 0);
    auto id = json::parse(inv.out);
    REQUIRE(id["rows"].size() > 0);
    for (const auto& row : id["rows"]) {
        CHECK(row["marked_points_inside"] == true);
        CHECK(row["precise_asymptotics"] == true);
        CHECK(row["separation"] == true);
        CHECK(row["bounded_homotopy"] == true);
    }
}

TEST_CASE("determinism and thread override") {
    std::vector<std::string> a{"--threads", "1", "ray", "trace", "--map", D("maps/exp2.json"), "--address",
                               D("addresses/alt_1_m1.json"), "--t-lo", "1", "--t-hi", "5", "--samples", "16",
                               "--out", "csv"};
    auto r1 = run(a);
    auto b = a;
    b[1] = "8";
    auto r2 = run(b);
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);
    setenv("RAYFORGE_THREADS", "3", 1);
    auto r3 = run(a);
    unsetenv("RAYFORGE_THREADS");
    CHECK(r3.out == r1.out);

    std::vector<std::string> ap{"--seed", "7", "diag", "appendix-a", "--d", "2", "--rho", "100", "--samples", "50"};
    auto p1 = run(ap), p2 = run(ap);
    CHECK(p1.code == 0);
    CHECK(p1.out == p2.out);
    auto pd = json::parse(p1.out);
    CHECK(pd["config"]["seed"] == 7);
    CHECK(pd["report"]["containment_failures"] == 0);
}

TEST_CASE("tracts and homotopy") {
    auto t = run({"tracts", "inspect", "--map", D("maps/exp2.json")});
    REQUIRE(t.code == 0);
    auto tj = json::parse(t.out);
    CHECK(tj["tracts"]["certified"] == true);
    CHECK(tj["tracts"]["strips_mod_period"].size() == 2);

    auto h = run({"homotopy", "word", "--marked", D("fixtures/loop_marked.json"), "--curve",
                  D("fixtures/loop_curve.json")});
    REQUIRE(h.code == 0);
    auto hj = json::parse(h.out);
    CHECK(hj["word"] == json::parse("[[1,1]]"));
    CHECK(hj["abelianization"] == json::parse("[0,1]"));
    auto hh = run({"homotopy", "word", "--marked", D("fixtures/loop_marked.json"), "--curve",
                   D("fixtures/loop_curve.json"), "--half-plane", "0.5"});
    CHECK(hh.code == kUsage);
}
