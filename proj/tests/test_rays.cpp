#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "common.hpp"
#include "rayforge/rays.hpp"

using namespace rayforge;

TEST_CASE("trace_ray examples") {
    auto e = PolyExpMap(1, {0.0});
    auto ce = make_tract_config(e);
    auto p50 = trace_ray(e, ce, Address::constant(0), 50);
    CHECK(std::abs(p50.offset) <= std::exp(-25.0));
    CHECK(std::abs(p50.z - 50.0) <= std::exp(-25.0) + 1e-13);

    // real map, real address: the ray is the real axis; two depths agree
    RayOptions shallow;
    shallow.max_depth = 2;
    shallow.tol = 1e-9;
    auto p3 = trace_ray(e, ce, Address::constant(0), 3);
    auto p3s = trace_ray(e, ce, Address::constant(0), 3, shallow);
    CHECK(std::fabs(p3.z.imag()) < 1e-12);
    CHECK(std::abs(p3.z - p3s.z) < 1e-9);
    CHECK(p3.depth_used > p3s.depth_used);
    shallow.tol = 1e-10;
    CHECK_THROWS_AS(trace_ray(e, ce, Address::constant(0), 3, shallow), NotConverged);

    auto f = load_map("maps/d2_b1_0.1.json");
    auto cf = make_tract_config(f);
    Address one = Address::constant(1);
    auto z = trace_ray(f, cf, one, 10);
    CHECK(std::abs(z.z - cplx(10, M_PI)) < 1e-3);
    double F10 = eval_F(2, 10);
    auto w = trace_ray(f, cf, one.shift(), F10);
    CHECK(std::abs(f.eval(z.z) - w.z) < 1e-8 * std::max(1.0, F10));

    CHECK_THROWS_AS(trace_ray(e, ce, Address::constant(0), 0.0), DomainError);
    RayOptions one_level;
    one_level.max_depth = 1;
    CHECK_THROWS_AS(trace_ray(e, ce, Address::constant(0), 1.0, one_level), NotConverged);
}

TEST_CASE("trace_segment") {
    auto e = PolyExpMap(1, {0.0});
    auto ce = make_tract_config(e);
    auto seg = trace_segment(e, ce, Address::constant(0), 1, 5, 16);
    REQUIRE(seg.samples.size() == 16);
    for (std::size_t k = 0; k < 16; ++k) {
        CHECK(std::fabs(seg.samples[k].z.imag()) < 1e-14);
        if (k) {
            CHECK(seg.samples[k].t > seg.samples[k - 1].t);
            CHECK(seg.samples[k].z.real() > seg.samples[k - 1].z.real());
        }
    }
    CHECK(seg.samples.front().t == 1.0);
    CHECK(seg.samples.back().t == 5.0);

    auto one = trace_segment(e, ce, Address::constant(0), 2, 2, 1);
    CHECK(one.samples.size() == 1);
    CHECK(one.samples[0].z == trace_ray(e, ce, Address::constant(0), 2).z);

    auto f = load_map("maps/d2_b1_0.1.json");
    auto cf = make_tract_config(f);
    Address alt({}, {1, -1});
    auto sg = trace_segment(f, cf, alt, 1, 5, 16);
    for (const auto& p : sg.samples) {
        auto q = trace_ray(f, cf, alt.shift(), eval_F(2, p.t));
        CHECK(std::abs(f.eval(p.z) - q.z) < 1e-7 * std::max(1.0, std::abs(q.z)));
    }
    // thread count does not change the samples
    RayOptions t4;
    t4.threads = 4;
    auto sg4 = trace_segment(f, cf, alt, 1, 5, 16, t4);
    for (std::size_t k = 0; k < 16; ++k) CHECK(sg4.samples[k].z == sg.samples[k].z);
}

TEST_CASE("functional equation on all shipped addresses") {
    for (const char* mp : {"maps/exp.json", "maps/d2_b1_0.1.json", "maps/d3_sample.json"}) {
        auto f = load_map(mp);
        auto cfg = make_tract_config(f);
        for (const char* a : kShippedAddresses) {
            auto s = load_address(std::string("addresses/") + a + ".json");
            for (double t : geometric_grid(1, 5, 16)) {
                auto p = trace_ray(f, cfg, s, t);
                double Ft = eval_F(f.d, t);
                auto q = trace_ray(f, cfg, s.shift(), Ft);
                INFO(std::string(mp) << " " << std::string(a) << " t=" << t);
                CHECK(std::abs(f.eval(p.z) - q.z) < 1e-8 * std::max(1.0, Ft));
                CHECK(p.error_estimate >= p.convergence_delta);
            }
        }
    }
}

TEST_CASE("asymptotic straightness") {
    for (const char* mp : {"maps/exp.json", "maps/exp2.json", "maps/d2_b1_0.1.json"}) {
        auto f = load_map(mp);
        auto cfg = make_tract_config(f);
        for (const char* a : kShippedAddresses) {
            auto s = load_address(std::string("addresses/") + a + ".json");
            double C = 0;
            for (double t : geometric_grid(20, 60, 12)) {
                auto p = trace_ray(f, cfg, s, t);
                C = std::max(C, std::abs(p.offset) * std::exp(t / 2));
            }
            CHECK(C < 100);
        }
    }
}

TEST_CASE("extraction") {
    auto e = PolyExpMap(1, {0.0});
    auto ce = make_tract_config(e);
    auto p = trace_ray(e, ce, Address::constant(0), 2);
    auto ex = extract_potential_address(e, ce, p.z, 64);
    CHECK(std::fabs(ex.t - 2) < 1e-9);
    REQUIRE(!ex.prefix.empty());
    for (long s : ex.prefix) CHECK(s == 0);

    auto one = extract_potential_address(e, ce, cplx(100, 2 * M_PI * 5), 1);
    REQUIRE(!one.prefix.empty());
    CHECK(one.prefix[0] == 5);

    auto m10 = load_map("maps/exp_minus_10.json");
    auto c10 = make_tract_config(m10);
    CHECK_THROWS_AS(extract_potential_address(m10, c10, 0.0, 64), NotEscaping);
    try {
        extract_potential_address(m10, c10, 0.0, 64);
    } catch (const NotEscaping& ne) {
        CHECK(ne.orbit.size() > 1);
    }
}

TEST_CASE("round trip on shipped addresses") {
    std::mt19937_64 rng(17);
    for (const char* mp : {"maps/exp.json", "maps/d2_b1_0.1.json", "maps/d3_sample.json"}) {
        auto f = load_map(mp);
        auto cfg = make_tract_config(f);
        for (const char* a : kShippedAddresses) {
            auto s = load_address(std::string("addresses/") + a + ".json");
            for (double t : {1.0, 2.7, 10.0}) {
                auto p = trace_ray(f, cfg, s, t);
                INFO(std::string(mp) << " " << std::string(a) << " t=" << t);
                auto ex = extract_potential_address(f, cfg, p.z, 64);
                CHECK(std::fabs(ex.t - t) < 1e-6 * t);
                CHECK(int(ex.prefix.size()) >= ex.depth);
                for (std::size_t k = 0; k < ex.prefix.size(); ++k) CHECK(ex.prefix[k] == s.entry(k));
            }
        }
    }
}

TEST_CASE("monotonicity") {
    auto e = PolyExpMap(1, {0.0});
    auto ce = make_tract_config(e);
    auto seg = trace_segment(e, ce, Address::constant(0), 1, 5, 16);
    auto r = check_monotone(seg, e, 5);
    CHECK(r.N == 0);
    RaySegment single{{seg.samples[3]}};
    CHECK(check_monotone(single, e, 5).N == 0);

    auto f = load_map("maps/d2_b1_0.1.json");
    auto cf = make_tract_config(f);
    auto mixed = trace_segment(f, cf, Address({}, {1, -1}), 1, 5, 16);
    auto rm = check_monotone(mixed, f, 5);
    CHECK(rm.N <= 3);
    for (int n = rm.N; n <= rm.testable; ++n) CHECK(rm.violations[n] == 0);
}

TEST_CASE("depth stability and injectivity") {
    auto f = load_map("maps/d3_sample.json");
    auto cfg = make_tract_config(f);
    Address s({2}, {0, -1});
    // potentials where one level less still seeds at F(t) >= 1e2 below the cap
    for (double t : {1.6, 1.7, 1.8}) {
        auto p = trace_ray(f, cfg, s, t);
        RayOptions less;
        less.max_depth = p.depth_used - 1;
        auto q = trace_ray(f, cfg, s, t, less);
        CHECK(std::abs(p.z - q.z) < 1e-10);
    }
    // nearby potentials: orbits eventually more than 1 apart
    auto seg = trace_segment(f, cfg, s, 1.0, 1.01, 5);
    for (std::size_t k = 0; k + 1 < seg.samples.size(); ++k) {
        cplx a = seg.samples[k].z, b = seg.samples[k + 1].z;
        bool sep = false;
        for (int n = 0; n < 6 && !sep; ++n) {
            if (std::abs(a - b) > 1) sep = true;
            else if (3 * std::max(a.real(), b.real()) > 700) break;
            else {
                a = f.eval(a);
                b = f.eval(b);
            }
        }
        CHECK(sep);
    }
}
