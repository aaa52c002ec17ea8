#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "common.hpp"
#include "rayforge/tracts.hpp"

using namespace rayforge;

namespace {
std::mt19937_64 gen(99);
double U(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
}  // namespace

TEST_CASE("tract config: pure exponentials") {
    for (int d : {1, 2}) {
        auto f = PolyExpMap::pure(d);
        auto c = make_tract_config(f);
        CHECK(c.certified);
        CHECK(c.eps == doctest::Approx(M_PI / (4 * d)));
        CHECK(c.r == 2.0);
        // the inner strip really lies in f^{-1}(H_r) and the outer edges do not
        for (long n = -2; n <= 2; ++n) {
            double cen = c.strip_center(n), in = M_PI / (2 * d) - c.eps, out = M_PI / (2 * d) + c.eps;
            CHECK(cen == doctest::Approx(2 * M_PI * n / d));
            for (int k = 0; k < 200; ++k) {
                double x = c.t_star_lower + 30.0 * k / 199;
                double y = cen - in + 2 * in * U(0, 1);
                CHECK(f.eval(cplx(x, y)).real() > c.r);
                CHECK(f.eval(cplx(x, cen + out)).real() <= c.r);
                CHECK(f.eval(cplx(x, cen - out)).real() <= c.r);
            }
        }
    }
}

TEST_CASE("tract config: d=2, b1=2, b0=1") {
    auto f = load_map("maps/d2_b1_2_b0_1.json");
    auto c = make_tract_config(f);
    CHECK(c.certified);
    CHECK(c.t_star_upper <= c.t_star_lower);
    CHECK(c.r >= 2 * singular_values(f).max_abs() + 2);
    MESSAGE("t* = " << c.t_star_upper << ", t_* = " << c.t_star_lower << ", r = " << c.r);
    // boundary oracle, independent of the certifier's own sampling
    for (long n = 0; n < 2; ++n) {
        double cen = c.strip_center(n);
        for (int k = 0; k < 500; ++k) {
            double x = c.t_star_lower + U(0, 15);
            double y = cen + U(-1, 1) * (M_PI / 4 - c.eps);
            CHECK(f.eval(cplx(x, y)).real() > c.r);
            double xo = c.t_star_upper + U(0, 15);
            CHECK(f.eval(cplx(xo, cen + M_PI / 4 + c.eps)).real() <= c.r);
            CHECK(f.eval(cplx(U(-5, c.t_star_upper), U(-M_PI, M_PI))).real() <= c.r);
        }
    }
}

TEST_CASE("tract_index") {
    CHECK(tract_index(cplx(100, 0), 1, default_eps(1)) == 0);
    CHECK(tract_index(cplx(50, 2 * M_PI * 3 / 2), 2, default_eps(2)) == 3);
    CHECK(tract_index(cplx(50, M_PI / 2), 1, default_eps(1)) == 0);
    CHECK(tract_index(cplx(50, -2 * M_PI * 5), 1, default_eps(1)) == -5);
    // with eps < pi/2d the widened strips leave a gap; points there are ambiguous
    CHECK_THROWS_AS(tract_index(cplx(50, M_PI), 1, 0.1), AmbiguousTract);
    try {
        tract_index(cplx(50, M_PI), 1, 0.1);
    } catch (const AmbiguousTract& e) {
        CHECK(e.lo == 0);
        CHECK(e.hi == 1);
    }
}

TEST_CASE("inverse branches") {
    auto e = PolyExpMap(1, {0.0});
    auto ce = make_tract_config(e);
    CHECK(std::abs(inverse_branch(e, ce, 0, std::exp(3.0)) - 3.0) < 1e-14);
    CHECK(std::abs(inverse_branch(e, ce, 2, std::exp(3.0)) - cplx(3, 4 * M_PI)) < 1e-13);
    auto q = PolyExpMap::pure(2);
    auto cq = make_tract_config(q);
    cplx z = inverse_branch(q, cq, 0, std::exp(4.0));
    CHECK(std::abs(z - 2.0) < 1e-14);
    CHECK(std::abs(q.eval(z) - std::exp(4.0)) < 1e-10 * std::exp(4.0));
    CHECK_THROWS_AS(inverse_branch(e, ce, 0, cplx(1, 0)), DomainError);

    double r = contraction_check(e, ce, std::exp(10.0), std::exp(10.0) + 1, 0);
    CHECK(r == doctest::Approx(4.539992976248485e-5).epsilon(1e-4));
    CHECK(contraction_check(e, ce, cplx(20, 1), cplx(20, 1), 0) == 0.0);
}

TEST_CASE("round trip, residual, contraction on random d=2 maps") {
    for (int trial = 0; trial < 20; ++trial) {
        PolyExpMap f(2, {cplx(U(-3, 3), U(-3, 3)), cplx(U(-3, 3), U(-3, 3))});
        auto cfg = make_tract_config(f);
        for (int k = 0; k < 50; ++k) {
            long n = long(U(-10, 10.999));
            cplx w(cfg.r + U(1, 50), U(-100, 100));
            cplx z = inverse_branch(f, cfg, n, w);
            CHECK(tract_index(z, cfg) == n);
            CHECK(std::abs(f.eval(z) - w) <= 1e-9 * std::abs(w));
            cplx w2(cfg.r + U(1, 50), U(-100, 100));
            CHECK(contraction_check(f, cfg, w, w2, n) < 0.5);
        }
    }
}

TEST_CASE("separation in one tract") {
    int tested = 0;
    for (int trial = 0; trial < 10; ++trial) {
        PolyExpMap f(2, {cplx(U(-2, 2), U(-2, 2)), cplx(U(-2, 2), U(-2, 2))});
        auto cfg = make_tract_config(f);
        for (int k = 0; k < 200; ++k) {
            long n = long(U(-3, 3.999));
            // spread the moduli over many scales so the preimages are far apart
            double x1 = std::exp(U(-0.5, 18)), x2 = std::exp(U(-0.5, 18));
            cplx w1(cfg.r + x1, U(-2, 2) * x1), w2(cfg.r + x2, U(-2, 2) * x2);
            cplx z1 = inverse_branch(f, cfg, n, w1), z2 = inverse_branch(f, cfg, n, w2);
            double dz = std::abs(z1 - z2);
            if (dz < 2) continue;
            ++tested;
            double rhs = std::exp(dz / (8 * M_PI)) * (std::min(w1.real(), w2.real()) - cfg.r);
            CHECK(std::abs(w1 - w2) >= rhs);
        }
    }
    CHECK(tested > 100);
}

TEST_CASE("offset step agrees with the root solver") {
    PolyExpMap f(2, {cplx(0.5, -1), cplx(1.5, 0.3)});
    for (double u : {9.0, 12.0, 20.0}) {
        for (long s : {-1L, 0L, 1L, 3L}) {
            double un = std::expm1(2 * u);
            cplx dn(0.01, -0.02);
            cplx got = pull_offset(f, s, u, un, 1, dn);
            cplx w = cplx(un, M_PI) + dn;
            cplx z = branch_preimage(f, s, w);
            cplx ref = z - cplx(u, M_PI * s);
            CHECK(std::abs(got - ref) <= 1e-12 * std::max(1.0, std::abs(z)));
            CHECK(std::abs(f.eval(cplx(u, M_PI * s) + got) - w) <= 1e-9 * std::abs(w));
        }
    }
    // past the representable range only the offset form exists
    CHECK(pull_offset(f, 0, INFINITY, INFINITY, 0, 0.0) == 0.0);
    cplx far = pull_offset(f, 0, 400, INFINITY, 0, 0.0);
    CHECK(std::abs(far) < 1e-170);
    CHECK(std::abs(clog1p(cplx(1e-20, 2e-20)) - cplx(1e-20, 2e-20)) < 1e-35);
}
