#pragma once
#include <random>

#include "rayforge/homotopy.hpp"

// random polyline fixtures: k <= 6 marked points, <= 20 vertices, start at a marked point
struct PolyFixture {
    rayforge::MarkedSet V;
    rayforge::PolylineCurve g;
};

inline PolyFixture random_fixture(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-5, 5);
    std::uniform_int_distribution<int> K(1, 6), N(1, 20);
    int k = K(rng), n = N(rng);
    std::vector<rayforge::cplx> pts;
    for (int i = 0; i < k; ++i) pts.emplace_back(U(rng), U(rng));
    PolyFixture f{rayforge::MarkedSet(pts), {}};
    int s = std::uniform_int_distribution<int>(0, k - 1)(rng);
    f.g.vertices.push_back(pts[s]);
    for (int v = 1; v < n; ++v) f.g.vertices.emplace_back(U(rng), U(rng));
    return f;
}
