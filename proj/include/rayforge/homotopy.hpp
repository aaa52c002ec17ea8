#pragma once
#include <optional>
#include <vector>

#include "rayforge/errors.hpp"

namespace rayforge {

struct Letter {
    int index = 0;
    int sign = 1;
    bool operator==(const Letter& o) const { return index == o.index && sign == o.sign; }
};
using Word = std::vector<Letter>;

Word reduce(const Word& w);
Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
// signed letter count per generator, size k
std::vector<int> abelianize(const Word& w, int k);

struct MarkedSet {
    std::vector<cplx> points;
    MarkedSet() = default;
    explicit MarkedSet(std::vector<cplx> pts);
    int find(cplx z) const;  // exact match, -1 if absent
};

// polyline from vertices[0] (a marked point); the last vertex continues
// horizontally to +inf
struct PolylineCurve {
    std::vector<cplx> vertices;
};

// raw signed crossings of upward cut rays, in order along the curve.
// Right-to-left across the ray over w_i is (i,+), so counter-clockwise loops count positive.
Word crossing_sequence(const MarkedSet& V, const PolylineCurve& g);

// Word of the loop (reference ray)^{-1} . gamma based at +inf; the reference ray is
// the horizontal ray from the start point. Twisting around the start point at the
// very beginning is homotopically trivial and dropped.
Word word_of_curve(const MarkedSet& V, const PolylineCurve& g, std::optional<double> half_plane_r = {});

// loop based at +inf: comes in horizontally to vertices[0], follows the polyline,
// leaves horizontally; vertices[0] need not be marked. word(g1 * g2) = word(g1) loop_word(g2)
// when g2 starts at the last vertex of g1.
Word loop_word(const MarkedSet& V, const PolylineCurve& g);

// winding numbers of gamma closed up by a far vertical segment and the reversed
// reference ray; start point entry is 0
std::vector<int> winding_numbers(const MarkedSet& V, const PolylineCurve& g);

// clearance of the curve to marked points not at its start (for perturbation tests)
double curve_clearance(const MarkedSet& V, const PolylineCurve& g);

// words of spider legs; points[i][j], legs[i][j]; generator of a_kl is l*m + k and
// leg (i,j) is taken relative to the points up to and including a_ij in that order
std::vector<std::vector<Word>> leg_words(const std::vector<std::vector<cplx>>& points,
                                         const std::vector<std::vector<PolylineCurve>>& legs);

double growth_bound(int parent_len, int j, double A = 1.0);
// A^{N+1-j} ((N+1)!/j!)^4 C
double homotopy_budget(int N, int j, double A = 1.0, double C = 1.0);

}  // namespace rayforge
