#include "rayforge/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rayforge {

Word reduce(const Word& w) {
    Word out;
    for (const auto& l : w) {
        if (!out.empty() && out.back().index == l.index && out.back().sign == -l.sign) out.pop_back();
        else out.push_back(l);
    }
    return out;
}

Word inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (auto& l : out) l.sign = -l.sign;
    return out;
}

Word concat(const Word& a, const Word& b) {
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::vector<int> abelianize(const Word& w, int k) {
    std::vector<int> v(k, 0);
    for (const auto& l : w)
        if (l.index >= 0 && l.index < k) v[l.index] += l.sign;
    return v;
}

MarkedSet::MarkedSet(std::vector<cplx> pts) : points(std::move(pts)) {
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j]) throw DomainError("marked points must be distinct");
}

int MarkedSet::find(cplx z) const {
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i] == z) return static_cast<int>(i);
    return -1;
}

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool on_segment(cplx p, cplx q, cplx w) {
    if (cross(q - p, w - p) != 0) return false;
    return std::min(p.real(), q.real()) <= w.real() && w.real() <= std::max(p.real(), q.real()) &&
           std::min(p.imag(), q.imag()) <= w.imag() && w.imag() <= std::max(p.imag(), q.imag());
}

struct Hit {
    double s;
    Letter l;
};

// crossings of the segment p->q with all cut rays, sorted along the segment
void segment_hits(const MarkedSet& V, cplx p, cplx q, int skip_at_p, Word& out) {
    std::vector<Hit> hits;
    for (int i = 0; i < static_cast<int>(V.points.size()); ++i) {
        cplx w = V.points[i];
        if (i == skip_at_p) {
            // only the starting vertex may touch its own point
            if (on_segment(p, q, w) && q == w) throw DegenerateInput("curve returns to its start point");
        } else if (on_segment(p, q, w)) {
            throw DegenerateInput("curve passes through a marked point");
        }
        if (i != skip_at_p && q.real() == w.real() && q.imag() > w.imag())
            throw DegenerateInput("vertex lies on a cut ray");
        bool pl = p.real() < w.real(), ql = q.real() < w.real();
        if (pl == ql) continue;
        double s = (w.real() - p.real()) / (q.real() - p.real());
        double y = p.imag() + s * (q.imag() - p.imag());
        if (!(y > w.imag())) continue;
        hits.push_back({s, {i, pl ? -1 : +1}});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.s < b.s; });
    for (const auto& h : hits) out.push_back(h.l);
}

// horizontal ray from p to +inf
void ray_hits(const MarkedSet& V, cplx p, int skip, Word& out) {
    std::vector<Hit> hits;
    for (int i = 0; i < static_cast<int>(V.points.size()); ++i) {
        if (i == skip) continue;
        cplx w = V.points[i];
        if (w.imag() == p.imag() && w.real() >= p.real()) throw DegenerateInput("exit ray passes through a marked point");
        if (w.real() > p.real() && w.imag() < p.imag()) hits.push_back({w.real(), {i, -1}});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.s < b.s; });
    for (const auto& h : hits) out.push_back(h.l);
}

int quadrant(cplx v) {
    double x = v.real(), y = v.imag();
    if (x > 0 && y >= 0) return 0;
    if (x <= 0 && y > 0) return 1;
    if (x < 0 && y <= 0) return 2;
    return 3;
}

int start_index(const MarkedSet& V, const PolylineCurve& g) {
    if (g.vertices.empty()) throw DomainError("curve needs at least one vertex");
    int s = V.find(g.vertices.front());
    if (s < 0) throw DomainError("curve must start at a marked point");
    return s;
}

}  // namespace

Word crossing_sequence(const MarkedSet& V, const PolylineCurve& g) {
    int s = start_index(V, g);
    Word out;
    const auto& v = g.vertices;
    for (int i = 0; i < static_cast<int>(V.points.size()); ++i) {
        cplx w = V.points[i];
        if (i != s && v[0].real() == w.real() && v[0].imag() > w.imag())
            throw DegenerateInput("start point lies on a cut ray");
    }
    for (std::size_t k = 0; k + 1 < v.size(); ++k) segment_hits(V, v[k], v[k + 1], k == 0 ? s : -1, out);
    ray_hits(V, v.back(), v.size() == 1 ? s : -1, out);
    return out;
}

Word word_of_curve(const MarkedSet& V, const PolylineCurve& g, std::optional<double> half_plane_r) {
    int s = start_index(V, g);
    if (half_plane_r) {
        for (auto z : V.points)
            if (!(z.real() > *half_plane_r)) throw DomainError("marked point outside the half plane");
        for (auto z : g.vertices)
            if (!(z.real() > *half_plane_r)) throw DomainError("curve vertex outside the half plane");
    }
    Word gam = reduce(crossing_sequence(V, g));
    std::size_t lead = 0;
    while (lead < gam.size() && gam[lead].index == s) ++lead;
    gam.erase(gam.begin(), gam.begin() + lead);
    Word ref;
    ray_hits(V, V.points[s], s, ref);
    return reduce(concat(inverse(ref), gam));
}

Word loop_word(const MarkedSet& V, const PolylineCurve& g) {
    if (g.vertices.empty()) throw DomainError("curve needs at least one vertex");
    const auto& v = g.vertices;
    if (V.find(v[0]) >= 0) throw DegenerateInput("loop vertex sits on a marked point");
    for (auto w : V.points)
        if (v[0].real() == w.real() && v[0].imag() > w.imag()) throw DegenerateInput("vertex lies on a cut ray");
    Word in;
    ray_hits(V, v[0], -1, in);
    Word out = inverse(in);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) segment_hits(V, v[k], v[k + 1], -1, out);
    ray_hits(V, v.back(), -1, out);
    return reduce(out);
}

std::vector<int> winding_numbers(const MarkedSet& V, const PolylineCurve& g) {
    int s = start_index(V, g);
    std::vector<cplx> loop = g.vertices;
    double xmax = 0;
    bool first = true;
    for (auto z : V.points) xmax = first ? (first = false, z.real()) : std::max(xmax, z.real());
    for (auto z : g.vertices) xmax = std::max(xmax, z.real());
    double X = xmax + 1;
    loop.push_back(cplx(X, g.vertices.back().imag()));
    loop.push_back(cplx(X, V.points[s].imag()));
    loop.push_back(V.points[s]);  // closes back along the reference ray
    std::vector<int> wn(V.points.size(), 0);
    for (int i = 0; i < static_cast<int>(V.points.size()); ++i) {
        if (i == s) continue;
        cplx w = V.points[i];
        int acc = 0;
        for (std::size_t k = 0; k + 1 < loop.size(); ++k) {
            cplx a = loop[k] - w, b = loop[k + 1] - w;
            if (on_segment(loop[k], loop[k + 1], w)) throw DegenerateInput("closed curve passes through a marked point");
            int dq = (quadrant(b) - quadrant(a) + 4) % 4;
            if (dq == 3) acc -= 1;
            else if (dq == 1) acc += 1;
            else if (dq == 2) acc += cross(a, b) > 0 ? 2 : -2;
        }
        wn[i] = acc / 4;
    }
    return wn;
}

double curve_clearance(const MarkedSet& V, const PolylineCurve& g) {
    int s = start_index(V, g);
    double best = INFINITY;
    auto seg_dist = [](cplx p, cplx q, cplx w) {
        cplx d = q - p;
        double L2 = std::norm(d);
        double t = L2 > 0 ? std::clamp(((w - p) * std::conj(d)).real() / L2, 0.0, 1.0) : 0.0;
        return std::abs(p + t * d - w);
    };
    const auto& v = g.vertices;
    for (int i = 0; i < static_cast<int>(V.points.size()); ++i) {
        cplx w = V.points[i];
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            if (i == s && k == 0) continue;
            best = std::min(best, seg_dist(v[k], v[k + 1], w));
        }
        if (i != s || v.size() > 1) {
            // exit ray
            cplx e = v.back();
            double dd = w.real() >= e.real() ? std::fabs(w.imag() - e.imag()) : std::abs(w - e);
            best = std::min(best, dd);
        }
        // vertices near cut rays
        for (std::size_t k = (i == s ? 1 : 0); k < v.size(); ++k)
            if (v[k].imag() > w.imag()) best = std::min(best, std::fabs(v[k].real() - w.real()));
    }
    return best;
}

std::vector<std::vector<Word>> leg_words(const std::vector<std::vector<cplx>>& points,
                                         const std::vector<std::vector<PolylineCurve>>& legs) {
    const int m = static_cast<int>(points.size());
    if (static_cast<int>(legs.size()) != m) throw DomainError("legs and points disagree in shape");
    int J = m ? static_cast<int>(points[0].size()) - 1 : -1;
    std::vector<cplx> order;
    for (int j = 0; j <= J; ++j)
        for (int i = 0; i < m; ++i) order.push_back(points[i].at(j));
    std::vector<std::vector<Word>> out(m, std::vector<Word>(J + 1));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= J; ++j) {
            int g = j * m + i;
            MarkedSet V(std::vector<cplx>(order.begin(), order.begin() + g + 1));
            out[i][j] = word_of_curve(V, legs[i].at(j));
        }
    }
    return out;
}

double growth_bound(int parent_len, int j, double A) {
    return A * std::pow(double(j + 1), 4) * std::max(1, parent_len);
}

double homotopy_budget(int N, int j, double A, double C) {
    double ratio = 1;  // (N+1)!/j!
    for (int k = j + 1; k <= N + 1; ++k) ratio *= k;
    return std::pow(A, N + 1 - j) * std::pow(ratio, 4) * C;
}

}  // namespace rayforge
