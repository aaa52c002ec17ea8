#pragma once
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rayforge/errors.hpp"

namespace rayforge {

constexpr double kDefaultCap = 1e300;

// eventually periodic integer sequence: pre, then period repeated forever
struct Address {
    std::vector<long> pre;
    std::vector<long> period{0};

    Address() = default;
    Address(std::vector<long> preperiod, std::vector<long> per);
    static Address constant(long s) { return Address({}, {s}); }

    long entry(std::size_t n) const;
    Address shift() const;
    Address shift(std::size_t k) const;
    long max_abs() const;
    std::vector<long> prefix(std::size_t n) const;

    bool operator==(const Address& o) const { return pre == o.pre && period == o.period; }
};

// same infinite sequence (representations may differ)
bool same_sequence(const Address& a, const Address& b);
// sigma^k a == sigma^l b for some k, l >= 0
bool overlapping(const Address& a, const Address& b);

double eval_F(int d, double t);
double eval_F_inverse(int d, double y);
// F^{-n}; y may be +inf only if n==0
double eval_F_inverse_iter(int d, double y, int n);

struct FIterate {
    double value = 0;        // valid when !overflow
    bool overflow = false;
    int overflow_at = -1;    // first index k with F^k(t) > cap
};

FIterate iterate_F(int d, double t, int n, double cap = kDefaultCap);

// u_0..u_n with +inf once the cap is exceeded
std::vector<double> potential_chain(int d, double t, int n, double cap = kDefaultCap);

// bounded addresses only, so always 0
double t_s_estimate(const Address& s, int d);

struct Orbit {
    double T = 1;
    Address s;
};

struct LadderOptions {
    double cap = kDefaultCap;
    int sample_depth = -1;  // default J+2
    double rel_tol = 1e-12;
};

struct PotentialLadder {
    std::vector<double> potentials;  // strictly increasing
    std::vector<double> midpoints;
    double t_prime = 0;
    int period = 0;       // number of distinct grand orbits of potentials
    bool truncated = false;

    // largest ladder potential strictly below rho (t_n in the M_rho bound)
    std::optional<double> below(double rho) const;
    // smallest midpoint strictly above t_prime
    std::optional<double> default_rho() const;
};

bool potentials_equal(double a, double b, double rel_tol = 1e-12);

PotentialLadder build_ladder(const std::vector<Orbit>& orbits, int d, int J,
                             const LadderOptions& opt = {});

// the three t' sampling checks for a candidate threshold; exposed for diagnostics
struct LadderChecks {
    bool gaps = true, moduli = true, disks = true;
    bool all() const { return gaps && moduli && disks; }
};
LadderChecks ladder_checks(const std::vector<Orbit>& orbits, int d, const PotentialLadder& lad,
                           double candidate, int sample_depth, double cap = kDefaultCap);

struct ClusterReport {
    std::vector<std::vector<std::pair<int, int>>> clusters;  // each sorted, (orbit, j)
    int nontrivial_count = 0;
    bool infinite = false;
    std::vector<std::pair<int, int>> infinite_pairs;  // orbit pairs causing it
};

// potentials of (i,j) and (k,l) coincide, decided without forming huge iterates
bool grid_potentials_equal(int d, double Ti, int j, double Tk, int l, double cap = kDefaultCap,
                           double rel_tol = 1e-12);

ClusterReport detect_clusters(const std::vector<Orbit>& orbits, int d, int J,
                              double cap = kDefaultCap);

}  // namespace rayforge
