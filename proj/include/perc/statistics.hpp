#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perc/events.hpp"
#include "perc/rational.hpp"

namespace perc {

// Literature values of the site-percolation critical point, shipped as
// overridable defaults (external inputs, not derived here).
inline constexpr double kSitePcZ2 = 0.592746;
inline constexpr double kSitePcZ3 = 0.311608;

// --- the balance statistic -------------------------------------------------

// closed/(1-p) - open/p over a site set; mean zero on per-site closures.
double occupancy_balance(std::int64_t closed_count, std::int64_t open_count, double p);
Rational occupancy_balance_exact(std::int64_t closed_count, std::int64_t open_count, const Rational& p);

// Balance of an explicit site set under a configuration's statuses.
double occupancy_balance(const std::vector<std::int64_t>& sites, const Configuration& config, double p);

// --- frontier sets (the contact structure behind the counting argument) ----

// Site sets of the inner box, for a configuration on Lambda(n+l):
//   reach_open / reach_closed: sites with an in-box neighbour joined to the
//     internal boundary of Lambda(n+l) by an open path avoiding the site
//     itself, split by the site's own status. Membership never depends on
//     the site's own bit, which is what makes the occupancy identities
//     E|open part| = p * E|both| exact.
//   crossing_closed: closed sites adjacent to a crossing cluster (a cluster
//     meeting both the inner box and the outer internal boundary).
//   shared_closed: closed sites adjacent to >= 2 distinct crossing clusters.
// For l >= 1, reach_open equals the open sites of crossing clusters inside
// the inner box; at l = 0 the two notions differ on the boundary ring.
struct FrontierSets {
    std::vector<std::int64_t> reach_open;        // ascending indices in the config's box
    std::vector<std::int64_t> reach_closed;
    std::vector<std::int64_t> crossing_closed;
    std::vector<std::int64_t> shared_closed;
};
FrontierSets frontier_sets(const Configuration& config, std::int32_t inner_radius, EventWork& work);

// --- Monte Carlo estimates --------------------------------------------------

struct Estimate {
    double p_hat = 0.0;
    std::int64_t hits = 0;
    std::int64_t samples = 0;
    double ci_low = 0.0;   // Wilson 95%
    double ci_high = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t stream_tag = 0;
};

std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t samples);

// Exact (Clopper-Pearson) interval; intended for small counts.
std::pair<double, double> clopper_pearson_interval(std::int64_t hits, std::int64_t samples, double confidence = 0.95);

Estimate make_estimate(std::int64_t hits, std::int64_t samples, std::uint64_t seed, std::uint64_t tag);

// An event together with the geometry it is sampled on.
struct EventSpec {
    enum class Kind : std::uint8_t {
        two_arms_site,      // radius n around site a (default origin)
        two_arms_box,       // inner radius n, annulus width l
        two_arms_pair,      // sites a, b in Lambda(n), annulus width l
        connected,          // a <-> b inside Lambda(n)
        origin_to_boundary, // origin joined to the internal boundary of Lambda(n)
        site_open,          // site a open
        always_true,
        always_false,
    };

    Kind kind = Kind::always_true;
    int dim = 2;
    std::int32_t n = 1;
    std::int32_t l = 0;
    Point a{};
    Point b{};

    BoxSpec sample_box() const;
    bool evaluate(const Configuration& config, EventWork& work) const;
    std::string name() const;
    std::uint64_t stream_tag() const;
};

Estimate estimate_probability(const EventSpec& event, double p, std::int64_t samples, const SeedSpec& seed,
                              int workers);

// --- inequality reports ------------------------------------------------------

enum class Verdict : std::uint8_t { satisfied, violated_within_noise, violated };

std::string to_string(Verdict v);

// satisfied: point estimates obey the inequality, or the intervals are
// disjoint in the right order; violated: intervals disjoint in the wrong
// order; otherwise violated-within-noise.
Verdict verdict_for(double lhs, double lhs_hi, double rhs, double rhs_lo, double lhs_lo, double rhs_hi);

struct InequalityReport {
    std::string name;
    double lhs = 0.0, lhs_lo = 0.0, lhs_hi = 0.0;
    double rhs = 0.0, rhs_lo = 0.0, rhs_hi = 0.0;
    double margin = 0.0;  // rhs - lhs
    Verdict verdict = Verdict::satisfied;
    bool proxy_based = false;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> details;
};

// --- checkers for the proved inequalities ------------------------------------

// P(two-arms(0, 2n+l)) against
//   (2d ln n / sqrt|Lambda(n)|) E(sqrt|crossings|) + explicit remainder.
InequalityReport check_central_inequality(int dim, std::int32_t n, std::int32_t l, double p, std::int64_t samples,
                                          const SeedSpec& seed, int workers);

// Tail table of the balance statistic on the per-site closure of x within
// Lambda(n): empirical P(|balance| >= t, size = k) against
// 2 exp(-2 p^2 (1-p)^2 t^2 / k) per (t, k) cell. The two-sided factor 2 is
// deliberate (the one-sided form is not what the derivation yields).
struct HoeffdingCell {
    double t = 0.0;
    std::int64_t k = 0;
    std::int64_t hits = 0;
    double frequency = 0.0;
    double bound = 0.0;
    double stderr_freq = 0.0;
    bool flagged = false;  // frequency > bound + 4 * stderr
};
struct HoeffdingReport {
    std::vector<HoeffdingCell> cells;
    bool any_flagged = false;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};
HoeffdingReport hoeffding_tail_report(int dim, std::int32_t n, std::int32_t l, double p, const Point& x,
                                      const std::vector<double>& t_grid, std::int64_t samples, const SeedSpec& seed,
                                      int workers);

// Boxes of radius k inside Lambda(n) covering its internal boundary; disjoint
// when (2k+1) divides (2n+1), otherwise the outermost grid row per axis is
// shifted inward and boxes may overlap. |covering| <= 2d (2n/k)^(d-1).
std::vector<BoxSpec> build_covering(int dim, std::int32_t n, std::int32_t k);

// Per-box two-arms classification and the pathwise crossing-count bound
// |crossings(n)| <= good + |inner boundary of Lambda(k)| * bad.
struct GoodBadResult {
    std::int64_t good = 0;
    std::int64_t bad = 0;
    std::int64_t crossing_count = 0;
    bool bound_holds = false;
};
GoodBadResult count_good_bad(const Configuration& config, const std::vector<BoxSpec>& covering, EventWork& work);

// P(two-arms(Lambda(n), a, b, l)) against
//   (3^{4d}/p) (n+k)^{2d} P(two-arms(0, l-k)) / P(a <-> b in Lambda(n+k)).
InequalityReport distant_two_arms_report(int dim, std::int32_t n, const Point& a, const Point& b, std::int32_t l,
                                         std::int32_t k, double p, std::int64_t samples, const SeedSpec& seed,
                                         int workers);

// P(0 <-> internal boundary of Lambda(N)); decreasing upper proxy for the
// percolation probability.
Estimate theta_upper_proxy(int dim, double p, std::int32_t N, std::int64_t samples, const SeedSpec& seed, int workers);

// Boundary site maximizing the estimated P(0 <-> x in Lambda(n)), with the
// per-site estimates (all from shared samples, so max >= mean holds
// pathwise) and the origin-to-boundary estimate from the same samples.
struct BestBoundarySite {
    Point site{};
    Estimate estimate;
    Estimate origin_to_boundary;
    std::vector<std::pair<Point, Estimate>> all;
    bool pigeonhole_holds = false;  // best >= origin_to_boundary / |boundary|
};
BestBoundarySite find_best_boundary_site(int dim, double p, std::int32_t n, std::int64_t samples,
                                         const SeedSpec& seed, int workers);

// P(x <-> y in Lambda(n+l)) >= proxy^2 - P(two-arms(Lambda(n), x, y, l)),
// with the percolation probability replaced by theta_upper_proxy at radius
// proxy_m. The substitution over-estimates the true value, so the verdict is
// labeled proxy-based and is diagnostic only.
InequalityReport clb_report(int dim, double p, std::int32_t n, std::int32_t l, const Point& x, const Point& y,
                            std::int32_t proxy_m, std::int64_t samples, const SeedSpec& seed, int workers);

// --- exponent fitting ---------------------------------------------------------

struct FitResult {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
};

// Least squares of -ln(p_hat) against ln(n); requires >= 3 points with
// positive estimates.
FitResult fit_exponent(const std::vector<std::pair<double, Estimate>>& points);

}  // namespace perc
