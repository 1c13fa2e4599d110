#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "perc/config.hpp"
#include "perc/rational.hpp"

namespace perc {

// Exhaustive enumeration over all 2^volume configurations of a small box.
// Integer statistics are bucketed by the configuration's open-site count and
// the rational weight p^open (1-p)^closed is applied once at the end; one
// enumeration pass therefore serves every p exactly.

inline constexpr std::int64_t kOracleDefaultCap = 20;
inline constexpr std::int64_t kOracleHardCap = 25;  // ~33.5M configurations, minutes of runtime

// Thrown when an enumeration would exceed the configured site cap; runners
// map it to a dedicated exit code.
struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnumerationPlan {
    BoxSpec box;
    Rational p = Rational(1, 2);
    std::int64_t cap = kOracleDefaultCap;
    bool allow_large = false;  // permit up to the hard cap

    void validate() const;  // throws on violated caps or p outside (0,1)
};

// Sum of per_class[c] * p^c * (1-p)^(V-c) over c, V = per_class.size() - 1.
Rational weighted_class_sum(const std::vector<std::int64_t>& per_class, const Rational& p);

// Receives every configuration of the box exactly once (Gray-code order
// within each worker's contiguous index range). flipped_site is the site
// whose status changed since the previous call, -1 for a range's first
// configuration.
class ConfigVisitor {
public:
    virtual ~ConfigVisitor() = default;
    virtual void visit(const Configuration& config, std::int64_t open_count, std::int64_t flipped_site) = 0;
};

// Runs one visitor per worker over a partition of the index space and
// returns them in shard order for exact (integer) reduction.
std::vector<std::unique_ptr<ConfigVisitor>> enumerate_configurations(
    const BoxSpec& box, int workers, const std::function<std::unique_ptr<ConfigVisitor>(int)>& make_visitor);

Rational exact_probability(const EnumerationPlan& plan, const std::function<bool(const Configuration&)>& predicate,
                           int workers = 1);

Rational exact_expectation(const EnumerationPlan& plan,
                           const std::function<std::int64_t(const Configuration&)>& statistic, int workers = 1);

// One full pass over Lambda(n+l) collecting every integer statistic needed by
// the exact identity and tail checks:
//  - sizes of the frontier sets (for E|open part| = p E|both| and its twin)
//  - the joint counts of (closure size k, open part) of the origin's
//    per-site closure within Lambda(n) (for the mean-zero balance identity,
//    the exact tail table and the growth-law comparison)
//  - the two-arms event at the origin at radius n+l
struct IdentityScan {
    int dim = 2;
    std::int32_t n = 1;
    std::int32_t l = 0;
    std::int64_t volume = 0;
    std::int64_t inner_volume = 0;
    std::vector<std::int64_t> reach_open_sum;    // per open-count class
    std::vector<std::int64_t> reach_closed_sum;
    std::vector<std::int64_t> both_sum;
    std::vector<std::int64_t> two_arms_true;
    std::vector<std::int64_t> joint;             // [k][opens][class], flattened

    std::int64_t joint_at(std::int64_t k, std::int64_t opens, std::int64_t cls) const;

    Rational expected_reach_open(const Rational& p) const;
    Rational expected_reach_closed(const Rational& p) const;
    Rational expected_both(const Rational& p) const;
    Rational expected_balance(const Rational& p) const;     // exactly 0
    Rational two_arms_probability(const Rational& p) const; // P(two-arms(0, n+l))
    Rational closure_law(const Rational& p, std::int64_t k, std::int64_t opens) const;
    // P(|balance| >= t, closure size = k)
    Rational tail_probability(const Rational& p, const Rational& t, std::int64_t k) const;
};

IdentityScan identity_scan(int dim, std::int32_t n, std::int32_t l, int workers, bool allow_large = false);

// Optional labeling maintenance across Gray-code steps: when a site opens it
// is unioned with its open neighbours; when one closes the structure is
// rebuilt. Kept behind a flag (exact_two_arms_probability) with equivalence
// tests; the correctness-first default recomputes per configuration.
class IncrementalLabeling {
public:
    void reset(const Configuration& config);
    void apply_flip(const Configuration& config, std::int64_t flipped_site);
    std::int64_t label_of(std::int64_t site) const;  // canonical min-site label, -1 closed

private:
    void rebuild(const Configuration& config);
    std::int64_t find(std::int64_t i) const;
    const BoxSpec* box_ = nullptr;
    std::vector<std::int32_t> parent_;  // -1 for closed sites
    mutable std::vector<std::int32_t> scratch_;
};

// P(two-arms(0, radius)) by exhaustive enumeration of Lambda(radius); the
// incremental flag selects the labeling maintenance strategy.
Rational exact_two_arms_probability(int dim, std::int32_t radius, const Rational& p, int workers,
                                    bool incremental = false, bool allow_large = false);

// Exact law of (closure size, open part) produced by the growth algorithm
// driven by i.i.d. bits, obtained by enumerating every annulus configuration
// and branching the growth on both outcomes of each consumed bit. Counts are
// indexed by (k, opens, open sites of the annulus configuration).
struct ExplorationLaw {
    std::int64_t inner_volume = 0;
    std::int64_t annulus_size = 0;
    std::vector<std::int64_t> counts;  // [k][opens][annulus open count]

    std::int64_t at(std::int64_t k, std::int64_t opens, std::int64_t annulus_open) const;
    Rational law(const Rational& p, std::int64_t k, std::int64_t opens) const;
};

ExplorationLaw exploration_law_scan(int dim, std::int32_t n, std::int32_t l, const Point& x, int workers);

// Golden exact values: versioned CSV of (key, exact fraction) regression
// fixtures.
struct GoldenEntry {
    std::string key;
    Rational value;
};
std::vector<GoldenEntry> load_golden_csv(const std::string& path);
void save_golden_csv(const std::string& path, const std::vector<GoldenEntry>& entries);
const Rational* find_golden(const std::vector<GoldenEntry>& entries, const std::string& key);

}  // namespace perc
