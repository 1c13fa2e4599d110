#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "perc/config.hpp"
#include "perc/lattice.hpp"
#include "perc/rng.hpp"

namespace perc {

// Supplies the Bernoulli outcome for each interior site the growth algorithm
// decides to explore. Sources are bounded; drawing past the interior volume
// indicates a logic error in the caller and throws.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual bool next(std::int64_t parent_site_index) = 0;
};

// An i.i.d. Bernoulli(p) stream, independent of which site is being decided.
class StreamBitSource : public BitSource {
public:
    StreamBitSource(std::uint64_t key, double p, std::int64_t capacity);
    bool next(std::int64_t) override;
    std::int64_t consumed() const { return consumed_; }

private:
    std::uint64_t key_;
    std::uint64_t threshold_;
    std::int64_t capacity_;
    std::int64_t consumed_ = 0;
};

// Replays the statuses of a concrete configuration (the equivalence oracle:
// feeding the true interior statuses must reproduce the cluster engine).
class ReplayBitSource : public BitSource {
public:
    ReplayBitSource(const Configuration& config, std::int64_t capacity);
    bool next(std::int64_t parent_site_index) override;

private:
    const Configuration* config_;
    std::int64_t capacity_;
    std::int64_t consumed_ = 0;
};

// A fixed outcome sequence for hand-written tests.
class FixedBitSource : public BitSource {
public:
    explicit FixedBitSource(std::vector<bool> bits) : bits_(std::move(bits)) {}
    bool next(std::int64_t) override;

private:
    std::vector<bool> bits_;
    std::size_t pos_ = 0;
};

// Open components of the annulus configuration together with their interior
// fringes, so each "connected through the annulus" query during growth is a
// table lookup.
class AnnulusGraph {
public:
    AnnulusGraph(const PartialConfiguration& annulus, std::int32_t n, std::int32_t l);

    const BoxSpec& parent_box() const { return parent_; }
    const BoxSpec& inner_box() const { return inner_; }

    // Interior sites reachable from an annulus site through open annulus
    // paths (empty when the site is closed in the annulus configuration).
    const std::vector<std::int64_t>& interior_fringe_of(std::int64_t annulus_site_index) const;

    // Distinct open annulus components adjacent to an interior site.
    const std::vector<std::int64_t>& components_adjacent_to(std::int64_t interior_site_index) const;
    const std::vector<std::int64_t>& fringe_of_component(std::int64_t component_root) const;

private:
    BoxSpec parent_;
    BoxSpec inner_;
    std::vector<std::int32_t> component_;                    // root per site, -1 for non-annulus/closed
    std::vector<std::vector<std::int64_t>> fringe_;          // by component slot
    std::vector<std::int32_t> fringe_slot_;                  // root -> slot
    std::vector<std::vector<std::int64_t>> adjacent_;        // by interior site
    std::vector<std::int64_t> empty_;
};

// View of the algorithm state offered to the step hook (after each consumed
// Bernoulli variable). The three site sets stay pairwise disjoint and
// opened+closed grows by one site per step.
struct ExplorationStateView {
    const std::deque<std::int64_t>& active;
    const std::vector<std::int64_t>& opened;
    const std::vector<std::int64_t>& closed_visited;
    std::int64_t step;
};

struct ExplorationResult {
    std::vector<std::int64_t> sites;  // closure of x within the inner box, ascending parent indices
    std::int64_t explored = 0;        // number of consumed Bernoulli variables
    std::int64_t opens = 0;           // number of explored sites found open
};

// Sites of the inner box where the growth starts:
//   x in the inner box      -> {x}
//   x in the annulus, open  -> interior fringe of x's annulus component
//   x in the annulus, closed-> empty
// The annulus configuration must cover exactly Lambda(n+l) \ Lambda(n).
std::vector<Point> initial_active_set(const PartialConfiguration& annulus, const Point& x, std::int32_t n,
                                      std::int32_t l);

// The growth iteration as a copyable value, one revealed site per step, so
// callers can either drive it from a bit source (explore) or branch on both
// outcomes to enumerate the exact distribution of the result.
class GrowthProcess {
public:
    GrowthProcess(const AnnulusGraph& graph, const PartialConfiguration& annulus, const Point& x);

    bool done() const { return active_.empty(); }
    std::int64_t next_site() const;  // site whose status the next reveal decides
    void reveal(bool open);

    std::int64_t explored() const { return explored_; }
    std::int64_t opens() const { return static_cast<std::int64_t>(opened_.size()); }
    const std::deque<std::int64_t>& active() const { return active_; }
    const std::vector<std::int64_t>& opened() const { return opened_; }
    const std::vector<std::int64_t>& closed_visited() const { return closed_; }

    ExplorationResult result() const;

private:
    const AnnulusGraph* graph_;
    std::deque<std::int64_t> active_;
    std::vector<std::uint8_t> state_;
    std::vector<std::int64_t> opened_, closed_;
    std::int64_t explored_ = 0;
};

// Growth of the closure of x inside Lambda(n), conditioned on the annulus
// configuration. Active sites are consumed first-in-first-out; ties on
// insertion are broken by ascending site index. On termination the visited
// set equals the closure of x intersected with Lambda(n), and
// balance = (p*explored - opens)/(p(1-p)) holds for every replay.
ExplorationResult explore(const PartialConfiguration& annulus, BitSource& bits, const Point& x, std::int32_t n,
                          std::int32_t l,
                          const std::function<void(const ExplorationStateView&)>& on_step = {});

}  // namespace perc
