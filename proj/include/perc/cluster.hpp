#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perc/config.hpp"
#include "perc/lattice.hpp"

namespace perc {

// Connected components of the open sites of one configuration under
// nearest-neighbour adjacency inside the box. The canonical label of a
// cluster is the smallest site index it contains, so labelings are
// reproducible regardless of union order.
//
// A labeling may be reused across configurations of equal volume via
// assign(); internal buffers are recycled.
class ClusterLabeling {
public:
    ClusterLabeling() = default;
    explicit ClusterLabeling(const Configuration& config) { assign(config); }

    void assign(const Configuration& config);

    const Configuration& config() const { return *config_; }
    std::int64_t volume() const { return volume_; }
    std::int64_t cluster_count() const { return cluster_count_; }

    bool open(std::int64_t index) const { return label_[static_cast<std::size_t>(index)] >= 0; }

    // Smallest site index of the cluster containing the site; -1 if closed.
    std::int64_t label_of(std::int64_t index) const { return label_[static_cast<std::size_t>(index)]; }
    std::int64_t label_of(const Point& p) const { return label_of(config_->box().index_of(p)); }

    // All distinct cluster labels, ascending.
    std::vector<std::int64_t> labels() const;

    // Sites of the cluster with the given label, ascending (materialized on
    // demand; the labeling itself stays linear in the volume).
    std::vector<std::int64_t> cluster_site_indices(std::int64_t label) const;

private:
    const Configuration* config_ = nullptr;
    std::int64_t volume_ = 0;
    std::int64_t cluster_count_ = 0;
    std::vector<std::int32_t> label_;   // canonical label per site, -1 closed
    std::vector<std::int32_t> uf_;      // scratch: union-find parents / sizes
};

// C(x): open cluster of x as lattice points; empty when x is closed.
// Throws when x is outside the box.
std::vector<Point> cluster_of(const ClusterLabeling& labeling, const Point& x);

// Closure and second shell of a cluster, in the ambient lattice:
//   closure = C together with every ambient site adjacent to C,
//   fringe  = sites beyond the closure adjacent to the closure's shell.
// Both may contain points outside the configuration's box; intersect with a
// box of interest as needed.
struct ClosureAndFringe {
    std::vector<Point> closure;
    std::vector<Point> fringe;
};
ClosureAndFringe closure_and_fringe(const ClusterLabeling& labeling, std::int64_t label);

std::vector<Point> intersect_with_box(const std::vector<Point>& sites, const BoxSpec& box);

// The per-site closure used by the growth statistics: {x} plus C(x) plus the
// closed sites adjacent to C(x), intersected with inner_box. For a closed x
// this is {x} (a closed site contributes exactly one visited closed site,
// matching the growth algorithm's output and making the balance statistic
// mean-zero).
struct SiteClosure {
    std::vector<std::int64_t> sites;  // ascending indices in the configuration's box
    std::int64_t open_count = 0;
    std::int64_t closed_count = 0;

    std::int64_t size() const { return open_count + closed_count; }
};
SiteClosure site_closure_in(const ClusterLabeling& labeling, const Point& x, const BoxSpec& inner_box);

// Clusters of the configuration joining the concentric inner box of the
// given radius to the internal boundary of the configuration's box.
struct CrossingClusters {
    std::int32_t inner_radius = 0;
    std::int32_t annulus_width = 0;
    std::vector<std::int64_t> labels;  // ascending canonical labels

    std::int64_t count() const { return static_cast<std::int64_t>(labels.size()); }
    bool contains(std::int64_t label) const;
};
CrossingClusters crossing_clusters(const ClusterLabeling& labeling, std::int32_t inner_radius);

// Number of crossing-cluster closures each site belongs to; bounded by 2*dim.
// A closed site counts the distinct crossing clusters adjacent to it, an open
// site counts one when its own cluster crosses.
std::vector<std::int32_t> closure_membership_counts(const ClusterLabeling& labeling,
                                                    const CrossingClusters& crossing);

// d=2 debugging aid: letters for clusters (by label order, cycling), '.' for
// closed sites; rows from highest y to lowest.
std::string ascii_cluster_map(const ClusterLabeling& labeling);

}  // namespace perc
