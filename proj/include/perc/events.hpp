#pragma once

#include <cstdint>
#include <vector>

#include "perc/cluster.hpp"
#include "perc/config.hpp"

namespace perc {

// Reusable workspace for event evaluation. The boundary index cache is keyed
// on the box, so evaluating many samples on one geometry touches only the
// boundary sites after the first call.
struct EventWork {
    ClusterLabeling labeling;
    std::vector<std::int64_t> boundary_idx;
    std::vector<std::int64_t> scratch_labels;

    const std::vector<std::int64_t>& boundary_of(const BoxSpec& box);

private:
    bool has_box_ = false;
    BoxSpec cached_box_ = BoxSpec::lambda(2, 0);
};

// Two-arms event at a site: in the configuration restricted to x + Lambda(n),
// two distinct open clusters contain a neighbour of x and both meet the
// internal boundary of the box. The status of x is never tested directly;
// when x is open its neighbours share a cluster, so the event forces x
// closed whenever it occurs.
bool two_arms_site(const Configuration& config, const Point& x, std::int32_t radius, EventWork& work);

// Two-arms event for the pair (a, b) inside the concentric inner box of
// radius inner_radius: C(a) and C(b) are nonempty, disjoint, and both meet
// the internal boundary of the configuration's box.
bool two_arms_pair(const Configuration& config, std::int32_t inner_radius, const Point& a, const Point& b,
                   EventWork& work);

// Two-arms event for a box: at least two distinct clusters join the
// concentric inner box to the internal boundary of the configuration's box.
bool two_arms_box(const Configuration& config, std::int32_t inner_radius, EventWork& work);

// Open connection between x and y inside the box; a single open site is
// connected to itself.
bool connected_in_box(const Configuration& config, const Point& x, const Point& y, EventWork& work);

// The balance event: every crossing cluster C of the configuration satisfies
// |balance(closure(C) ∩ inner box)| < ln(n) * |closure(C) ∩ inner box|^(1/2),
// where balance weights closed sites by 1/(1-p) and open sites by -1/p.
// Vacuously true when no cluster crosses. Requires inner_radius >= 2.
bool all_closures_balanced(const Configuration& config, std::int32_t inner_radius, double p, EventWork& work);

}  // namespace perc
