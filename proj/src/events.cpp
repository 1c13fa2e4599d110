#include "perc/events.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perc {

const std::vector<std::int64_t>& EventWork::boundary_of(const BoxSpec& box) {
    if (!has_box_ || !(cached_box_ == box)) {
        boundary_idx.clear();
        for (SiteCursor it(box); it.valid(); it.advance()) {
            if (box.on_internal_boundary(it.point())) boundary_idx.push_back(it.index());
        }
        cached_box_ = box;
        has_box_ = true;
    }
    return boundary_idx;
}

bool two_arms_site(const Configuration& config, const Point& x, std::int32_t radius, EventWork& work) {
    if (radius < 1) throw std::invalid_argument("two-arms radius must be >= 1");
    const BoxSpec expected(config.box().dim(), x, radius);
    if (!(config.box() == expected)) throw std::invalid_argument("configuration box must be x + Lambda(n)");

    work.labeling.assign(config);
    const BoxSpec& box = config.box();

    // distinct cluster labels among the open neighbours of x
    auto& arms = work.scratch_labels;
    arms.clear();
    for (const Point& q : neighbors(x, box.dim())) {
        const std::int64_t qi = box.index_of(q);
        if (!work.labeling.open(qi)) continue;
        const std::int64_t lab = work.labeling.label_of(qi);
        if (std::find(arms.begin(), arms.end(), lab) == arms.end()) arms.push_back(lab);
    }
    if (arms.size() < 2) return false;

    int reaching = 0;
    for (std::size_t t = 0; t < arms.size(); ++t) {
        bool reaches = false;
        for (std::int64_t b : work.boundary_of(box)) {
            if (work.labeling.open(b) && work.labeling.label_of(b) == arms[t]) {
                reaches = true;
                break;
            }
        }
        if (reaches && ++reaching >= 2) return true;
    }
    return false;
}

bool two_arms_pair(const Configuration& config, std::int32_t inner_radius, const Point& a, const Point& b,
                   EventWork& work) {
    const BoxSpec& box = config.box();
    if (inner_radius >= box.radius()) throw std::invalid_argument("pair event needs annulus width >= 1");
    const BoxSpec inner(box.dim(), box.center(), inner_radius);
    if (a == b) throw std::invalid_argument("pair sites must differ");
    if (!inner.contains(a) || !inner.contains(b)) throw std::invalid_argument("pair sites must lie in the inner box");

    if (!config.open(a) || !config.open(b)) return false;
    work.labeling.assign(config);
    const std::int64_t la = work.labeling.label_of(box.index_of(a));
    const std::int64_t lb = work.labeling.label_of(box.index_of(b));
    if (la == lb) return false;
    bool ra = false, rb = false;
    for (std::int64_t i : work.boundary_of(box)) {
        if (!work.labeling.open(i)) continue;
        const std::int64_t lab = work.labeling.label_of(i);
        ra = ra || lab == la;
        rb = rb || lab == lb;
        if (ra && rb) return true;
    }
    return false;
}

bool two_arms_box(const Configuration& config, std::int32_t inner_radius, EventWork& work) {
    if (inner_radius >= config.box().radius()) throw std::invalid_argument("box event needs annulus width >= 1");
    work.labeling.assign(config);
    return crossing_clusters(work.labeling, inner_radius).count() >= 2;
}

bool connected_in_box(const Configuration& config, const Point& x, const Point& y, EventWork& work) {
    const BoxSpec& box = config.box();
    const std::int64_t xi = box.index_of(x);
    const std::int64_t yi = box.index_of(y);
    if (!config.open(xi) || !config.open(yi)) return false;
    if (xi == yi) return true;
    work.labeling.assign(config);
    return work.labeling.label_of(xi) == work.labeling.label_of(yi);
}

bool all_closures_balanced(const Configuration& config, std::int32_t inner_radius, double p, EventWork& work) {
    if (inner_radius < 2) throw std::invalid_argument("balance event needs inner radius >= 2 (ln n > 0)");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie strictly inside (0,1)");
    const BoxSpec& box = config.box();
    const BoxSpec inner(box.dim(), box.center(), inner_radius);
    const int dim = box.dim();

    work.labeling.assign(config);
    const CrossingClusters crossing = crossing_clusters(work.labeling, inner_radius);
    if (crossing.labels.empty()) return true;

    // open / adjacent-closed counts inside the inner box, per crossing cluster
    std::vector<std::int64_t> open_in(crossing.labels.size(), 0), closed_in(crossing.labels.size(), 0);
    auto slot = [&](std::int64_t label) -> std::ptrdiff_t {
        auto it = std::lower_bound(crossing.labels.begin(), crossing.labels.end(), label);
        if (it == crossing.labels.end() || *it != label) return -1;
        return it - crossing.labels.begin();
    };
    std::array<std::int64_t, 2 * kMaxDim> seen{};
    for (SiteCursor it(box); it.valid(); it.advance()) {
        if (!inner.contains(it.point())) continue;
        const std::int64_t i = it.index();
        if (work.labeling.open(i)) {
            const std::ptrdiff_t s = slot(work.labeling.label_of(i));
            if (s >= 0) ++open_in[static_cast<std::size_t>(s)];
            continue;
        }
        int found = 0;
        for (int a = 0; a < dim; ++a) {
            for (int sgn : {-1, +1}) {
                if (sgn < 0 ? it.point()[a] <= box.lo(a) : it.point()[a] >= box.hi(a)) continue;
                const std::int64_t j = i + sgn * box.axis_stride(a);
                if (!work.labeling.open(j)) continue;
                const std::int64_t lab = work.labeling.label_of(j);
                const std::ptrdiff_t s = slot(lab);
                if (s < 0) continue;
                bool dup = false;
                for (int t = 0; t < found; ++t) dup = dup || seen[static_cast<std::size_t>(t)] == lab;
                if (dup) continue;
                seen[static_cast<std::size_t>(found++)] = lab;
                ++closed_in[static_cast<std::size_t>(s)];
            }
        }
    }

    const double log_n = std::log(static_cast<double>(inner_radius));
    for (std::size_t s = 0; s < crossing.labels.size(); ++s) {
        const double size = static_cast<double>(open_in[s] + closed_in[s]);
        const double balance = static_cast<double>(closed_in[s]) / (1.0 - p) - static_cast<double>(open_in[s]) / p;
        if (!(std::abs(balance) < log_n * std::sqrt(size))) return false;
    }
    return true;
}

}  // namespace perc
