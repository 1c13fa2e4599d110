#include "perc/cluster.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace perc {

namespace {

struct PointHash {
    std::size_t operator()(const Point& p) const {
        std::uint64_t h = 0x2545f4914f6cdd1dULL;
        for (int i = 0; i < kMaxDim; ++i) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(p[i])));
        return static_cast<std::size_t>(h);
    }
};

inline std::int32_t uf_find(std::vector<std::int32_t>& parent, std::int32_t i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
        parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        i = parent[static_cast<std::size_t>(i)];
    }
    return i;
}

}  // namespace

void ClusterLabeling::assign(const Configuration& config) {
    config_ = &config;
    volume_ = config.volume();
    if (volume_ > std::numeric_limits<std::int32_t>::max())
        throw std::invalid_argument("box too large for cluster labeling");
    const auto n = static_cast<std::size_t>(volume_);
    label_.assign(n, -1);
    uf_.resize(n);

    // union-find pass over open nearest-neighbour pairs (forward axes only)
    const BoxSpec& box = config.box();
    const int dim = box.dim();
    for (std::int32_t i = 0; i < volume_; ++i) uf_[static_cast<std::size_t>(i)] = i;
    for (SiteCursor it(box); it.valid(); it.advance()) {
        const auto i = static_cast<std::int32_t>(it.index());
        if (!config.open(i)) continue;
        for (int a = 0; a < dim; ++a) {
            if (it.point()[a] >= box.hi(a)) continue;
            const auto j = static_cast<std::int32_t>(i + box.axis_stride(a));
            if (!config.open(j)) continue;
            const std::int32_t ri = uf_find(uf_, i);
            const std::int32_t rj = uf_find(uf_, j);
            if (ri != rj) uf_[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
        }
    }

    // canonical labels: the root reached by ascending-index processing with
    // min-root unions is the smallest site index of the component
    cluster_count_ = 0;
    for (std::int32_t i = 0; i < volume_; ++i) {
        if (!config.open(i)) continue;
        const std::int32_t r = uf_find(uf_, i);
        label_[static_cast<std::size_t>(i)] = r;
        if (r == i) ++cluster_count_;
    }
}

std::vector<std::int64_t> ClusterLabeling::labels() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(cluster_count_));
    for (std::int64_t i = 0; i < volume_; ++i) {
        if (label_[static_cast<std::size_t>(i)] == i) out.push_back(i);
    }
    return out;
}

std::vector<std::int64_t> ClusterLabeling::cluster_site_indices(std::int64_t label) const {
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; i < volume_; ++i) {
        if (label_[static_cast<std::size_t>(i)] == label) out.push_back(i);
    }
    return out;
}

std::vector<Point> cluster_of(const ClusterLabeling& labeling, const Point& x) {
    const BoxSpec& box = labeling.config().box();
    const std::int64_t xi = box.index_of(x);  // throws when outside
    std::vector<Point> out;
    if (!labeling.open(xi)) return out;
    for (std::int64_t i : labeling.cluster_site_indices(labeling.label_of(xi))) out.push_back(box.site_at(i));
    return out;
}

ClosureAndFringe closure_and_fringe(const ClusterLabeling& labeling, std::int64_t label) {
    const BoxSpec& box = labeling.config().box();
    const int dim = box.dim();
    std::unordered_set<Point, PointHash> in_cluster, shell, fringe;
    std::vector<Point> cluster;
    for (std::int64_t i : labeling.cluster_site_indices(label)) {
        cluster.push_back(box.site_at(i));
        in_cluster.insert(cluster.back());
    }
    if (cluster.empty()) throw std::invalid_argument("no cluster with the given label");
    for (const Point& p : cluster) {
        for (const Point& q : neighbors(p, dim)) {
            if (!in_cluster.count(q)) shell.insert(q);
        }
    }
    for (const Point& p : shell) {
        for (const Point& q : neighbors(p, dim)) {
            if (!in_cluster.count(q) && !shell.count(q)) fringe.insert(q);
        }
    }
    ClosureAndFringe out;
    out.closure = cluster;
    out.closure.insert(out.closure.end(), shell.begin(), shell.end());
    out.fringe.assign(fringe.begin(), fringe.end());
    std::sort(out.closure.begin(), out.closure.end());
    std::sort(out.fringe.begin(), out.fringe.end());
    return out;
}

std::vector<Point> intersect_with_box(const std::vector<Point>& sites, const BoxSpec& box) {
    std::vector<Point> out;
    for (const Point& p : sites) {
        if (box.contains(p)) out.push_back(p);
    }
    return out;
}

SiteClosure site_closure_in(const ClusterLabeling& labeling, const Point& x, const BoxSpec& inner_box) {
    const Configuration& config = labeling.config();
    const BoxSpec& box = config.box();
    const int dim = box.dim();
    const std::int64_t xi = box.index_of(x);
    SiteClosure out;
    if (!labeling.open(xi)) {
        if (inner_box.contains(x)) {
            out.sites.push_back(xi);
            out.closed_count = 1;
        }
        return out;
    }
    const std::int64_t label = labeling.label_of(xi);
    std::unordered_set<std::int64_t> seen;
    for (std::int64_t i : labeling.cluster_site_indices(label)) {
        const Point p = box.site_at(i);
        if (inner_box.contains(p)) {
            if (seen.insert(i).second) ++out.open_count;
        }
        for (const Point& q : neighbors(p, dim)) {
            if (!inner_box.contains(q) || !box.contains(q)) continue;
            const std::int64_t qi = box.index_of(q);
            if (config.open(qi)) continue;  // open neighbours are cluster sites
            if (seen.insert(qi).second) ++out.closed_count;
        }
    }
    out.sites.assign(seen.begin(), seen.end());
    std::sort(out.sites.begin(), out.sites.end());
    return out;
}

bool CrossingClusters::contains(std::int64_t label) const {
    return std::binary_search(labels.begin(), labels.end(), label);
}

CrossingClusters crossing_clusters(const ClusterLabeling& labeling, std::int32_t inner_radius) {
    const BoxSpec& box = labeling.config().box();
    if (inner_radius < 0 || inner_radius > box.radius())
        throw std::invalid_argument("inner radius must lie within the configuration's box");
    const BoxSpec inner(box.dim(), box.center(), inner_radius);

    std::vector<std::int64_t> meets_inner, meets_outer;
    for (SiteCursor it(box); it.valid(); it.advance()) {
        const std::int64_t i = it.index();
        if (!labeling.open(i)) continue;
        if (inner.contains(it.point())) meets_inner.push_back(labeling.label_of(i));
        if (box.on_internal_boundary(it.point())) meets_outer.push_back(labeling.label_of(i));
    }
    auto dedupe = [](std::vector<std::int64_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(meets_inner);
    dedupe(meets_outer);

    CrossingClusters out;
    out.inner_radius = inner_radius;
    out.annulus_width = box.radius() - inner_radius;
    std::set_intersection(meets_inner.begin(), meets_inner.end(), meets_outer.begin(), meets_outer.end(),
                          std::back_inserter(out.labels));
    // distinct crossing clusters occupy distinct sites of the inner boundary
    if (out.count() > internal_boundary_size(box.dim(), inner_radius))
        throw std::logic_error("crossing cluster count exceeds the inner boundary size");
    return out;
}

std::vector<std::int32_t> closure_membership_counts(const ClusterLabeling& labeling,
                                                    const CrossingClusters& crossing) {
    const Configuration& config = labeling.config();
    const BoxSpec& box = config.box();
    const int dim = box.dim();
    std::vector<std::int32_t> counts(static_cast<std::size_t>(box.volume()), 0);
    std::array<std::int64_t, 2 * kMaxDim> adj{};
    for (SiteCursor it(box); it.valid(); it.advance()) {
        const std::int64_t i = it.index();
        if (labeling.open(i)) {
            counts[static_cast<std::size_t>(i)] = crossing.contains(labeling.label_of(i)) ? 1 : 0;
            continue;
        }
        int found = 0;
        for (int a = 0; a < dim; ++a) {
            for (int sgn : {-1, +1}) {
                if (sgn < 0 ? it.point()[a] <= box.lo(a) : it.point()[a] >= box.hi(a)) continue;
                const std::int64_t j = i + sgn * box.axis_stride(a);
                if (!labeling.open(j)) continue;
                const std::int64_t lab = labeling.label_of(j);
                if (!crossing.contains(lab)) continue;
                bool dup = false;
                for (int t = 0; t < found; ++t) dup = dup || adj[static_cast<std::size_t>(t)] == lab;
                if (!dup) adj[static_cast<std::size_t>(found++)] = lab;
            }
        }
        counts[static_cast<std::size_t>(i)] = found;
    }
    return counts;
}

std::string ascii_cluster_map(const ClusterLabeling& labeling) {
    const BoxSpec& box = labeling.config().box();
    if (box.dim() != 2) throw std::invalid_argument("cluster map is only available for d=2");
    const std::vector<std::int64_t> all = labeling.labels();
    static const char glyphs[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    std::ostringstream out;
    for (std::int32_t y = box.hi(1); y >= box.lo(1); --y) {
        for (std::int32_t x = box.lo(0); x <= box.hi(0); ++x) {
            const std::int64_t i = box.index_of(Point{x, y});
            if (!labeling.open(i)) {
                out << '.';
                continue;
            }
            const auto pos = std::lower_bound(all.begin(), all.end(), labeling.label_of(i)) - all.begin();
            out << glyphs[static_cast<std::size_t>(pos) % (sizeof(glyphs) - 1)];
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace perc
