#include "perc/exploration.hpp"

#include <algorithm>
#include <stdexcept>

namespace perc {

StreamBitSource::StreamBitSource(std::uint64_t key, double p, std::int64_t capacity)
    : key_(key), threshold_(bernoulli_threshold(p)), capacity_(capacity) {}

bool StreamBitSource::next(std::int64_t) {
    if (consumed_ >= capacity_) throw std::logic_error("bit source exhausted: growth exceeded the interior volume");
    return bernoulli_bit(key_, static_cast<std::uint64_t>(consumed_++), threshold_);
}

ReplayBitSource::ReplayBitSource(const Configuration& config, std::int64_t capacity)
    : config_(&config), capacity_(capacity) {}

bool ReplayBitSource::next(std::int64_t parent_site_index) {
    if (consumed_++ >= capacity_) throw std::logic_error("bit source exhausted: growth exceeded the interior volume");
    return config_->open(parent_site_index);
}

bool FixedBitSource::next(std::int64_t) {
    if (pos_ >= bits_.size()) throw std::logic_error("bit source exhausted");
    return bits_[pos_++];
}

AnnulusGraph::AnnulusGraph(const PartialConfiguration& annulus, std::int32_t n, std::int32_t l)
    : parent_(annulus.parent_box()), inner_(parent_.dim(), parent_.center(), n) {
    if (n < 0 || l < 0 || parent_.radius() != n + l)
        throw std::invalid_argument("annulus configuration must live on Lambda(n+l)");
    const std::int64_t volume = parent_.volume();
    const std::int64_t expected = volume - inner_.volume();
    if (static_cast<std::int64_t>(annulus.size()) != expected)
        throw std::invalid_argument("annulus configuration must cover exactly Lambda(n+l) \\ Lambda(n)");
    for (std::int64_t s : annulus.sites()) {
        if (inner_.contains(parent_.site_at(s)))
            throw std::invalid_argument("annulus configuration overlaps the inner box");
    }

    const int dim = parent_.dim();
    component_.assign(static_cast<std::size_t>(volume), -1);
    adjacent_.assign(static_cast<std::size_t>(volume), {});

    // union-find over open annulus sites
    std::vector<std::int32_t> parent(static_cast<std::size_t>(volume));
    for (std::int64_t i = 0; i < volume; ++i) parent[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    std::vector<std::uint8_t> open_annulus(static_cast<std::size_t>(volume), 0);
    for (std::size_t t = 0; t < annulus.sites().size(); ++t) {
        const std::int64_t s = annulus.sites()[t];
        if (annulus.open_at(s)) open_annulus[static_cast<std::size_t>(s)] = 1;
    }
    auto find = [&](std::int32_t i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    for (SiteCursor it(parent_); it.valid(); it.advance()) {
        const std::int64_t i = it.index();
        if (!open_annulus[static_cast<std::size_t>(i)]) continue;
        for (int a = 0; a < dim; ++a) {
            if (it.point()[a] >= parent_.hi(a)) continue;
            const std::int64_t j = i + parent_.axis_stride(a);
            if (!open_annulus[static_cast<std::size_t>(j)]) continue;
            const std::int32_t ri = find(static_cast<std::int32_t>(i));
            const std::int32_t rj = find(static_cast<std::int32_t>(j));
            if (ri != rj) parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
        }
    }

    fringe_slot_.assign(static_cast<std::size_t>(volume), -1);
    for (SiteCursor it(parent_); it.valid(); it.advance()) {
        const std::int64_t i = it.index();
        if (!open_annulus[static_cast<std::size_t>(i)]) continue;
        const std::int32_t root = find(static_cast<std::int32_t>(i));
        component_[static_cast<std::size_t>(i)] = root;
        if (fringe_slot_[static_cast<std::size_t>(root)] < 0) {
            fringe_slot_[static_cast<std::size_t>(root)] = static_cast<std::int32_t>(fringe_.size());
            fringe_.emplace_back();
        }
        // interior neighbours of this open annulus site
        for (int a = 0; a < dim; ++a) {
            for (int sgn : {-1, +1}) {
                if (sgn < 0 ? it.point()[a] <= parent_.lo(a) : it.point()[a] >= parent_.hi(a)) continue;
                const std::int64_t j = i + sgn * parent_.axis_stride(a);
                if (!inner_.contains(parent_.site_at(j))) continue;
                fringe_[static_cast<std::size_t>(fringe_slot_[static_cast<std::size_t>(root)])].push_back(j);
                adjacent_[static_cast<std::size_t>(j)].push_back(root);
            }
        }
    }
    for (auto& f : fringe_) {
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end()), f.end());
    }
    for (auto& adj : adjacent_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
}

const std::vector<std::int64_t>& AnnulusGraph::interior_fringe_of(std::int64_t annulus_site_index) const {
    const std::int32_t root = component_[static_cast<std::size_t>(annulus_site_index)];
    if (root < 0) return empty_;
    return fringe_[static_cast<std::size_t>(fringe_slot_[static_cast<std::size_t>(root)])];
}

const std::vector<std::int64_t>& AnnulusGraph::components_adjacent_to(std::int64_t interior_site_index) const {
    return adjacent_[static_cast<std::size_t>(interior_site_index)];
}

const std::vector<std::int64_t>& AnnulusGraph::fringe_of_component(std::int64_t component_root) const {
    const std::int32_t slot = fringe_slot_[static_cast<std::size_t>(component_root)];
    if (slot < 0) return empty_;
    return fringe_[static_cast<std::size_t>(slot)];
}

namespace {

std::vector<std::int64_t> start_sites(const AnnulusGraph& graph, const PartialConfiguration& annulus,
                                      const Point& x) {
    const BoxSpec& parent = graph.parent_box();
    const std::int64_t xi = parent.index_of(x);  // throws when x is outside Lambda(n+l)
    if (graph.inner_box().contains(x)) return {xi};
    if (!annulus.open_at(xi)) return {};
    return graph.interior_fringe_of(xi);  // already sorted
}

}  // namespace

std::vector<Point> initial_active_set(const PartialConfiguration& annulus, const Point& x, std::int32_t n,
                                      std::int32_t l) {
    const AnnulusGraph graph(annulus, n, l);
    std::vector<Point> out;
    for (std::int64_t i : start_sites(graph, annulus, x)) out.push_back(graph.parent_box().site_at(i));
    return out;
}

namespace {
enum : std::uint8_t { untouched = 0, in_active = 1, settled = 2 };
}

GrowthProcess::GrowthProcess(const AnnulusGraph& graph, const PartialConfiguration& annulus, const Point& x)
    : graph_(&graph), state_(static_cast<std::size_t>(graph.parent_box().volume()), untouched) {
    for (std::int64_t i : start_sites(graph, annulus, x)) {
        active_.push_back(i);
        state_[static_cast<std::size_t>(i)] = in_active;
    }
}

std::int64_t GrowthProcess::next_site() const {
    if (active_.empty()) throw std::logic_error("growth already terminated");
    return active_.front();
}

void GrowthProcess::reveal(bool open) {
    const std::int64_t site = next_site();
    active_.pop_front();
    state_[static_cast<std::size_t>(site)] = settled;
    ++explored_;
    if (!open) {
        closed_.push_back(site);
        return;
    }
    opened_.push_back(site);
    // candidate growth: inner-box neighbours plus interior fringes of the
    // annulus components this site touches
    const BoxSpec& parent = graph_->parent_box();
    const BoxSpec& inner = graph_->inner_box();
    std::vector<std::int64_t> additions;
    const Point p = parent.site_at(site);
    for (int a = 0; a < parent.dim(); ++a) {
        for (int sgn : {-1, +1}) {
            Point q = p;
            q[a] += sgn;
            if (!inner.contains(q)) continue;
            additions.push_back(parent.index_of(q));
        }
    }
    for (std::int64_t root : graph_->components_adjacent_to(site)) {
        const auto& fringe = graph_->fringe_of_component(root);
        additions.insert(additions.end(), fringe.begin(), fringe.end());
    }
    std::sort(additions.begin(), additions.end());
    additions.erase(std::unique(additions.begin(), additions.end()), additions.end());
    for (std::int64_t q : additions) {
        if (state_[static_cast<std::size_t>(q)] != untouched) continue;
        state_[static_cast<std::size_t>(q)] = in_active;
        active_.push_back(q);
    }
}

ExplorationResult GrowthProcess::result() const {
    ExplorationResult out;
    out.explored = explored_;
    out.opens = opens();
    out.sites.reserve(opened_.size() + closed_.size());
    out.sites.insert(out.sites.end(), opened_.begin(), opened_.end());
    out.sites.insert(out.sites.end(), closed_.begin(), closed_.end());
    std::sort(out.sites.begin(), out.sites.end());
    return out;
}

ExplorationResult explore(const PartialConfiguration& annulus, BitSource& bits, const Point& x, std::int32_t n,
                          std::int32_t l, const std::function<void(const ExplorationStateView&)>& on_step) {
    const AnnulusGraph graph(annulus, n, l);
    GrowthProcess growth(graph, annulus, x);
    while (!growth.done()) {
        growth.reveal(bits.next(growth.next_site()));
        if (on_step)
            on_step(ExplorationStateView{growth.active(), growth.opened(), growth.closed_visited(), growth.explored()});
    }
    return growth.result();
}

}  // namespace perc
