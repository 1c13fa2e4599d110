#include "perc/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "perc/cluster.hpp"
#include "perc/events.hpp"
#include "perc/exploration.hpp"
#include "perc/parallel.hpp"
#include "perc/statistics.hpp"

namespace perc {

void EnumerationPlan::validate() const {
    if (cap > kOracleHardCap) throw ResourceCapError("enumeration cap exceeds the 25-site hard cap");
    const std::int64_t effective = allow_large ? kOracleHardCap : std::min(cap, kOracleDefaultCap);
    if (box.volume() > effective)
        throw ResourceCapError("box volume " + std::to_string(box.volume()) + " exceeds the enumeration cap " +
                               std::to_string(effective));
    if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie strictly inside (0,1)");
}

Rational weighted_class_sum(const std::vector<std::int64_t>& per_class, const Rational& p) {
    const std::size_t classes = per_class.size();
    if (classes == 0) return Rational(0);
    const Rational q = Rational(1) - p;
    // powers of p ascending, powers of q descending
    Rational acc(0), ppow(1);
    std::vector<Rational> qpow(classes);
    qpow[classes - 1] = Rational(1);
    for (std::size_t i = classes - 1; i > 0; --i) qpow[i - 1] = qpow[i] * q;
    for (std::size_t c = 0; c < classes; ++c) {
        if (per_class[c] != 0) acc += rational(per_class[c]) * ppow * qpow[c];
        ppow *= p;
    }
    return acc;
}

std::vector<std::unique_ptr<ConfigVisitor>> enumerate_configurations(
    const BoxSpec& box, int workers, const std::function<std::unique_ptr<ConfigVisitor>(int)>& make_visitor) {
    const std::int64_t volume = box.volume();
    if (volume > kOracleHardCap) throw ResourceCapError("enumeration beyond 25 sites is not supported");
    const std::int64_t total = std::int64_t{1} << volume;
    workers = std::max(workers, 1);
    std::vector<std::unique_ptr<ConfigVisitor>> visitors(static_cast<std::size_t>(workers));
    run_sharded(total, workers, [&](int shard, std::int64_t begin, std::int64_t end) {
        auto visitor = make_visitor(shard);
        Configuration config(box);
        // Gray code of the range start, then one flipped bit per step.
        const std::uint64_t gray = static_cast<std::uint64_t>(begin) ^ (static_cast<std::uint64_t>(begin) >> 1);
        std::int64_t open_count = 0;
        for (std::int64_t i = 0; i < volume; ++i) {
            if ((gray >> i) & 1) {
                config.set_open(i, true);
                ++open_count;
            }
        }
        for (std::int64_t idx = begin; idx < end; ++idx) {
            std::int64_t flipped = -1;
            if (idx != begin) {
                flipped = __builtin_ctzll(static_cast<unsigned long long>(idx));
                config.flip(flipped);
                open_count += config.open(flipped) ? 1 : -1;
            }
            visitor->visit(config, open_count, flipped);
        }
        visitors[static_cast<std::size_t>(shard)] = std::move(visitor);
    });
    return visitors;
}

namespace {

class ClassCountVisitor : public ConfigVisitor {
public:
    ClassCountVisitor(std::int64_t volume, std::function<std::int64_t(const Configuration&)> statistic)
        : per_class(static_cast<std::size_t>(volume + 1), 0), statistic_(std::move(statistic)) {}

    void visit(const Configuration& config, std::int64_t open_count, std::int64_t) override {
        per_class[static_cast<std::size_t>(open_count)] += statistic_(config);
    }

    std::vector<std::int64_t> per_class;

private:
    std::function<std::int64_t(const Configuration&)> statistic_;
};

}  // namespace

Rational exact_probability(const EnumerationPlan& plan, const std::function<bool(const Configuration&)>& predicate,
                           int workers) {
    plan.validate();
    auto visitors = enumerate_configurations(plan.box, workers, [&](int) {
        return std::make_unique<ClassCountVisitor>(plan.box.volume(),
                                                   [&](const Configuration& c) { return predicate(c) ? 1 : 0; });
    });
    std::vector<std::int64_t> per_class(static_cast<std::size_t>(plan.box.volume() + 1), 0);
    for (const auto& v : visitors) {
        const auto& counts = static_cast<const ClassCountVisitor&>(*v).per_class;
        for (std::size_t c = 0; c < counts.size(); ++c) per_class[c] += counts[c];
    }
    return weighted_class_sum(per_class, plan.p);
}

Rational exact_expectation(const EnumerationPlan& plan,
                           const std::function<std::int64_t(const Configuration&)>& statistic, int workers) {
    plan.validate();
    auto visitors = enumerate_configurations(plan.box, workers, [&](int) {
        return std::make_unique<ClassCountVisitor>(plan.box.volume(), statistic);
    });
    std::vector<std::int64_t> per_class(static_cast<std::size_t>(plan.box.volume() + 1), 0);
    for (const auto& v : visitors) {
        const auto& counts = static_cast<const ClassCountVisitor&>(*v).per_class;
        for (std::size_t c = 0; c < counts.size(); ++c) per_class[c] += counts[c];
    }
    return weighted_class_sum(per_class, plan.p);
}

// --- identity scan ---------------------------------------------------------

namespace {

class IdentityVisitor : public ConfigVisitor {
public:
    IdentityVisitor(int dim, std::int32_t n, std::int32_t l)
        : dim_(dim), n_(n), l_(l), box_(BoxSpec::lambda(dim, n + l)), inner_(BoxSpec::lambda(dim, n)) {
        const auto classes = static_cast<std::size_t>(box_.volume() + 1);
        reach_open_sum.assign(classes, 0);
        reach_closed_sum.assign(classes, 0);
        both_sum.assign(classes, 0);
        two_arms_true.assign(classes, 0);
        const auto kdim = static_cast<std::size_t>(inner_.volume() + 1);
        joint.assign(kdim * kdim * classes, 0);
        mark_.assign(static_cast<std::size_t>(box_.volume()), -1);
    }

    void visit(const Configuration& config, std::int64_t open_count, std::int64_t) override {
        const auto cls = static_cast<std::size_t>(open_count);
        const FrontierSets fs = frontier_sets(config, n_, work_);
        reach_open_sum[cls] += static_cast<std::int64_t>(fs.reach_open.size());
        reach_closed_sum[cls] += static_cast<std::int64_t>(fs.reach_closed.size());
        both_sum[cls] += static_cast<std::int64_t>(fs.reach_open.size() + fs.reach_closed.size());

        // joint counts of the origin's closure within the inner box
        const ClusterLabeling& labeling = work_.labeling;  // assigned by frontier_sets
        const std::int64_t origin = box_.index_of(Point{});
        std::int64_t opens = 0, closures = 0;
        if (!labeling.open(origin)) {
            closures = 1;
        } else {
            const std::int64_t lab = labeling.label_of(origin);
            ++epoch_;
            for (SiteCursor it(box_); it.valid(); it.advance()) {
                const std::int64_t i = it.index();
                if (labeling.label_of(i) != lab) continue;
                if (inner_.contains(it.point())) ++opens;
                for (int a = 0; a < dim_; ++a) {
                    for (int sgn : {-1, +1}) {
                        if (sgn < 0 ? it.point()[a] <= box_.lo(a) : it.point()[a] >= box_.hi(a)) continue;
                        const std::int64_t j = i + sgn * box_.axis_stride(a);
                        if (labeling.open(j)) continue;
                        if (!inner_.contains(box_.site_at(j))) continue;
                        if (mark_[static_cast<std::size_t>(j)] == epoch_) continue;
                        mark_[static_cast<std::size_t>(j)] = epoch_;
                        ++closures;
                    }
                }
            }
        }
        const std::int64_t k = opens + closures;
        const auto kdim = static_cast<std::size_t>(inner_.volume() + 1);
        joint[(static_cast<std::size_t>(k) * kdim + static_cast<std::size_t>(opens)) * reach_open_sum.size() + cls] += 1;

        // two-arms at the origin, radius n+l: >= 2 distinct clusters among the
        // origin's open neighbours that reach the internal boundary
        std::int64_t arm_labels[2 * kMaxDim];
        int arms = 0;
        for (const Point& q : neighbors(Point{}, dim_)) {
            const std::int64_t qi = box_.index_of(q);
            if (!labeling.open(qi)) continue;
            const std::int64_t lab = labeling.label_of(qi);
            bool dup = false;
            for (int t = 0; t < arms; ++t) dup = dup || arm_labels[t] == lab;
            if (!dup) arm_labels[arms++] = lab;
        }
        if (arms >= 2) {
            int reaching = 0;
            for (int t = 0; t < arms && reaching < 2; ++t) {
                for (std::int64_t b : work_.boundary_of(box_)) {
                    if (labeling.open(b) && labeling.label_of(b) == arm_labels[t]) {
                        ++reaching;
                        break;
                    }
                }
            }
            if (reaching >= 2) two_arms_true[cls] += 1;
        }
    }

    std::vector<std::int64_t> reach_open_sum, reach_closed_sum, both_sum, two_arms_true, joint;

private:
    int dim_;
    std::int32_t n_, l_;
    BoxSpec box_, inner_;
    EventWork work_;
    std::vector<std::int32_t> mark_;
    std::int32_t epoch_ = 0;
};

}  // namespace

std::int64_t IdentityScan::joint_at(std::int64_t k, std::int64_t opens, std::int64_t cls) const {
    const auto kdim = static_cast<std::size_t>(inner_volume + 1);
    const auto classes = static_cast<std::size_t>(volume + 1);
    return joint[(static_cast<std::size_t>(k) * kdim + static_cast<std::size_t>(opens)) * classes +
                 static_cast<std::size_t>(cls)];
}

Rational IdentityScan::expected_reach_open(const Rational& p) const { return weighted_class_sum(reach_open_sum, p); }
Rational IdentityScan::expected_reach_closed(const Rational& p) const { return weighted_class_sum(reach_closed_sum, p); }
Rational IdentityScan::expected_both(const Rational& p) const { return weighted_class_sum(both_sum, p); }

Rational IdentityScan::expected_balance(const Rational& p) const {
    std::vector<std::int64_t> open_sum(static_cast<std::size_t>(volume + 1), 0);
    std::vector<std::int64_t> closed_sum(static_cast<std::size_t>(volume + 1), 0);
    for (std::int64_t k = 0; k <= inner_volume; ++k) {
        for (std::int64_t o = 0; o <= k; ++o) {
            for (std::int64_t c = 0; c <= volume; ++c) {
                const std::int64_t cnt = joint_at(k, o, c);
                if (cnt == 0) continue;
                open_sum[static_cast<std::size_t>(c)] += cnt * o;
                closed_sum[static_cast<std::size_t>(c)] += cnt * (k - o);
            }
        }
    }
    return weighted_class_sum(closed_sum, p) / (Rational(1) - p) - weighted_class_sum(open_sum, p) / p;
}

Rational IdentityScan::two_arms_probability(const Rational& p) const { return weighted_class_sum(two_arms_true, p); }

Rational IdentityScan::closure_law(const Rational& p, std::int64_t k, std::int64_t opens) const {
    std::vector<std::int64_t> per_class(static_cast<std::size_t>(volume + 1), 0);
    for (std::int64_t c = 0; c <= volume; ++c) per_class[static_cast<std::size_t>(c)] = joint_at(k, opens, c);
    return weighted_class_sum(per_class, p);
}

Rational IdentityScan::tail_probability(const Rational& p, const Rational& t, std::int64_t k) const {
    // |balance| >= t with balance = (p k - opens)/(p(1-p))
    const Rational threshold = t * p * (Rational(1) - p);
    Rational acc(0);
    for (std::int64_t o = 0; o <= k; ++o) {
        Rational dev = p * rational(k) - rational(o);
        if (dev < 0) dev = -dev;
        if (dev >= threshold) acc += closure_law(p, k, o);
    }
    return acc;
}

IdentityScan identity_scan(int dim, std::int32_t n, std::int32_t l, int workers, bool allow_large) {
    const BoxSpec box = BoxSpec::lambda(dim, n + l);
    EnumerationPlan plan{box, Rational(1, 2), kOracleDefaultCap, allow_large};
    plan.validate();
    auto visitors = enumerate_configurations(box, workers, [&](int) {
        return std::make_unique<IdentityVisitor>(dim, n, l);
    });

    IdentityScan out;
    out.dim = dim;
    out.n = n;
    out.l = l;
    out.volume = box.volume();
    out.inner_volume = BoxSpec::lambda(dim, n).volume();
    const auto classes = static_cast<std::size_t>(out.volume + 1);
    const auto kdim = static_cast<std::size_t>(out.inner_volume + 1);
    out.reach_open_sum.assign(classes, 0);
    out.reach_closed_sum.assign(classes, 0);
    out.both_sum.assign(classes, 0);
    out.two_arms_true.assign(classes, 0);
    out.joint.assign(kdim * kdim * classes, 0);
    for (const auto& v : visitors) {
        const auto& iv = static_cast<const IdentityVisitor&>(*v);
        for (std::size_t c = 0; c < classes; ++c) {
            out.reach_open_sum[c] += iv.reach_open_sum[c];
            out.reach_closed_sum[c] += iv.reach_closed_sum[c];
            out.both_sum[c] += iv.both_sum[c];
            out.two_arms_true[c] += iv.two_arms_true[c];
        }
        for (std::size_t i = 0; i < out.joint.size(); ++i) out.joint[i] += iv.joint[i];
    }
    return out;
}

// --- exploration law ---------------------------------------------------------

std::int64_t ExplorationLaw::at(std::int64_t k, std::int64_t opens, std::int64_t annulus_open) const {
    const auto kdim = static_cast<std::size_t>(inner_volume + 1);
    const auto acls = static_cast<std::size_t>(annulus_size + 1);
    return counts[(static_cast<std::size_t>(k) * kdim + static_cast<std::size_t>(opens)) * acls +
                  static_cast<std::size_t>(annulus_open)];
}

Rational ExplorationLaw::law(const Rational& p, std::int64_t k, std::int64_t opens) const {
    const Rational q = Rational(1) - p;
    std::vector<std::int64_t> per_class(static_cast<std::size_t>(annulus_size + 1), 0);
    for (std::int64_t ac = 0; ac <= annulus_size; ++ac) per_class[static_cast<std::size_t>(ac)] = at(k, opens, ac);
    // annulus weight first, then the consumed-bit weight p^opens q^(k-opens)
    return weighted_class_sum(per_class, p) * rational_pow(p, static_cast<std::uint64_t>(opens)) *
           rational_pow(q, static_cast<std::uint64_t>(k - opens));
}

ExplorationLaw exploration_law_scan(int dim, std::int32_t n, std::int32_t l, const Point& x, int workers) {
    const BoxSpec box = BoxSpec::lambda(dim, n + l);
    const std::vector<Point> annulus_points = annulus_sites(n, l, dim);
    const auto annulus_size = static_cast<std::int64_t>(annulus_points.size());
    if (annulus_size > 24) throw std::invalid_argument("annulus too large for exact law enumeration");
    const std::int64_t inner_volume = BoxSpec::lambda(dim, n).volume();

    std::vector<std::int64_t> annulus_idx;
    for (const Point& p : annulus_points) annulus_idx.push_back(box.index_of(p));
    std::sort(annulus_idx.begin(), annulus_idx.end());

    const std::int64_t total = std::int64_t{1} << annulus_size;
    const auto kdim = static_cast<std::size_t>(inner_volume + 1);
    const auto acls = static_cast<std::size_t>(annulus_size + 1);
    std::vector<std::vector<std::int64_t>> partials(static_cast<std::size_t>(std::max(workers, 1)));

    run_sharded(total, workers, [&](int shard, std::int64_t begin, std::int64_t end) {
        std::vector<std::int64_t> counts(kdim * kdim * acls, 0);
        for (std::int64_t eta = begin; eta < end; ++eta) {
            std::vector<std::uint8_t> open_bits(annulus_idx.size());
            std::int64_t annulus_open = 0;
            for (std::size_t t = 0; t < annulus_idx.size(); ++t) {
                open_bits[t] = static_cast<std::uint8_t>((eta >> t) & 1);
                annulus_open += open_bits[t];
            }
            const PartialConfiguration eta_config(box, annulus_idx, open_bits);
            const AnnulusGraph graph(eta_config, n, l);
            // branch the growth on both outcomes of every consumed bit;
            // each leaf carries weight p^opens (1-p)^(k-opens)
            const auto record = [&](const GrowthProcess& g) {
                counts[(static_cast<std::size_t>(g.explored()) * kdim + static_cast<std::size_t>(g.opens())) * acls +
                       static_cast<std::size_t>(annulus_open)] += 1;
            };
            std::vector<GrowthProcess> stack;
            stack.emplace_back(graph, eta_config, x);
            while (!stack.empty()) {
                GrowthProcess g = std::move(stack.back());
                stack.pop_back();
                if (g.done()) {
                    record(g);
                    continue;
                }
                GrowthProcess closed_branch = g;
                closed_branch.reveal(false);
                stack.push_back(std::move(closed_branch));
                g.reveal(true);
                stack.push_back(std::move(g));
            }
        }
        partials[static_cast<std::size_t>(shard)] = std::move(counts);
    });

    ExplorationLaw out;
    out.inner_volume = inner_volume;
    out.annulus_size = annulus_size;
    out.counts.assign(kdim * kdim * acls, 0);
    for (const auto& c : partials) {
        for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += c[i];
    }
    return out;
}

// --- incremental labeling (feature-flagged optimization) -----------------------

void IncrementalLabeling::reset(const Configuration& config) {
    box_ = &config.box();
    rebuild(config);
}

void IncrementalLabeling::rebuild(const Configuration& config) {
    const BoxSpec& box = config.box();
    const std::int64_t volume = box.volume();
    parent_.assign(static_cast<std::size_t>(volume), -1);
    for (SiteCursor it(box); it.valid(); it.advance()) {
        if (config.open(it.index())) parent_[static_cast<std::size_t>(it.index())] = static_cast<std::int32_t>(it.index());
    }
    for (SiteCursor it(box); it.valid(); it.advance()) {
        const std::int64_t i = it.index();
        if (parent_[static_cast<std::size_t>(i)] < 0) continue;
        for (int a = 0; a < box.dim(); ++a) {
            if (it.point()[a] >= box.hi(a)) continue;
            const std::int64_t j = i + box.axis_stride(a);
            if (parent_[static_cast<std::size_t>(j)] < 0) continue;
            const std::int64_t ri = find(i), rj = find(j);
            if (ri != rj) parent_[static_cast<std::size_t>(std::max(ri, rj))] = static_cast<std::int32_t>(std::min(ri, rj));
        }
    }
}

std::int64_t IncrementalLabeling::find(std::int64_t i) const {
    if (parent_[static_cast<std::size_t>(i)] < 0) return -1;
    std::int64_t r = i;
    while (parent_[static_cast<std::size_t>(r)] != r) r = parent_[static_cast<std::size_t>(r)];
    // path compression
    auto& parent = const_cast<std::vector<std::int32_t>&>(parent_);
    while (parent[static_cast<std::size_t>(i)] != r) {
        const std::int64_t next = parent[static_cast<std::size_t>(i)];
        parent[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(r);
        i = next;
    }
    return r;
}

void IncrementalLabeling::apply_flip(const Configuration& config, std::int64_t flipped_site) {
    if (!config.open(flipped_site)) {
        rebuild(config);  // a closing flip can split a cluster
        return;
    }
    const BoxSpec& box = config.box();
    parent_[static_cast<std::size_t>(flipped_site)] = static_cast<std::int32_t>(flipped_site);
    const Point p = box.site_at(flipped_site);
    for (int a = 0; a < box.dim(); ++a) {
        for (int sgn : {-1, +1}) {
            Point q = p;
            q[a] += sgn;
            if (!box.contains(q)) continue;
            const std::int64_t j = box.index_of(q);
            if (parent_[static_cast<std::size_t>(j)] < 0) continue;
            const std::int64_t ri = find(flipped_site), rj = find(j);
            if (ri != rj) parent_[static_cast<std::size_t>(std::max(ri, rj))] = static_cast<std::int32_t>(std::min(ri, rj));
        }
    }
}

std::int64_t IncrementalLabeling::label_of(std::int64_t site) const { return find(site); }

namespace {

class TwoArmsVisitor : public ConfigVisitor {
public:
    TwoArmsVisitor(int dim, std::int32_t radius, bool incremental)
        : dim_(dim), incremental_(incremental), box_(BoxSpec::lambda(dim, radius)),
          per_class(static_cast<std::size_t>(box_.volume() + 1), 0) {
        for (SiteCursor it(box_); it.valid(); it.advance()) {
            if (box_.on_internal_boundary(it.point())) boundary_.push_back(it.index());
        }
        for (const Point& q : neighbors(Point{}, dim)) neighbor_idx_.push_back(box_.index_of(q));
    }

    void visit(const Configuration& config, std::int64_t open_count, std::int64_t flipped_site) override {
        if (incremental_) {
            if (flipped_site < 0) {
                inc_.reset(config);
            } else {
                inc_.apply_flip(config, flipped_site);
            }
        } else {
            labeling_.assign(config);
        }
        auto label_of = [&](std::int64_t i) { return incremental_ ? inc_.label_of(i) : labeling_.label_of(i); };

        std::int64_t arms[2 * kMaxDim];
        int count = 0;
        for (std::int64_t qi : neighbor_idx_) {
            const std::int64_t lab = label_of(qi);
            if (lab < 0) continue;
            bool dup = false;
            for (int t = 0; t < count; ++t) dup = dup || arms[t] == lab;
            if (!dup) arms[count++] = lab;
        }
        if (count >= 2) {
            int reaching = 0;
            for (int t = 0; t < count && reaching < 2; ++t) {
                for (std::int64_t b : boundary_) {
                    if (label_of(b) == arms[t]) {
                        ++reaching;
                        break;
                    }
                }
            }
            if (reaching >= 2) per_class[static_cast<std::size_t>(open_count)] += 1;
        }
    }

    std::vector<std::int64_t> per_class;

private:
    int dim_;
    bool incremental_;
    BoxSpec box_;
    std::vector<std::int64_t> boundary_, neighbor_idx_;
    ClusterLabeling labeling_;
    IncrementalLabeling inc_;
};

}  // namespace

Rational exact_two_arms_probability(int dim, std::int32_t radius, const Rational& p, int workers, bool incremental,
                                    bool allow_large) {
    if (radius < 1) throw std::invalid_argument("two-arms radius must be >= 1");
    const BoxSpec box = BoxSpec::lambda(dim, radius);
    EnumerationPlan plan{box, p, kOracleDefaultCap, allow_large};
    plan.validate();
    auto visitors = enumerate_configurations(box, workers, [&](int) {
        return std::make_unique<TwoArmsVisitor>(dim, radius, incremental);
    });
    std::vector<std::int64_t> per_class(static_cast<std::size_t>(box.volume() + 1), 0);
    for (const auto& v : visitors) {
        const auto& counts = static_cast<const TwoArmsVisitor&>(*v).per_class;
        for (std::size_t c = 0; c < counts.size(); ++c) per_class[c] += counts[c];
    }
    return weighted_class_sum(per_class, p);
}

// --- golden fixtures ----------------------------------------------------------

std::vector<GoldenEntry> load_golden_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open golden fixture file " + path);
    std::vector<GoldenEntry> out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // "key,value" header
            continue;
        }
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed golden row: " + line);
        out.push_back({line.substr(0, comma), rational_from_string(line.substr(comma + 1))});
    }
    return out;
}

void save_golden_csv(const std::string& path, const std::vector<GoldenEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write golden fixture file " + path);
    out << "# golden exact values, format v1\n";
    out << "key,value\n";
    for (const auto& e : entries) out << e.key << ',' << to_string(e.value) << '\n';
}

const Rational* find_golden(const std::vector<GoldenEntry>& entries, const std::string& key) {
    for (const auto& e : entries) {
        if (e.key == key) return &e.value;
    }
    return nullptr;
}

}  // namespace perc
