#include "perc/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "perc/parallel.hpp"

namespace perc {

namespace {

constexpr double kZ95 = 1.959963984540054;

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie strictly inside (0,1)");
}

}  // namespace

double occupancy_balance(std::int64_t closed_count, std::int64_t open_count, double p) {
    check_p(p);
    return static_cast<double>(closed_count) / (1.0 - p) - static_cast<double>(open_count) / p;
}

Rational occupancy_balance_exact(std::int64_t closed_count, std::int64_t open_count, const Rational& p) {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie strictly inside (0,1)");
    return rational(closed_count) / (Rational(1) - p) - rational(open_count) / p;
}

double occupancy_balance(const std::vector<std::int64_t>& sites, const Configuration& config, double p) {
    std::int64_t open = 0;
    for (std::int64_t i : sites) open += config.open(i) ? 1 : 0;
    return occupancy_balance(static_cast<std::int64_t>(sites.size()) - open, open, p);
}

// --- frontier sets ----------------------------------------------------------

namespace {

// Does some in-box neighbour of x reach the internal boundary of the box by
// an open path that never uses x? Computed by relabeling with x masked out;
// only needed when x is open (closed sites block no path).
bool reaches_boundary_avoiding(const Configuration& config, std::int64_t x_index) {
    const BoxSpec& box = config.box();
    const int dim = box.dim();
    const std::int64_t volume = box.volume();
    std::vector<std::int32_t> parent(static_cast<std::size_t>(volume));
    for (std::int64_t i = 0; i < volume; ++i) parent[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    auto open_masked = [&](std::int64_t i) { return i != x_index && config.open(i); };
    auto find = [&](std::int32_t i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    for (SiteCursor it(box); it.valid(); it.advance()) {
        const std::int64_t i = it.index();
        if (!open_masked(i)) continue;
        for (int a = 0; a < dim; ++a) {
            if (it.point()[a] >= box.hi(a)) continue;
            const std::int64_t j = i + box.axis_stride(a);
            if (!open_masked(j)) continue;
            const std::int32_t ri = find(static_cast<std::int32_t>(i));
            const std::int32_t rj = find(static_cast<std::int32_t>(j));
            if (ri != rj) parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
        }
    }
    std::vector<std::uint8_t> reach(static_cast<std::size_t>(volume), 0);
    for (SiteCursor it(box); it.valid(); it.advance()) {
        if (!box.on_internal_boundary(it.point())) continue;
        const std::int64_t i = it.index();
        if (open_masked(i)) reach[static_cast<std::size_t>(find(static_cast<std::int32_t>(i)))] = 1;
    }
    const Point x = box.site_at(x_index);
    for (const Point& q : neighbors(x, dim)) {
        if (!box.contains(q)) continue;
        const std::int64_t qi = box.index_of(q);
        if (open_masked(qi) && reach[static_cast<std::size_t>(find(static_cast<std::int32_t>(qi)))]) return true;
    }
    return false;
}

}  // namespace

FrontierSets frontier_sets(const Configuration& config, std::int32_t inner_radius, EventWork& work) {
    const BoxSpec& box = config.box();
    const int dim = box.dim();
    if (inner_radius < 0 || inner_radius > box.radius())
        throw std::invalid_argument("inner radius must lie within the configuration's box");
    const BoxSpec inner(dim, box.center(), inner_radius);
    const std::int32_t l = box.radius() - inner_radius;

    work.labeling.assign(config);
    const std::int64_t volume = box.volume();
    std::vector<std::uint8_t> reach(static_cast<std::size_t>(volume), 0);
    for (std::int64_t i : work.boundary_of(box)) {
        if (work.labeling.open(i)) reach[static_cast<std::size_t>(work.labeling.label_of(i))] = 1;
    }
    const CrossingClusters crossing = crossing_clusters(work.labeling, inner_radius);

    FrontierSets out;
    std::array<std::int64_t, 2 * kMaxDim> seen{};
    for (SiteCursor it(box); it.valid(); it.advance()) {
        if (!inner.contains(it.point())) continue;
        const std::int64_t i = it.index();
        if (work.labeling.open(i)) {
            bool member;
            if (l >= 1) {
                // equivalent to "some neighbour reaches the boundary without
                // using this site": the site's own cluster must reach
                member = reach[static_cast<std::size_t>(work.labeling.label_of(i))] != 0;
            } else {
                member = reaches_boundary_avoiding(config, i);
            }
            if (member) out.reach_open.push_back(i);
            continue;
        }
        bool has_reaching_neighbor = false;
        int crossing_adjacent = 0;
        for (int a = 0; a < dim; ++a) {
            for (int sgn : {-1, +1}) {
                if (sgn < 0 ? it.point()[a] <= box.lo(a) : it.point()[a] >= box.hi(a)) continue;
                const std::int64_t j = i + sgn * box.axis_stride(a);
                if (!work.labeling.open(j)) continue;
                const std::int64_t lab = work.labeling.label_of(j);
                has_reaching_neighbor = has_reaching_neighbor || reach[static_cast<std::size_t>(lab)] != 0;
                if (crossing.contains(lab)) {
                    bool dup = false;
                    for (int t = 0; t < crossing_adjacent; ++t) dup = dup || seen[static_cast<std::size_t>(t)] == lab;
                    if (!dup) seen[static_cast<std::size_t>(crossing_adjacent++)] = lab;
                }
            }
        }
        if (has_reaching_neighbor) out.reach_closed.push_back(i);
        if (crossing_adjacent >= 1) out.crossing_closed.push_back(i);
        if (crossing_adjacent >= 2) out.shared_closed.push_back(i);
    }
    return out;
}

// --- estimates ----------------------------------------------------------------

std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t samples) {
    if (samples <= 0) throw std::invalid_argument("interval requires samples >= 1");
    const double n = static_cast<double>(samples);
    const double phat = static_cast<double>(hits) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = kZ95 * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

double log_binom_pmf(std::int64_t k, std::int64_t n, double p) {
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1) + static_cast<double>(k) * std::log(p) +
           static_cast<double>(n - k) * std::log1p(-p);
}

double binom_cdf(std::int64_t k, std::int64_t n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return k >= n ? 1.0 : 0.0;
    double acc = 0.0;
    for (std::int64_t i = 0; i <= k; ++i) acc += std::exp(log_binom_pmf(i, n, p));
    return std::min(acc, 1.0);
}

double bisect_p(const std::function<double(double)>& f, double target, bool increasing) {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const bool above = f(mid) > target;
        if (above == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> clopper_pearson_interval(std::int64_t hits, std::int64_t samples, double confidence) {
    if (samples <= 0) throw std::invalid_argument("interval requires samples >= 1");
    if (hits < 0 || hits > samples) throw std::invalid_argument("hit count out of range");
    const double alpha = 1.0 - confidence;
    double lo = 0.0, hi = 1.0;
    if (hits > 0) {
        // largest p with P(X >= hits) <= alpha/2, i.e. P(X <= hits-1) >= 1 - alpha/2
        lo = bisect_p([&](double p) { return binom_cdf(hits - 1, samples, p); }, 1.0 - alpha / 2, false);
    }
    if (hits < samples) {
        hi = bisect_p([&](double p) { return binom_cdf(hits, samples, p); }, alpha / 2, false);
    }
    return {lo, hi};
}

Estimate make_estimate(std::int64_t hits, std::int64_t samples, std::uint64_t seed, std::uint64_t tag) {
    Estimate e;
    e.hits = hits;
    e.samples = samples;
    e.p_hat = samples > 0 ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0;
    const auto ci = wilson_interval(hits, samples);
    e.ci_low = ci.first;
    e.ci_high = ci.second;
    e.seed = seed;
    e.stream_tag = tag;
    return e;
}

// --- event specs ----------------------------------------------------------------

BoxSpec EventSpec::sample_box() const {
    switch (kind) {
        case Kind::two_arms_site:
            return BoxSpec(dim, a, n);
        case Kind::two_arms_box:
        case Kind::two_arms_pair:
            return BoxSpec::lambda(dim, n + l);
        case Kind::connected:
        case Kind::origin_to_boundary:
        case Kind::site_open:
        case Kind::always_true:
        case Kind::always_false:
            return BoxSpec::lambda(dim, n);
    }
    throw std::logic_error("unknown event kind");
}

bool EventSpec::evaluate(const Configuration& config, EventWork& work) const {
    switch (kind) {
        case Kind::two_arms_site:
            return two_arms_site(config, a, n, work);
        case Kind::two_arms_box:
            return two_arms_box(config, n, work);
        case Kind::two_arms_pair:
            return two_arms_pair(config, n, a, b, work);
        case Kind::connected:
            return connected_in_box(config, a, b, work);
        case Kind::origin_to_boundary: {
            const BoxSpec& box = config.box();
            const std::int64_t origin = box.index_of(Point{});
            if (!config.open(origin)) return false;
            work.labeling.assign(config);
            const std::int64_t lab = work.labeling.label_of(origin);
            for (std::int64_t i : work.boundary_of(box)) {
                if (work.labeling.open(i) && work.labeling.label_of(i) == lab) return true;
            }
            return false;
        }
        case Kind::site_open:
            return config.open(a);
        case Kind::always_true:
            return true;
        case Kind::always_false:
            return false;
    }
    throw std::logic_error("unknown event kind");
}

std::string EventSpec::name() const {
    auto pt = [this](const Point& p) { return to_string(p, dim); };
    switch (kind) {
        case Kind::two_arms_site:
            return "two_arms_site(x=" + pt(a) + ",n=" + std::to_string(n) + ",d=" + std::to_string(dim) + ")";
        case Kind::two_arms_box:
            return "two_arms_box(n=" + std::to_string(n) + ",l=" + std::to_string(l) + ",d=" + std::to_string(dim) + ")";
        case Kind::two_arms_pair:
            return "two_arms_pair(n=" + std::to_string(n) + ",l=" + std::to_string(l) + ",a=" + pt(a) + ",b=" + pt(b) +
                   ",d=" + std::to_string(dim) + ")";
        case Kind::connected:
            return "connected(n=" + std::to_string(n) + ",a=" + pt(a) + ",b=" + pt(b) + ",d=" + std::to_string(dim) + ")";
        case Kind::origin_to_boundary:
            return "origin_to_boundary(n=" + std::to_string(n) + ",d=" + std::to_string(dim) + ")";
        case Kind::site_open:
            return "site_open(a=" + pt(a) + ",n=" + std::to_string(n) + ",d=" + std::to_string(dim) + ")";
        case Kind::always_true:
            return "always_true";
        case Kind::always_false:
            return "always_false";
    }
    throw std::logic_error("unknown event kind");
}

std::uint64_t EventSpec::stream_tag() const { return fnv1a(name()); }

Estimate estimate_probability(const EventSpec& event, double p, std::int64_t samples, const SeedSpec& seed,
                              int workers) {
    check_p(p);
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    const BoxSpec box = event.sample_box();
    const std::uint64_t tag = event.stream_tag();
    std::vector<std::int64_t> hits(static_cast<std::size_t>(std::max(workers, 1)), 0);
    run_sharded(samples, workers, [&](int shard, std::int64_t begin, std::int64_t end) {
        EventWork work;
        std::int64_t h = 0;
        for (std::int64_t i = begin; i < end; ++i) {
            const Configuration config = Configuration::sample(box, p, seed, static_cast<std::uint64_t>(i), tag);
            if (event.evaluate(config, work)) ++h;
        }
        hits[static_cast<std::size_t>(shard)] = h;
    });
    std::int64_t total = 0;
    for (std::int64_t h : hits) total += h;
    return make_estimate(total, samples, seed.global_seed, tag);
}

// --- verdicts -------------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::satisfied:
            return "satisfied";
        case Verdict::violated_within_noise:
            return "violated-within-noise";
        case Verdict::violated:
            return "violated";
    }
    return "?";
}

Verdict verdict_for(double lhs, double lhs_hi, double rhs, double rhs_lo, double lhs_lo, double rhs_hi) {
    if (lhs <= rhs || lhs_hi <= rhs_lo) return Verdict::satisfied;
    if (lhs_lo > rhs_hi) return Verdict::violated;
    return Verdict::violated_within_noise;
}

// --- central inequality -----------------------------------------------------------

InequalityReport check_central_inequality(int dim, std::int32_t n, std::int32_t l, double p, std::int64_t samples,
                                          const SeedSpec& seed, int workers) {
    check_p(p);
    if (n < 2) throw std::invalid_argument("central inequality needs n >= 2 (ln n > 0)");
    if (l < 0) throw std::invalid_argument("annulus width must be >= 0");

    EventSpec lhs_event;
    lhs_event.kind = EventSpec::Kind::two_arms_site;
    lhs_event.dim = dim;
    lhs_event.n = 2 * n + l;
    lhs_event.a = Point{};
    const Estimate lhs = estimate_probability(lhs_event, p, samples, seed, workers);

    // E(sqrt of the crossing-cluster count) on Lambda(n+l)
    const BoxSpec box = BoxSpec::lambda(dim, n + l);
    const std::int64_t max_crossings = internal_boundary_size(dim, n);
    const std::uint64_t tag = fnv1a("central.crossings(n=" + std::to_string(n) + ",l=" + std::to_string(l) +
                                    ",d=" + std::to_string(dim) + ")");
    std::vector<std::vector<std::int64_t>> hists(static_cast<std::size_t>(std::max(workers, 1)));
    run_sharded(samples, workers, [&](int shard, std::int64_t begin, std::int64_t end) {
        ClusterLabeling labeling;
        std::vector<std::int64_t> hist(static_cast<std::size_t>(max_crossings + 1), 0);
        for (std::int64_t i = begin; i < end; ++i) {
            const Configuration config = Configuration::sample(box, p, seed, static_cast<std::uint64_t>(i), tag);
            labeling.assign(config);
            const std::int64_t c = crossing_clusters(labeling, n).count();
            ++hist[static_cast<std::size_t>(c)];
        }
        hists[static_cast<std::size_t>(shard)] = std::move(hist);
    });
    std::vector<std::int64_t> hist(static_cast<std::size_t>(max_crossings + 1), 0);
    for (const auto& h : hists) {
        for (std::size_t c = 0; c < h.size(); ++c) hist[c] += h[c];
    }
    double mean = 0.0;
    for (std::size_t c = 0; c < hist.size(); ++c)
        mean += static_cast<double>(hist[c]) * std::sqrt(static_cast<double>(c));
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (std::size_t c = 0; c < hist.size(); ++c) {
        const double dev = std::sqrt(static_cast<double>(c)) - mean;
        var += static_cast<double>(hist[c]) * dev * dev;
    }
    var /= static_cast<double>(samples - 1);
    const double se = std::sqrt(var / static_cast<double>(samples));

    const double volume_n = static_cast<double>(BoxSpec::lambda(dim, n).volume());
    const double coef = 2.0 * dim * std::log(static_cast<double>(n)) / std::sqrt(volume_n);
    const double pq = p * (1.0 - p);
    const double log_n = std::log(static_cast<double>(n));
    const double remainder = 4.0 * dim / pq * volume_n * volume_n * std::exp(-2.0 * log_n * log_n * pq * pq);

    InequalityReport r;
    r.name = "central_inequality(d=" + std::to_string(dim) + ",n=" + std::to_string(n) + ",l=" + std::to_string(l) + ")";
    r.lhs = lhs.p_hat;
    r.lhs_lo = lhs.ci_low;
    r.lhs_hi = lhs.ci_high;
    r.rhs = coef * mean + remainder;
    r.rhs_lo = coef * std::max(0.0, mean - kZ95 * se) + remainder;
    r.rhs_hi = coef * (mean + kZ95 * se) + remainder;
    r.margin = r.rhs - r.lhs;
    r.verdict = verdict_for(r.lhs, r.lhs_hi, r.rhs, r.rhs_lo, r.lhs_lo, r.rhs_hi);
    r.samples = samples;
    r.seed = seed.global_seed;
    r.details = {{"mean_sqrt_crossings", std::to_string(mean)},
                 {"se_sqrt_crossings", std::to_string(se)},
                 {"prefactor", std::to_string(coef)},
                 {"remainder", std::to_string(remainder)},
                 {"two_arms_radius", std::to_string(2 * n + l)}};
    return r;
}

// --- balance tail table ------------------------------------------------------------

HoeffdingReport hoeffding_tail_report(int dim, std::int32_t n, std::int32_t l, double p, const Point& x,
                                      const std::vector<double>& t_grid, std::int64_t samples, const SeedSpec& seed,
                                      int workers) {
    check_p(p);
    if (n < 1 || l < 0) throw std::invalid_argument("need n >= 1 and l >= 0");
    const BoxSpec box = BoxSpec::lambda(dim, n + l);
    const BoxSpec inner = BoxSpec::lambda(dim, n);
    if (!box.contains(x)) throw std::invalid_argument("x must lie in Lambda(n+l)");
    const std::int64_t inner_volume = inner.volume();
    const std::uint64_t tag = fnv1a("hoeffding(n=" + std::to_string(n) + ",l=" + std::to_string(l) + ",x=" +
                                    to_string(x, dim) + ",d=" + std::to_string(dim) + ")");

    // joint counts of (closure size k, open part) per sample
    const std::size_t stride = static_cast<std::size_t>(inner_volume + 1);
    std::vector<std::vector<std::int64_t>> joints(static_cast<std::size_t>(std::max(workers, 1)));
    run_sharded(samples, workers, [&](int shard, std::int64_t begin, std::int64_t end) {
        ClusterLabeling labeling;
        std::vector<std::int32_t> mark(static_cast<std::size_t>(box.volume()), -1);
        std::vector<std::int64_t> joint(stride * stride, 0);
        const std::int64_t xi = box.index_of(x);
        for (std::int64_t s = begin; s < end; ++s) {
            const Configuration config = Configuration::sample(box, p, seed, static_cast<std::uint64_t>(s), tag);
            labeling.assign(config);
            std::int64_t opens = 0, closures = 0;
            if (!labeling.open(xi)) {
                closures = inner.contains(x) ? 1 : 0;
            } else {
                const std::int64_t lab = labeling.label_of(xi);
                const std::int32_t epoch = static_cast<std::int32_t>(s - begin);
                for (SiteCursor it(box); it.valid(); it.advance()) {
                    const std::int64_t i = it.index();
                    if (labeling.label_of(i) != lab) continue;
                    if (inner.contains(it.point())) ++opens;
                    for (int a = 0; a < dim; ++a) {
                        for (int sgn : {-1, +1}) {
                            if (sgn < 0 ? it.point()[a] <= box.lo(a) : it.point()[a] >= box.hi(a)) continue;
                            const std::int64_t j = i + sgn * box.axis_stride(a);
                            if (labeling.open(j)) continue;
                            if (!inner.contains(box.site_at(j))) continue;
                            if (mark[static_cast<std::size_t>(j)] == epoch) continue;
                            mark[static_cast<std::size_t>(j)] = epoch;
                            ++closures;
                        }
                    }
                }
            }
            const std::int64_t k = opens + closures;
            ++joint[static_cast<std::size_t>(k) * stride + static_cast<std::size_t>(opens)];
        }
        joints[static_cast<std::size_t>(shard)] = std::move(joint);
    });
    std::vector<std::int64_t> joint(stride * stride, 0);
    for (const auto& j : joints) {
        for (std::size_t i = 0; i < j.size(); ++i) joint[i] += j[i];
    }

    HoeffdingReport report;
    report.samples = samples;
    report.seed = seed.global_seed;
    const double pq = p * (1.0 - p);
    for (double t : t_grid) {
        if (t < 0) throw std::invalid_argument("tail thresholds must be >= 0");
        for (std::int64_t k = 1; k <= inner_volume; ++k) {
            std::int64_t hits = 0;
            for (std::int64_t o = 0; o <= k; ++o) {
                if (std::abs(p * static_cast<double>(k) - static_cast<double>(o)) >= t * pq)
                    hits += joint[static_cast<std::size_t>(k) * stride + static_cast<std::size_t>(o)];
            }
            HoeffdingCell cell;
            cell.t = t;
            cell.k = k;
            cell.hits = hits;
            cell.frequency = static_cast<double>(hits) / static_cast<double>(samples);
            cell.bound = 2.0 * std::exp(-2.0 * pq * pq * t * t / static_cast<double>(k));
            cell.stderr_freq = std::sqrt(cell.frequency * (1.0 - cell.frequency) / static_cast<double>(samples));
            cell.flagged = cell.bound < 1.0 && cell.frequency > cell.bound + 4.0 * cell.stderr_freq;
            report.any_flagged = report.any_flagged || cell.flagged;
            report.cells.push_back(cell);
        }
    }
    return report;
}

// --- boundary covering --------------------------------------------------------------

std::vector<BoxSpec> build_covering(int dim, std::int32_t n, std::int32_t k) {
    if (k < 1 || k > n) throw std::invalid_argument("covering needs 1 <= k <= n");
    const std::int64_t side = 2 * static_cast<std::int64_t>(n) + 1;
    const std::int64_t tile = 2 * static_cast<std::int64_t>(k) + 1;
    const std::int32_t m = static_cast<std::int32_t>((side + tile - 1) / tile);
    std::vector<std::int32_t> centers(static_cast<std::size_t>(m));
    for (std::int32_t j = 0; j < m; ++j)
        centers[static_cast<std::size_t>(j)] = std::min<std::int32_t>(-n + k + j * (2 * k + 1), n - k);

    std::vector<BoxSpec> out;
    std::vector<std::int32_t> idx(static_cast<std::size_t>(dim), 0);
    while (true) {
        bool on_shell = false;
        for (int a = 0; a < dim; ++a) on_shell = on_shell || idx[static_cast<std::size_t>(a)] == 0 || idx[static_cast<std::size_t>(a)] == m - 1;
        if (on_shell) {
            Point c;
            for (int a = 0; a < dim; ++a) c[a] = centers[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
            out.emplace_back(dim, c, k);
        }
        int a = 0;
        while (a < dim && ++idx[static_cast<std::size_t>(a)] == m) idx[static_cast<std::size_t>(a++)] = 0;
        if (a == dim) break;
    }

    // cardinality bound of the construction: |I| * k^(d-1) <= 2d * (2n)^(d-1)
    std::int64_t lhs = static_cast<std::int64_t>(out.size());
    std::int64_t rhs = 2 * dim;
    for (int a = 0; a + 1 < dim; ++a) {
        lhs *= k;
        rhs *= 2 * static_cast<std::int64_t>(n);
    }
    if (lhs > rhs) throw std::logic_error("covering construction exceeded its cardinality bound");
    return out;
}

GoodBadResult count_good_bad(const Configuration& config, const std::vector<BoxSpec>& covering, EventWork& work) {
    if (covering.empty()) throw std::invalid_argument("covering must be nonempty");
    const BoxSpec& box = config.box();
    const int dim = box.dim();
    const std::int32_t k = covering.front().radius();
    std::int32_t n = 0;
    for (const BoxSpec& b : covering) {
        if (b.radius() != k) throw std::invalid_argument("covering boxes must share one radius");
        for (int a = 0; a < dim; ++a) n = std::max(n, std::abs(b.center()[a]) + k);
    }
    const std::int32_t l = box.radius() - n;
    if (l < 1) throw std::invalid_argument("good/bad classification needs annulus width >= 1");

    GoodBadResult out;
    EventWork sub_work;
    for (const BoxSpec& b : covering) {
        const Configuration sub = restrict_to_box(config, BoxSpec(dim, b.center(), k + l));
        if (two_arms_box(sub, k, sub_work))
            ++out.bad;
        else
            ++out.good;
    }
    work.labeling.assign(config);
    out.crossing_count = crossing_clusters(work.labeling, n).count();
    out.bound_holds = out.crossing_count <= out.good + internal_boundary_size(dim, k) * out.bad;
    return out;
}

// --- distant-site inequality -----------------------------------------------------------

InequalityReport distant_two_arms_report(int dim, std::int32_t n, const Point& a, const Point& b, std::int32_t l,
                                         std::int32_t k, double p, std::int64_t samples, const SeedSpec& seed,
                                         int workers) {
    check_p(p);
    if (k < 1 || k > l) throw std::invalid_argument("need 1 <= k <= l");
    if (l - k < 1) throw std::invalid_argument("need k <= l-1 so the reduced two-arms radius is positive");
    if (a == b) throw std::invalid_argument("pair sites must differ");

    EventSpec pair_event{EventSpec::Kind::two_arms_pair, dim, n, l, a, b};
    EventSpec site_event{EventSpec::Kind::two_arms_site, dim, static_cast<std::int32_t>(l - k), 0, Point{}, Point{}};
    EventSpec conn_event{EventSpec::Kind::connected, dim, static_cast<std::int32_t>(n + k), 0, a, b};

    const Estimate pair = estimate_probability(pair_event, p, samples, seed, workers);
    const Estimate site = estimate_probability(site_event, p, samples, seed, workers);
    const Estimate conn = estimate_probability(conn_event, p, samples, seed, workers);

    double coef = std::pow(3.0, 4.0 * dim) / p;
    coef *= std::pow(static_cast<double>(n + k), 2.0 * dim);

    const double inf = std::numeric_limits<double>::infinity();
    InequalityReport r;
    r.name = "distant_two_arms(d=" + std::to_string(dim) + ",n=" + std::to_string(n) + ",l=" + std::to_string(l) +
             ",k=" + std::to_string(k) + ")";
    r.lhs = pair.p_hat;
    r.lhs_lo = pair.ci_low;
    r.lhs_hi = pair.ci_high;
    r.rhs = conn.p_hat > 0 ? coef * site.p_hat / conn.p_hat : inf;
    r.rhs_lo = conn.ci_high > 0 ? coef * site.ci_low / conn.ci_high : inf;
    r.rhs_hi = conn.ci_low > 0 ? coef * site.ci_high / conn.ci_low : inf;
    r.margin = r.rhs - r.lhs;
    r.verdict = verdict_for(r.lhs, r.lhs_hi, r.rhs, r.rhs_lo, r.lhs_lo, r.rhs_hi);
    r.samples = samples;
    r.seed = seed.global_seed;
    r.details = {{"pair_p_hat", std::to_string(pair.p_hat)},
                 {"reduced_two_arms_p_hat", std::to_string(site.p_hat)},
                 {"connection_p_hat", std::to_string(conn.p_hat)},
                 {"prefactor", std::to_string(coef)}};
    return r;
}

// --- long-range order helpers -------------------------------------------------------------

Estimate theta_upper_proxy(int dim, double p, std::int32_t N, std::int64_t samples, const SeedSpec& seed,
                           int workers) {
    if (N < 1) throw std::invalid_argument("proxy radius must be >= 1");
    EventSpec event{EventSpec::Kind::origin_to_boundary, dim, N, 0, Point{}, Point{}};
    return estimate_probability(event, p, samples, seed, workers);
}

BestBoundarySite find_best_boundary_site(int dim, double p, std::int32_t n, std::int64_t samples,
                                         const SeedSpec& seed, int workers) {
    check_p(p);
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    const BoxSpec box = BoxSpec::lambda(dim, n);
    std::vector<std::int64_t> bsites;
    for (SiteCursor it(box); it.valid(); it.advance()) {
        if (box.on_internal_boundary(it.point())) bsites.push_back(it.index());
    }
    const std::uint64_t tag = fnv1a("best_boundary_site(n=" + std::to_string(n) + ",d=" + std::to_string(dim) + ")");
    struct Counts {
        std::vector<std::int64_t> per_site;
        std::int64_t reach = 0;
    };
    std::vector<Counts> all(static_cast<std::size_t>(std::max(workers, 1)));
    run_sharded(samples, workers, [&](int shard, std::int64_t begin, std::int64_t end) {
        ClusterLabeling labeling;
        Counts c;
        c.per_site.assign(bsites.size(), 0);
        const std::int64_t origin = box.index_of(Point{});
        for (std::int64_t s = begin; s < end; ++s) {
            const Configuration config = Configuration::sample(box, p, seed, static_cast<std::uint64_t>(s), tag);
            if (!config.open(origin)) continue;
            labeling.assign(config);
            const std::int64_t lab = labeling.label_of(origin);
            bool reached = false;
            for (std::size_t t = 0; t < bsites.size(); ++t) {
                if (labeling.open(bsites[t]) && labeling.label_of(bsites[t]) == lab) {
                    ++c.per_site[t];
                    reached = true;
                }
            }
            if (reached) ++c.reach;
        }
        all[static_cast<std::size_t>(shard)] = std::move(c);
    });
    std::vector<std::int64_t> per_site(bsites.size(), 0);
    std::int64_t reach = 0;
    for (const Counts& c : all) {
        reach += c.reach;
        for (std::size_t t = 0; t < bsites.size(); ++t) per_site[t] += c.per_site[t];
    }

    BestBoundarySite out;
    std::size_t best = 0;
    for (std::size_t t = 0; t < bsites.size(); ++t) {
        out.all.emplace_back(box.site_at(bsites[t]), make_estimate(per_site[t], samples, seed.global_seed, tag));
        if (per_site[t] > per_site[best]) best = t;
    }
    out.site = box.site_at(bsites[best]);
    out.estimate = out.all[best].second;
    out.origin_to_boundary = make_estimate(reach, samples, seed.global_seed, tag);
    // pathwise: sum over boundary sites of 1{0<->x} >= 1{0<->boundary}
    out.pigeonhole_holds =
        per_site[best] * static_cast<std::int64_t>(bsites.size()) >= reach;
    return out;
}

InequalityReport clb_report(int dim, double p, std::int32_t n, std::int32_t l, const Point& x, const Point& y,
                            std::int32_t proxy_m, std::int64_t samples, const SeedSpec& seed, int workers) {
    check_p(p);
    if (n < 1 || l < 1) throw std::invalid_argument("need n >= 1 and l >= 1");
    const BoxSpec inner = BoxSpec::lambda(dim, n);
    if (!inner.contains(x) || !inner.contains(y)) throw std::invalid_argument("x and y must lie in Lambda(n)");

    const Estimate theta = theta_upper_proxy(dim, p, proxy_m, samples, seed, workers);

    Estimate pair;
    if (x == y) {
        // the clusters of x and y coincide, so the pair event is impossible
        pair = make_estimate(0, samples, seed.global_seed, fnv1a("clb.pair.degenerate"));
        pair.ci_high = 0.0;
    } else {
        EventSpec pair_event{EventSpec::Kind::two_arms_pair, dim, n, l, x, y};
        pair = estimate_probability(pair_event, p, samples, seed, workers);
    }

    EventSpec conn_event{EventSpec::Kind::connected, dim, static_cast<std::int32_t>(n + l), 0, x, y};
    const Estimate conn = estimate_probability(conn_event, p, samples, seed, workers);

    InequalityReport r;
    r.name = "connection_lower_bound(d=" + std::to_string(dim) + ",n=" + std::to_string(n) + ",l=" + std::to_string(l) + ")";
    // the inequality is a lower bound on the connection probability; report
    // it as rhs <= lhs by swapping roles: lhs = proxy^2 - pair, rhs = conn
    r.lhs = theta.p_hat * theta.p_hat - pair.p_hat;
    r.lhs_lo = std::max(0.0, theta.ci_low * theta.ci_low - pair.ci_high);
    r.lhs_hi = theta.ci_high * theta.ci_high - pair.ci_low;
    r.rhs = conn.p_hat;
    r.rhs_lo = conn.ci_low;
    r.rhs_hi = conn.ci_high;
    r.margin = r.rhs - r.lhs;
    r.verdict = verdict_for(r.lhs, r.lhs_hi, r.rhs, r.rhs_lo, r.lhs_lo, r.rhs_hi);
    r.proxy_based = true;  // the percolation probability is replaced by an upper proxy
    r.samples = samples;
    r.seed = seed.global_seed;
    r.details = {{"theta_proxy", std::to_string(theta.p_hat)},
                 {"proxy_m", std::to_string(proxy_m)},
                 {"pair_p_hat", std::to_string(pair.p_hat)},
                 {"connection_p_hat", std::to_string(conn.p_hat)},
                 {"note", "proxy-based: theta replaced by an upper proxy; diagnostic only"}};
    return r;
}

// --- exponent fitting -------------------------------------------------------------------

FitResult fit_exponent(const std::vector<std::pair<double, Estimate>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit needs at least 3 points");
    std::vector<double> xs, ys;
    for (const auto& [n, est] : points) {
        if (!(n > 0)) throw std::invalid_argument("fit points need n > 0");
        if (!(est.p_hat > 0)) throw std::invalid_argument("fit points need positive estimates");
        xs.push_back(std::log(n));
        ys.push_back(-std::log(est.p_hat));
    }
    const double m = static_cast<double>(xs.size());
    double xbar = 0, ybar = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= m;
    ybar /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx == 0) throw std::invalid_argument("fit needs distinct n values");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ss_res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.stderr_slope = std::sqrt(ss_res / (m - 2.0) / sxx);
    return fit;
}

}  // namespace perc
