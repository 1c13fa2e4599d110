#include "perc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "perc/cluster.hpp"
#include "perc/events.hpp"
#include "perc/exponents.hpp"
#include "perc/oracle.hpp"
#include "perc/parallel.hpp"
#include "perc/report.hpp"
#include "perc/statistics.hpp"

namespace perc {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

int severity(int code) {
    // validation/cap failures outrank verdict failures when aggregating
    switch (code) {
        case exit_ok: return 0;
        case exit_within_noise: return 1;
        case exit_violated: return 2;
        case exit_cap_refused: return 3;
        case exit_validation: return 4;
        default: return 5;
    }
}

}  // namespace

ExperimentPlan ExperimentPlan::parse(const std::string& text, const std::string& source_name) {
    ExperimentPlan plan;
    plan.source = source_name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PlanError("plan line " + std::to_string(lineno) + " is not key = value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw PlanError("plan line " + std::to_string(lineno) + " has an empty key");
        if (plan.values.count(key)) throw PlanError("duplicate plan key '" + key + "'");
        plan.values[key] = value;
    }
    auto it = plan.values.find("kind");
    if (it == plan.values.end()) throw PlanError("plan is missing the 'kind' key");
    plan.kind = it->second;
    return plan;
}

ExperimentPlan ExperimentPlan::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PlanError("cannot open plan file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), std::filesystem::path(path).stem().string());
}

std::string ExperimentPlan::get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw PlanError("plan is missing required key '" + key + "'");
    return it->second;
}

std::string ExperimentPlan::get_or(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

std::int64_t ExperimentPlan::get_int(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const std::int64_t out = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw PlanError("plan key '" + key + "' is not an integer: '" + v + "'");
    }
}

std::int64_t ExperimentPlan::get_int_or(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double ExperimentPlan::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw PlanError("plan key '" + key + "' is not a number: '" + v + "'");
    }
}

std::vector<std::int64_t> ExperimentPlan::get_int_list(const std::string& key) const {
    std::vector<std::int64_t> out;
    std::istringstream in(get(key));
    std::string part;
    while (std::getline(in, part, ',')) {
        part = trim(part);
        if (part.empty()) throw PlanError("plan key '" + key + "' has an empty list entry");
        out.push_back(std::stoll(part));
    }
    if (out.empty()) throw PlanError("plan key '" + key + "' is an empty list");
    return out;
}

std::vector<double> ExperimentPlan::get_double_list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get(key));
    std::string part;
    while (std::getline(in, part, ',')) {
        part = trim(part);
        if (part.empty()) throw PlanError("plan key '" + key + "' has an empty list entry");
        out.push_back(std::stod(part));
    }
    if (out.empty()) throw PlanError("plan key '" + key + "' is an empty list");
    return out;
}

namespace {

struct RunContext {
    const ExperimentPlan& plan;
    SeedSpec seed;
    int workers = 1;
    int dim = 2;
    std::string out_base;  // path without extension
    int verbosity = 0;

    CsvTable csv;
    Json json;
    int exit_code = exit_ok;
};

double resolve_p(const RunContext& ctx) {
    if (ctx.plan.has("p")) return ctx.plan.get_double("p");
    if (ctx.dim == 2) return kSitePcZ2;
    if (ctx.dim == 3) return kSitePcZ3;
    throw PlanError("plan needs an explicit p for d=" + std::to_string(ctx.dim));
}

Point plan_point(const RunContext& ctx, const std::string& key) {
    try {
        return point_from_string(ctx.plan.get(key), ctx.dim);
    } catch (const std::invalid_argument& e) {
        throw PlanError(std::string("plan key '") + key + "': " + e.what());
    }
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::satisfied: return exit_ok;
        case Verdict::violated: return exit_violated;
        case Verdict::violated_within_noise: return exit_within_noise;
    }
    return exit_validation;
}

Json estimate_json(const Estimate& e) {
    return Json{{"p_hat", e.p_hat}, {"hits", e.hits},       {"samples", e.samples},
                {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"stream_tag", e.stream_tag}};
}

Json report_json(const InequalityReport& r) {
    Json j{{"name", r.name},     {"lhs", r.lhs},       {"lhs_lo", r.lhs_lo}, {"lhs_hi", r.lhs_hi},
           {"rhs", r.rhs},       {"rhs_lo", r.rhs_lo}, {"rhs_hi", r.rhs_hi}, {"margin", r.margin},
           {"verdict", to_string(r.verdict)}, {"proxy_based", r.proxy_based}, {"samples", r.samples}};
    Json details = Json::object();
    for (const auto& [k, v] : r.details) details[k] = v;
    j["details"] = details;
    return j;
}

void report_csv_row(RunContext& ctx, const InequalityReport& r) {
    ctx.csv.rows.push_back({r.name, fmt_double(r.lhs), fmt_double(r.lhs_lo), fmt_double(r.lhs_hi), fmt_double(r.rhs),
                            fmt_double(r.rhs_lo), fmt_double(r.rhs_hi), fmt_double(r.margin), to_string(r.verdict),
                            r.proxy_based ? "1" : "0"});
}

void inequality_csv_header(RunContext& ctx, const std::string& tag) {
    ctx.csv.format_tag = tag;
    ctx.csv.columns = {"check", "lhs", "lhs_lo", "lhs_hi", "rhs", "rhs_lo", "rhs_hi", "margin", "verdict", "proxy_based"};
}

EventSpec event_from_plan(const RunContext& ctx) {
    const std::string name = ctx.plan.get("event");
    EventSpec spec;
    spec.dim = ctx.dim;
    if (name == "two_arms_site") {
        spec.kind = EventSpec::Kind::two_arms_site;
        spec.n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        if (ctx.plan.has("a")) spec.a = plan_point(ctx, "a");
    } else if (name == "two_arms_box") {
        spec.kind = EventSpec::Kind::two_arms_box;
        spec.n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        spec.l = static_cast<std::int32_t>(ctx.plan.get_int("l"));
    } else if (name == "two_arms_pair") {
        spec.kind = EventSpec::Kind::two_arms_pair;
        spec.n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        spec.l = static_cast<std::int32_t>(ctx.plan.get_int("l"));
        spec.a = plan_point(ctx, "a");
        spec.b = plan_point(ctx, "b");
    } else if (name == "connected") {
        spec.kind = EventSpec::Kind::connected;
        spec.n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        spec.a = plan_point(ctx, "a");
        spec.b = plan_point(ctx, "b");
    } else if (name == "origin_to_boundary") {
        spec.kind = EventSpec::Kind::origin_to_boundary;
        spec.n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
    } else if (name == "site_open") {
        spec.kind = EventSpec::Kind::site_open;
        spec.n = static_cast<std::int32_t>(ctx.plan.get_int_or("n", 1));
        if (ctx.plan.has("a")) spec.a = plan_point(ctx, "a");
    } else if (name == "always_true") {
        spec.kind = EventSpec::Kind::always_true;
    } else if (name == "always_false") {
        spec.kind = EventSpec::Kind::always_false;
    } else {
        throw PlanError("unknown event '" + name + "'");
    }
    return spec;
}

void run_estimate(RunContext& ctx) {
    const double p = resolve_p(ctx);
    const std::int64_t samples = ctx.plan.get_int("samples");
    if (samples < 1) throw PlanError("samples must be >= 1");
    EventSpec spec = event_from_plan(ctx);

    std::vector<std::int64_t> grid;
    if (ctx.plan.has("grid"))
        grid = ctx.plan.get_int_list("grid");
    else
        grid.push_back(spec.n);

    ctx.csv.format_tag = "perc.estimate.v1";
    ctx.csv.columns = {"n", "p", "p_hat", "ci_low", "ci_high", "hits", "samples", "ln_n", "minus_ln_p_hat"};
    Json results = Json::array();
    std::vector<std::pair<double, Estimate>> points;
    for (std::int64_t n : grid) {
        spec.n = static_cast<std::int32_t>(n);
        const Estimate e = estimate_probability(spec, p, samples, ctx.seed, ctx.workers);
        points.emplace_back(static_cast<double>(n), e);
        ctx.csv.rows.push_back({fmt_int(n), fmt_double(p), fmt_double(e.p_hat), fmt_double(e.ci_low),
                                fmt_double(e.ci_high), fmt_int(e.hits), fmt_int(e.samples),
                                fmt_double(std::log(static_cast<double>(n))),
                                e.p_hat > 0 ? fmt_double(-std::log(e.p_hat)) : ""});
        Json row = estimate_json(e);
        row["n"] = n;
        row["event"] = spec.name();
        results.push_back(row);
    }
    ctx.json["results"] = results;
    if (points.size() >= 3 && std::all_of(points.begin(), points.end(), [](const auto& q) { return q.second.p_hat > 0; })) {
        const FitResult fit = fit_exponent(points);
        ctx.json["fit"] = Json{{"slope", fit.slope}, {"stderr", fit.stderr_slope}, {"intercept", fit.intercept}};
    }
}

void run_verify(RunContext& ctx) {
    const std::string check = ctx.plan.get("check");
    const double p = resolve_p(ctx);
    if (check == "central") {
        const auto n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        const auto l = static_cast<std::int32_t>(ctx.plan.get_int("l"));
        const std::int64_t samples = ctx.plan.get_int("samples");
        const InequalityReport r = check_central_inequality(ctx.dim, n, l, p, samples, ctx.seed, ctx.workers);
        inequality_csv_header(ctx, "perc.verify.central.v1");
        report_csv_row(ctx, r);
        ctx.json["results"] = Json::array({report_json(r)});
        ctx.exit_code = verdict_exit(r.verdict);
    } else if (check == "hoeffding") {
        const auto n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        const auto l = static_cast<std::int32_t>(ctx.plan.get_int("l"));
        const std::int64_t samples = ctx.plan.get_int("samples");
        const std::vector<double> t_grid =
            ctx.plan.has("t_grid") ? ctx.plan.get_double_list("t_grid") : std::vector<double>{2.0, 4.0, 8.0};
        const Point x = ctx.plan.has("x") ? plan_point(ctx, "x") : Point{};
        const HoeffdingReport r = hoeffding_tail_report(ctx.dim, n, l, p, x, t_grid, samples, ctx.seed, ctx.workers);
        ctx.csv.format_tag = "perc.verify.hoeffding.v1";
        ctx.csv.columns = {"t", "k", "hits", "frequency", "bound", "stderr", "flagged"};
        Json cells = Json::array();
        for (const auto& c : r.cells) {
            ctx.csv.rows.push_back({fmt_double(c.t), fmt_int(c.k), fmt_int(c.hits), fmt_double(c.frequency),
                                    fmt_double(c.bound), fmt_double(c.stderr_freq), c.flagged ? "1" : "0"});
            cells.push_back(Json{{"t", c.t},
                                 {"k", c.k},
                                 {"hits", c.hits},
                                 {"frequency", c.frequency},
                                 {"bound", c.bound},
                                 {"stderr", c.stderr_freq},
                                 {"flagged", c.flagged}});
        }
        ctx.json["results"] = cells;
        ctx.json["any_flagged"] = r.any_flagged;
        ctx.exit_code = r.any_flagged ? exit_violated : exit_ok;
    } else if (check == "goodbad") {
        const auto n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        const auto k = static_cast<std::int32_t>(ctx.plan.get_int("k"));
        const auto l = static_cast<std::int32_t>(ctx.plan.get_int("l"));
        const std::int64_t configs = ctx.plan.get_int("samples");
        const std::vector<BoxSpec> covering = build_covering(ctx.dim, n, k);
        const BoxSpec box = BoxSpec::lambda(ctx.dim, n + l);
        const std::uint64_t tag = fnv1a("goodbad(n=" + std::to_string(n) + ",k=" + std::to_string(k) +
                                        ",l=" + std::to_string(l) + ",d=" + std::to_string(ctx.dim) + ")");
        struct Tally {
            std::int64_t bound_violations = 0, membership_violations = 0, cap_violations = 0;
            std::int64_t good = 0, bad = 0;
        };
        std::vector<Tally> tallies(static_cast<std::size_t>(std::max(ctx.workers, 1)));
        run_sharded(configs, ctx.workers, [&](int shard, std::int64_t begin, std::int64_t end) {
            EventWork work;
            Tally t;
            const std::int64_t cap = internal_boundary_size(ctx.dim, n);
            for (std::int64_t i = begin; i < end; ++i) {
                const Configuration config =
                    Configuration::sample(box, p, ctx.seed, static_cast<std::uint64_t>(i), tag);
                const GoodBadResult r = count_good_bad(config, covering, work);
                t.good += r.good;
                t.bad += r.bad;
                if (!r.bound_holds) ++t.bound_violations;
                if (r.crossing_count > cap) ++t.cap_violations;
                const CrossingClusters crossing = crossing_clusters(work.labeling, n);
                const auto counts = closure_membership_counts(work.labeling, crossing);
                for (std::int32_t c : counts) {
                    if (c > 2 * ctx.dim) {
                        ++t.membership_violations;
                        break;
                    }
                }
            }
            tallies[static_cast<std::size_t>(shard)] = t;
        });
        Tally total;
        for (const Tally& t : tallies) {
            total.bound_violations += t.bound_violations;
            total.membership_violations += t.membership_violations;
            total.cap_violations += t.cap_violations;
            total.good += t.good;
            total.bad += t.bad;
        }
        ctx.csv.format_tag = "perc.verify.goodbad.v1";
        ctx.csv.columns = {"configs", "good_total", "bad_total", "bound_violations", "membership_violations",
                           "cap_violations"};
        ctx.csv.rows.push_back({fmt_int(configs), fmt_int(total.good), fmt_int(total.bad),
                                fmt_int(total.bound_violations), fmt_int(total.membership_violations),
                                fmt_int(total.cap_violations)});
        ctx.json["results"] = Json{{"configs", configs},
                                   {"good_total", total.good},
                                   {"bad_total", total.bad},
                                   {"bound_violations", total.bound_violations},
                                   {"membership_violations", total.membership_violations},
                                   {"cap_violations", total.cap_violations}};
        const bool ok = total.bound_violations == 0 && total.membership_violations == 0 && total.cap_violations == 0;
        ctx.exit_code = ok ? exit_ok : exit_violated;
    } else if (check == "distant") {
        const auto n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        const auto l = static_cast<std::int32_t>(ctx.plan.get_int("l"));
        const auto k = static_cast<std::int32_t>(ctx.plan.get_int("k"));
        const Point a = plan_point(ctx, "a");
        const Point b = plan_point(ctx, "b");
        const std::int64_t samples = ctx.plan.get_int("samples");
        const InequalityReport r =
            distant_two_arms_report(ctx.dim, n, a, b, l, k, p, samples, ctx.seed, ctx.workers);
        inequality_csv_header(ctx, "perc.verify.distant.v1");
        report_csv_row(ctx, r);
        ctx.json["results"] = Json::array({report_json(r)});
        ctx.exit_code = verdict_exit(r.verdict);
    } else if (check == "clb") {
        const auto n = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        const auto l = static_cast<std::int32_t>(ctx.plan.get_int("l"));
        const Point x = plan_point(ctx, "x");
        const Point y = plan_point(ctx, "y");
        const auto proxy_m = static_cast<std::int32_t>(ctx.plan.get_int_or("proxy_m", 32));
        const std::int64_t samples = ctx.plan.get_int("samples");
        const InequalityReport r = clb_report(ctx.dim, p, n, l, x, y, proxy_m, samples, ctx.seed, ctx.workers);
        inequality_csv_header(ctx, "perc.verify.clb.v1");
        report_csv_row(ctx, r);
        ctx.json["results"] = Json::array({report_json(r)});
        ctx.exit_code = verdict_exit(r.verdict);
    } else {
        throw PlanError("unknown verify check '" + check + "'");
    }
}

void run_oracle(RunContext& ctx) {
    const std::string suite = ctx.plan.get_or("suite", "identities");
    const bool allow_large = ctx.plan.get_int_or("allow_large", 0) != 0;
    if (suite == "identities") {
        const auto n = static_cast<std::int32_t>(ctx.plan.get_int_or("n", 1));
        const auto l = static_cast<std::int32_t>(ctx.plan.get_int_or("l", 0));
        std::vector<Rational> ps;
        {
            std::istringstream in(ctx.plan.get_or("ps", "1/3,1/2,2/3"));
            std::string part;
            while (std::getline(in, part, ',')) ps.push_back(rational_from_string(trim(part)));
        }
        const IdentityScan scan = identity_scan(ctx.dim, n, l, ctx.workers, allow_large);
        ctx.csv.format_tag = "perc.oracle.identities.v1";
        ctx.csv.columns = {"p", "identity", "difference", "exact_zero"};
        Json results = Json::array();
        bool all_zero = true;
        for (const Rational& p : ps) {
            const Rational d1 = scan.expected_reach_open(p) - p * scan.expected_both(p);
            const Rational d2 = scan.expected_reach_closed(p) - (Rational(1) - p) * scan.expected_both(p);
            const Rational d3 = scan.expected_balance(p);
            const std::pair<std::string, Rational> rows[] = {
                {"E_open_minus_p_E_both", d1}, {"E_closed_minus_q_E_both", d2}, {"E_balance", d3}};
            for (const auto& [name, diff] : rows) {
                const bool zero = diff == 0;
                all_zero = all_zero && zero;
                ctx.csv.rows.push_back({to_string(p), name, to_string(diff), zero ? "1" : "0"});
                results.push_back(Json{{"p", to_string(p)}, {"identity", name}, {"difference", to_string(diff)},
                                       {"exact_zero", zero}});
            }
        }
        ctx.json["results"] = results;
        ctx.exit_code = all_zero ? exit_ok : exit_violated;
    } else if (suite == "two_arms") {
        const auto radius = static_cast<std::int32_t>(ctx.plan.get_int("n"));
        const Rational p = rational_from_string(ctx.plan.get_or("p", "1/2"));
        const bool incremental = ctx.plan.get_int_or("incremental", 0) != 0;
        const Rational value = exact_two_arms_probability(ctx.dim, radius, p, ctx.workers, incremental, allow_large);
        ctx.csv.format_tag = "perc.oracle.two_arms.v1";
        ctx.csv.columns = {"n", "p", "probability"};
        ctx.csv.rows.push_back({fmt_int(radius), to_string(p), to_string(value)});
        ctx.json["results"] = Json::array({Json{{"n", radius}, {"p", to_string(p)}, {"value", to_string(value)}}});
    } else if (suite == "golden") {
        // the standard small-box golden set; optionally checked against a fixture
        std::vector<GoldenEntry> entries;
        const Rational half(1, 2);
        EnumerationPlan plan9{BoxSpec::lambda(2, 1), half};
        entries.push_back({"p(origin_open),d=2,n=1,p=1/2",
                           exact_probability(plan9, [](const Configuration& c) { return c.open(Point{0, 0}); },
                                             ctx.workers)});
        entries.push_back({"p(all_open),d=2,n=1,p=1/2",
                           exact_probability(plan9, [](const Configuration& c) { return c.open_count() == c.volume(); },
                                             ctx.workers)});
        entries.push_back({"p(two_arms(0,1)),d=2,p=1/2", exact_two_arms_probability(2, 1, half, ctx.workers)});
        entries.push_back({"p(two_arms(0,1)),d=2,p=1/3", exact_two_arms_probability(2, 1, Rational(1, 3), ctx.workers)});
        ctx.csv.format_tag = "perc.golden.v1";
        ctx.csv.columns = {"key", "value"};
        Json results = Json::array();
        bool matches = true;
        std::vector<GoldenEntry> fixture;
        if (ctx.plan.has("fixture")) fixture = load_golden_csv(ctx.plan.get("fixture"));
        for (const auto& e : entries) {
            ctx.csv.rows.push_back({e.key, to_string(e.value)});
            Json row{{"key", e.key}, {"value", to_string(e.value)}};
            if (!fixture.empty()) {
                const Rational* expected = find_golden(fixture, e.key);
                const bool ok = expected != nullptr && *expected == e.value;
                row["matches_fixture"] = ok;
                matches = matches && ok;
            }
            results.push_back(row);
        }
        ctx.json["results"] = results;
        ctx.exit_code = matches ? exit_ok : exit_violated;
    } else {
        throw PlanError("unknown oracle suite '" + suite + "'");
    }
}

void run_exponents(RunContext& ctx) {
    const int d_min = static_cast<int>(ctx.plan.get_int_or("d_min", 2));
    const int d_max = static_cast<int>(ctx.plan.get_int_or("d_max", 5));
    if (d_min < 2 || d_max < d_min) throw PlanError("need 2 <= d_min <= d_max");
    ctx.csv.format_tag = "perc.exponents.v1";
    ctx.csv.columns = {"d",        "gamma_limit", "sm_threshold", "sm_alpha",
                       "tm_threshold", "tm_alpha", "ftwoarms_exponent", "connect_exponent"};
    Json results = Json::array();
    for (int d = d_min; d <= d_max; ++d) {
        const ExponentTable t = exponent_table(d);
        ctx.csv.rows.push_back({fmt_int(d), to_string(t.gamma_limit), to_string(t.sm_threshold), fmt_int(t.sm_alpha),
                                to_string(t.tm_threshold), fmt_int(t.tm_alpha), to_string(t.ftwoarms_exponent),
                                to_string(t.connect_exponent)});
        results.push_back(Json{{"d", d},
                               {"gamma_limit", to_string(t.gamma_limit)},
                               {"sm_threshold", to_string(t.sm_threshold)},
                               {"sm_alpha", t.sm_alpha},
                               {"tm_threshold", to_string(t.tm_threshold)},
                               {"tm_alpha", t.tm_alpha},
                               {"ftwoarms_exponent", to_string(t.ftwoarms_exponent)},
                               {"connect_exponent", to_string(t.connect_exponent)}});
    }
    ctx.json["results"] = results;
}

void run_fit(RunContext& ctx) {
    std::vector<std::pair<double, Estimate>> points;
    std::istringstream in(ctx.plan.get("points"));
    std::string part;
    while (std::getline(in, part, ',')) {
        part = trim(part);
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw PlanError("fit point '" + part + "' is not n:p_hat");
        const double n = std::stod(part.substr(0, colon));
        const double phat = std::stod(part.substr(colon + 1));
        Estimate e;
        e.p_hat = phat;
        e.samples = 1;
        points.emplace_back(n, e);
    }
    FitResult fit;
    try {
        fit = fit_exponent(points);
    } catch (const std::invalid_argument& e) {
        throw PlanError(e.what());
    }
    ctx.csv.format_tag = "perc.fit.v1";
    ctx.csv.columns = {"slope", "stderr", "intercept"};
    ctx.csv.rows.push_back({fmt_double(fit.slope), fmt_double(fit.stderr_slope), fmt_double(fit.intercept)});
    ctx.json["results"] = Json{{"slope", fit.slope}, {"stderr", fit.stderr_slope}, {"intercept", fit.intercept}};
}

}  // namespace

int run_plan(const ExperimentPlan& plan, const RunOverrides& overrides) {
    const auto started = std::chrono::steady_clock::now();
    RunContext ctx{plan, SeedSpec{}, 1, 2, "", overrides.verbosity, CsvTable{}, Json::object(), exit_ok};
    try {
        ctx.seed.global_seed =
            overrides.seed ? *overrides.seed : static_cast<std::uint64_t>(plan.get_int_or("seed", 1));
        ctx.workers = overrides.workers ? *overrides.workers
                                        : static_cast<int>(plan.get_int_or("workers", hardware_workers()));
        if (ctx.workers < 1) throw PlanError("workers must be >= 1");
        ctx.dim = static_cast<int>(plan.get_int_or("d", 2));
        if (ctx.dim < kMinDim || ctx.dim > kMaxDim) throw PlanError("d must be in [2,4]");

        const std::string stem = plan.get_or("out", plan.source.empty() ? "results" : plan.source);
        const std::filesystem::path dir = overrides.out_dir ? *overrides.out_dir : ".";
        std::filesystem::create_directories(dir);
        ctx.out_base = (dir / stem).string();

        ctx.json["format"] = "perc.results.v1";
        ctx.json["kind"] = plan.kind;
        Json plan_echo = Json::object();
        for (const auto& [k, v] : plan.values) plan_echo[k] = v;
        ctx.json["plan"] = plan_echo;
        ctx.json["seed"] = ctx.seed.global_seed;

        if (plan.kind == "estimate")
            run_estimate(ctx);
        else if (plan.kind == "verify")
            run_verify(ctx);
        else if (plan.kind == "oracle")
            run_oracle(ctx);
        else if (plan.kind == "exponents")
            run_exponents(ctx);
        else if (plan.kind == "fit")
            run_fit(ctx);
        else
            throw PlanError("unknown experiment kind '" + plan.kind + "'");

        ctx.json["exit_code"] = ctx.exit_code;
        write_text_file(ctx.out_base + ".csv", render_csv(ctx.csv));
        write_text_file(ctx.out_base + ".json", ctx.json.dump(2) + "\n");
        if (overrides.verbosity > 0) {
            const auto elapsed =
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
            std::cerr << "[perc] " << plan.kind << " '" << plan.source << "' finished in " << elapsed.count()
                      << " ms, exit " << ctx.exit_code << "\n";
        }
        return ctx.exit_code;
    } catch (const PlanError& e) {
        std::cerr << "plan error: " << e.what() << "\n";
        return exit_validation;
    } catch (const ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return exit_cap_refused;
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return exit_validation;
    }
}

int run_plan_path(const std::string& path, const RunOverrides& overrides) {
    namespace fs = std::filesystem;
    if (fs::is_directory(path)) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".plan") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            std::cerr << "no .plan files in " << path << "\n";
            return exit_validation;
        }
        int worst = exit_ok;
        for (const std::string& f : files) {
            const int code = run_plan_path(f, overrides);
            if (severity(code) > severity(worst)) worst = code;
        }
        return worst;
    }
    try {
        return run_plan(ExperimentPlan::parse_file(path), overrides);
    } catch (const PlanError& e) {
        std::cerr << "plan error: " << e.what() << "\n";
        return exit_validation;
    }
}

}  // namespace perc
