#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perc {

// Exit codes of the experiment runner.
enum ExitCode : int {
    exit_ok = 0,                // success / every verdict satisfied
    exit_violated = 1,          // a checked inequality reported "violated"
    exit_validation = 2,        // malformed plan or parameter out of range
    exit_cap_refused = 3,       // enumeration size beyond the configured cap
    exit_within_noise = 4,      // "violated-within-noise": overlapping intervals only
};

struct PlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A flat key-value experiment description, one experiment per file.
// '#' starts a comment; keys and values are trimmed.
struct ExperimentPlan {
    std::string kind;
    std::map<std::string, std::string> values;
    std::string source;  // file stem, used to name outputs

    static ExperimentPlan parse(const std::string& text, const std::string& source_name);
    static ExperimentPlan parse_file(const std::string& path);

    bool has(const std::string& key) const { return values.count(key) != 0; }
    std::string get(const std::string& key) const;                      // throws PlanError when missing
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    int verbosity = 0;
};

// Executes one plan (or, for a directory, every *.plan file in filename
// order, returning the most severe exit code). Writes <out>.csv and
// <out>.json next to the plan or under the override directory.
int run_plan(const ExperimentPlan& plan, const RunOverrides& overrides);
int run_plan_path(const std::string& path, const RunOverrides& overrides);

}  // namespace perc
