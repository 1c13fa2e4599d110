#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "perc/cli.hpp"
#include "perc/exponents.hpp"
#include "perc/rational.hpp"
#include "perc/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"percolation laboratory: batch experiment runner"};
    app.require_subcommand(1);

    // run: execute a plan file (or a directory of *.plan files)
    std::string plan_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> workers_override;
    std::optional<std::string> out_dir;
    int verbosity = 0;
    auto* run = app.add_subcommand("run", "execute an experiment plan");
    run->add_option("plan", plan_path, "plan file or directory of *.plan files")->required();
    run->add_option("--seed", seed_override, "override the plan's seed");
    run->add_option("--workers", workers_override, "override the worker count (outputs are unaffected)");
    run->add_option("--out", out_dir, "output directory (default: current directory)");
    run->add_flag_function("-v,--verbose", [&](std::int64_t n) { verbosity = static_cast<int>(n); },
                           "log timings to stderr");

    // exponents: print the exact exponent table for a dimension range
    int d_min = 2, d_max = 5;
    std::string csv_path;
    auto* exps = app.add_subcommand("exponents", "print the exact exponent table");
    exps->add_option("--d-min", d_min, "lowest dimension")->check(CLI::Range(2, 64));
    exps->add_option("--d-max", d_max, "highest dimension")->check(CLI::Range(2, 64));
    exps->add_option("--csv", csv_path, "also write the table as CSV");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        perc::RunOverrides overrides;
        overrides.seed = seed_override;
        overrides.workers = workers_override;
        overrides.out_dir = out_dir;
        overrides.verbosity = verbosity;
        return perc::run_plan_path(plan_path, overrides);
    }

    if (d_max < d_min) {
        std::cerr << "need d-min <= d-max\n";
        return perc::exit_validation;
    }
    perc::CsvTable table;
    table.format_tag = "perc.exponents.v1";
    table.columns = {"d",        "gamma_limit", "sm_threshold", "sm_alpha",
                     "tm_threshold", "tm_alpha", "ftwoarms_exponent", "connect_exponent"};
    for (int d = d_min; d <= d_max; ++d) {
        const perc::ExponentTable t = perc::exponent_table(d);
        table.rows.push_back({std::to_string(d), perc::to_string(t.gamma_limit), perc::to_string(t.sm_threshold),
                              std::to_string(t.sm_alpha), perc::to_string(t.tm_threshold), std::to_string(t.tm_alpha),
                              perc::to_string(t.ftwoarms_exponent), perc::to_string(t.connect_exponent)});
    }
    const std::string rendered = perc::render_csv(table);
    std::cout << rendered;
    if (!csv_path.empty()) perc::write_text_file(csv_path, rendered);
    return perc::exit_ok;
}
