#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hatdfed/config.hpp"

namespace hatdfed::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // usage / config / validation errors
inline constexpr int kExitRuntime = 2;  // runtime failures
inline constexpr int kExitPartial = 3;  // sweep finished with some failed runs

// Named experiment presets; unknown name throws listing the known ones.
SimConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

struct SweepSpec {
    std::string parameter;  // alpha | beta | gamma | lambda_dir | rho
    std::vector<double> values;
    int repeats = 1;
    std::string base_config;  // config file path; empty = table1-desk preset
};

SweepSpec parse_sweep_spec(const std::string& text);
SweepSpec load_sweep_spec(const std::string& path);
std::vector<std::string> validate_sweep_spec(const SweepSpec& spec);

struct RunOptions {
    std::string config_path;        // mutually exclusive with preset
    std::string preset;             // empty = read config_path
    std::string strategy = "hat-dfed";
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides config seed
    bool chart = false;
};

// Writes rounds.csv, energy.csv, summary.txt (and chart.svg when asked).
int cmd_run(const RunOptions& opt, std::ostream& err);

struct SweepOptions {
    std::string spec_path;
    std::string out_dir = ".";
    std::string strategy = "hat-dfed";
    std::optional<std::uint64_t> seed;  // base seed; repeat r uses seed + r
};

// Writes per-run directories plus sweep_runs.csv / sweep_agg.csv.
int cmd_sweep(const SweepOptions& opt, std::ostream& err);

struct BanditBenchOptions {
    std::string env_path;            // utility table file; empty = generator
    std::string generator = "fixed-gap";
    int n_rounds = 1000;
    int n_servers = 5;               // arms = N(N-1)
    int m = 6;
    double eta = 0.0;                // 0 = tuned per the regret bound
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

// Writes regret.csv and regret_summary.csv; prints the bound comparison.
int cmd_bandit_bench(const BanditBenchOptions& opt, std::ostream& out, std::ostream& err);

int cmd_report(const std::string& rounds_csv, const std::string& energy_csv,
               const std::string& out_svg, std::ostream& err);

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace hatdfed::cli
