#pragma once

#include <string>
#include <vector>

#include "hatdfed/oracles.hpp"
#include "hatdfed/orchestrator.hpp"

namespace hatdfed {

// Column orders are stable interface; a header-contract test locks them.
inline constexpr const char* kRoundsCsvHeader = "round,server,acc,d_size";
inline constexpr const char* kEnergyServerHeader = "round,server,e_dt_J,e_cp_J";
inline constexpr const char* kEnergyLinkHeader = "round,src,dst,e_mt_J";
inline constexpr const char* kEnergySummaryHeader = "tot_cost_MJ,mt_cost_MJ";
inline constexpr const char* kRegretCsvHeader =
    "round,selected_utility,oracle_utility,cum_selected,cum_oracle,cum_regret";
inline constexpr const char* kRegretSummaryHeader = "R_K,bound,ratio";
inline constexpr const char* kSweepRunsHeader =
    "param,value,repeat,seed,avg_acc,var_acc,best_acc,worst_acc,tot_cost_MJ,mt_cost_MJ,status";
inline constexpr const char* kSweepAggHeader =
    "param,value,avg_acc_mean,avg_acc_std,tot_cost_MJ_mean,tot_cost_MJ_std,mt_cost_MJ_mean,"
    "mt_cost_MJ_std,n_ok,n_failed";

// Shortest round-trip decimal representation; byte-stable across runs.
std::string format_double(double v);

void write_rounds_csv(const std::string& path, const RunResult& res);

// Three sections, each with its own header: per-server rows, per-link rows,
// then a single summary row.
void write_energy_csv(const std::string& path, const RunResult& res);

void write_summary_report(const std::string& path, const RunResult& res);

void write_regret_csv(const std::string& path, const oracles::RegretResult& res);
void write_regret_summary_csv(const std::string& path, const oracles::RegretResult& res);

// Self-contained vector chart of mean accuracy and cumulative energy over
// rounds; no plotting dependency.
std::string render_chart_svg(const std::vector<double>& mean_acc,
                             const std::vector<double>& round_energy_J);
void write_chart_svg(const std::string& path, const RunResult& res);

// Re-renders the chart from previously emitted CSVs (report subcommand).
void render_chart_from_csv(const std::string& rounds_csv_path, const std::string& energy_csv_path,
                           const std::string& out_svg_path);

// K rounds x n_links whitespace-separated utility table, one round per line.
// Malformed input reports the offending row/column.
oracles::SyntheticBanditEnv load_utility_table(const std::string& path);
void save_utility_table(const std::string& path, const oracles::SyntheticBanditEnv& env);

}  // namespace hatdfed
