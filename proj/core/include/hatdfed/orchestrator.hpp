#pragma once

#include <map>
#include <string>
#include <vector>

#include "hatdfed/aggregation.hpp"
#include "hatdfed/bandit.hpp"
#include "hatdfed/config.hpp"
#include "hatdfed/data_env.hpp"
#include "hatdfed/energy.hpp"
#include "hatdfed/learner.hpp"

namespace hatdfed {

enum class Strategy { hat_dfed, rnd, ring };

Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy s);

// Desk-scale learning task constants. These are fixed by the harness (not
// part of the experiment config file) so that every run shares the same task.
struct TaskSpec {
    int n_classes = 4;
    int dim = 8;
    int train_per_class = 1500;
    int test_per_class = 250;
    int per_server_pool = 800;  // |D^tr(s_i)|
    int round_pool = 300;       // |D^tr_k(s_i)| cap: n_tr samples per device
    int n_subsets = 30;
    int hidden = 0;             // 0 = softmax regression
    double lr = 0.05;
    int epochs = 2;
    int batch = 10;
    double class_sep = 2.5;
    double class_std = 1.0;
};

struct RoundMetrics {
    int round = 0;
    std::vector<double> accuracy;          // P_k per server
    std::vector<int> dataset_size;         // |D_k(s_i)|
    TopologyMatrix topology;
    std::map<LinkId, double> utilities;    // selected-link utilities computed this round
    std::map<int, std::vector<int>> agg_senders;  // receiver -> senders aggregated
    double round_energy_J = 0.0;
};

struct RunSummary {
    double avg_acc = 0.0;
    double var_acc = 0.0;
    double best_acc = 0.0;
    double worst_acc = 0.0;
    double tot_cost_MJ = 0.0;
    double mt_cost_MJ = 0.0;
};

struct RunResult {
    RunSummary summary;
    std::vector<RoundMetrics> rounds;
    EnergyLedger ledger{0};
    std::vector<double> tau;  // drawn unit compute cost per server
    SigmaMatrix sigma;
    Strategy strategy = Strategy::hat_dfed;
    SimConfig config;
};

// rnd: uniform random m-subset of directed links each round (same gamma
// budget as hat_dfed for fair cost comparison); ring: fixed directed cycle.
TopologyMatrix baseline_topology(Strategy strategy, int round, int n_servers, int m, Rng& rng);

// Final-round accuracy statistics (population variance) and cumulative
// costs in MJ.
RunSummary collect_summary(const std::vector<RoundMetrics>& series, const EnergyLedger& ledger);

// Runs the full per-round loop: connectivity draw, data collection, Phase I
// topology, local training, model exchange, aggregation, evaluation, ledger
// update, feedback. Deterministic under (cfg, strategy, task).
RunResult run_simulation(const SimConfig& cfg, Strategy strategy, const TaskSpec& task = {});

}  // namespace hatdfed
