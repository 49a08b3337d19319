#include "hatdfed/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hatdfed {

Strategy parse_strategy(const std::string& name) {
    if (name == "hat-dfed" || name == "hat_dfed") return Strategy::hat_dfed;
    if (name == "rnd") return Strategy::rnd;
    if (name == "ring") return Strategy::ring;
    throw std::invalid_argument("unknown strategy: " + name +
                                " (supported: hat-dfed, rnd, ring)");
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::hat_dfed: return "hat-dfed";
        case Strategy::rnd: return "rnd";
        case Strategy::ring: return "ring";
    }
    return "?";
}

TopologyMatrix baseline_topology(Strategy strategy, int round, int n_servers, int m, Rng& rng) {
    TopologyMatrix a(n_servers);
    switch (strategy) {
        case Strategy::ring: {
            for (int j = 0; j < n_servers; ++j) a.set((j + 1) % n_servers, j, 1);
            return a;
        }
        case Strategy::rnd: {
            std::vector<int> arms(bandit::n_links(n_servers));
            std::iota(arms.begin(), arms.end(), 0);
            std::shuffle(arms.begin(), arms.end(), rng);
            for (int k = 0; k < m; ++k) {
                LinkId link = bandit::arm_to_link(arms[k], n_servers);
                a.set(link.dst, link.src, 1);
            }
            return a;
        }
        case Strategy::hat_dfed:
            break;
    }
    throw std::invalid_argument("baseline_topology: hat-dfed is not a baseline");
}

RunSummary collect_summary(const std::vector<RoundMetrics>& series, const EnergyLedger& ledger) {
    if (series.empty()) throw std::invalid_argument("collect_summary: empty series");
    const auto& acc = series.back().accuracy;
    RunSummary s;
    s.avg_acc = std::accumulate(acc.begin(), acc.end(), 0.0) / acc.size();
    double var = 0.0;
    for (double a : acc) var += (a - s.avg_acc) * (a - s.avg_acc);
    s.var_acc = var / acc.size();
    s.best_acc = *std::max_element(acc.begin(), acc.end());
    s.worst_acc = *std::min_element(acc.begin(), acc.end());
    s.tot_cost_MJ = ledger.total_joules() / 1e6;
    s.mt_cost_MJ = ledger.mt_joules() / 1e6;
    return s;
}

RunResult run_simulation(const SimConfig& cfg, Strategy strategy, const TaskSpec& task) {
    auto violations = validate_config(cfg);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid config:";
        for (const auto& v : violations) msg << " [" << v << "]";
        throw ConfigError(msg.str());
    }

    const int n = cfg.n_servers;
    const int m = link_budget(cfg.gamma, n);

    Rng rng_setup = make_stream(cfg.seed, "setup");
    Rng rng_data = make_stream(cfg.seed, "data");
    Rng rng_conn = make_stream(cfg.seed, "connectivity");
    Rng rng_bandit = make_stream(cfg.seed, "bandit");
    Rng rng_learner = make_stream(cfg.seed, "learner");
    Rng rng_baseline = make_stream(cfg.seed, "baseline");

    // One draw of class means for both splits; generation emits samples in
    // class-contiguous blocks, so the tail of each block becomes the test set.
    Dataset pooled =
        gen_synthetic_dataset(task.n_classes, task.dim, task.train_per_class + task.test_per_class,
                              rng_data, task.class_sep, task.class_std);
    Dataset train, test;
    train.n_classes = test.n_classes = task.n_classes;
    train.dim = test.dim = task.dim;
    const int per_class = task.train_per_class + task.test_per_class;
    for (int c = 0; c < task.n_classes; ++c)
        for (int s = 0; s < per_class; ++s) {
            int i = c * per_class + s;
            Dataset& dst = s < task.train_per_class ? train : test;
            dst.features.push_back(std::move(pooled.features[i]));
            dst.labels.push_back(pooled.labels[i]);
        }
    Partition part =
        dirichlet_partition(train, cfg.lambda_dir, n, task.per_server_pool, rng_data);

    // Heterogeneous resources: per-server machine type and per-link energy
    // efficiency, both fixed for the whole run.
    std::vector<double> tau(n);
    {
        std::uniform_int_distribution<std::size_t> pick(0, cfg.tau_choices.size() - 1);
        for (double& t : tau) t = cfg.tau_choices[pick(rng_setup)];
    }
    SigmaMatrix sigma(n);
    {
        std::uniform_real_distribution<double> ee(cfg.ee_link_range[0], cfg.ee_link_range[1]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) sigma.set(i, j, derive_link_cost(ee(rng_setup), cfg.model_bits));
    }
    const double psi = derive_device_cost(cfg.n_tr, cfg.sample_bits, cfg.ee_device);

    ModelShape shape{task.dim, task.hidden, task.n_classes};
    std::vector<ModelParams> models;
    models.reserve(n);
    for (int s = 0; s < n; ++s) models.push_back(init_params(shape, rng_learner));

    std::vector<double> acc_prev2(n), acc_prev(n);
    for (int s = 0; s < n; ++s) acc_prev[s] = evaluate_accuracy(models[s], test);
    acc_prev2 = acc_prev;

    RunResult res;
    res.ledger = EnergyLedger(n);
    res.tau = tau;
    res.sigma = sigma;
    res.strategy = strategy;
    res.config = cfg;

    auto bstate = bandit::BanditState::init(n);

    for (int k = 1; k <= cfg.n_rounds; ++k) {
        RoundMetrics rm;
        rm.round = k;

        auto conn = sample_device_connectivity(cfg.rho, n, cfg.devices_per_server, rng_conn);

        // Data collection: per-round pool, 30-way split, one subset per
        // connected device.
        std::vector<std::vector<int>> round_data(n);
        for (int s = 0; s < n; ++s) {
            std::vector<int> pool = part.per_server_indices[s];
            std::shuffle(pool.begin(), pool.end(), rng_data);
            pool.resize(std::min<std::size_t>(pool.size(), task.round_pool));
            auto subsets = split_into_subsets(pool, task.n_subsets, rng_data);
            round_data[s] = build_round_dataset(subsets, conn.connected_count(s), rng_data);
        }

        // Phase I: inter-edge topology.
        TopologyMatrix topo;
        if (strategy == Strategy::hat_dfed) {
            bandit::UtilityInputs inputs;
            if (k >= 2) {
                const auto& prev = res.ledger.round(k - 1);
                inputs.acc_curr = acc_prev;
                inputs.acc_prev = acc_prev2;
                inputs.e_dt.resize(n);
                inputs.e_cp.resize(n);
                for (int s = 0; s < n; ++s) {
                    inputs.e_dt[s] = *prev.e_dt[s];
                    inputs.e_cp[s] = *prev.e_cp[s];
                }
                inputs.e_mt = sigma;
                rm.utilities = bandit::compute_utilities(inputs, bstate.last_topology().links(),
                                                         cfg.alpha);
            }
            topo = bandit::construct_topology(bstate, inputs, cfg.alpha, cfg.eta, m, rng_bandit);
        } else {
            topo = baseline_topology(strategy, k, n, m, rng_baseline);
        }
        rm.topology = topo;

        // Local training; empty round dataset skips training for the round.
        std::vector<ModelParams> trained;
        trained.reserve(n);
        for (int s = 0; s < n; ++s) {
            auto rep = local_train(models[s], train, round_data[s], task.lr, task.epochs,
                                   task.batch, rng_learner);
            trained.push_back(std::move(rep.params_out));
            rm.dataset_size.push_back(static_cast<int>(round_data[s].size()));

            res.ledger.record_data(k, s, data_transmission_cost(s, conn, psi));
            res.ledger.record_compute(
                k, s, computation_cost(static_cast<long long>(round_data[s].size()), tau[s]));
        }
        for (const auto& link : topo.links())
            res.ledger.record_model(k, link, model_transmission_cost(link, sigma));

        // Phase II: exchange and aggregation over the round topology.
        std::vector<ModelParams> next;
        next.reserve(n);
        for (int i = 0; i < n; ++i) {
            auto senders = topo.in_neighbors(i);
            rm.agg_senders[i] = senders;
            if (strategy == Strategy::hat_dfed) {
                InboundModel own{i, trained[i], static_cast<long long>(round_data[i].size())};
                std::vector<InboundModel> inbound;
                for (int j : senders)
                    inbound.push_back({j, trained[j], static_cast<long long>(round_data[j].size())});
                next.push_back(dcmu_round(own, inbound, train, round_data[i],
                                          cfg.batch_sample_size, cfg.beta, rng_data));
            } else {
                // Baselines aggregate by simple averaging.
                std::vector<std::pair<const ModelParams*, double>> parts;
                double q = 1.0 / (1.0 + senders.size());
                parts.push_back({&trained[i], q});
                for (int j : senders) parts.push_back({&trained[j], q});
                next.push_back(aggregate_models(parts));
            }
        }
        models = std::move(next);

        for (int s = 0; s < n; ++s) rm.accuracy.push_back(evaluate_accuracy(models[s], test));
        rm.round_energy_J = res.ledger.round_total(k, topo);

        acc_prev2 = acc_prev;
        acc_prev = rm.accuracy;
        res.rounds.push_back(std::move(rm));
    }

    res.summary = collect_summary(res.rounds, res.ledger);
    return res;
}

}  // namespace hatdfed
