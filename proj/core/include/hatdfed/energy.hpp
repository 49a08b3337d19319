#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hatdfed/config.hpp"
#include "hatdfed/data_env.hpp"

namespace hatdfed {

struct EnergyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-link unit model-transmission costs sigma^{i,j} (receiver i, sender j).
class SigmaMatrix {
public:
    SigmaMatrix() = default;
    explicit SigmaMatrix(int n) : n_(n), sigma_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double at(int receiver, int sender) const {
        return sigma_[static_cast<std::size_t>(receiver) * n_ + sender];
    }
    void set(int receiver, int sender, double v) {
        sigma_[static_cast<std::size_t>(receiver) * n_ + sender] = v;
    }

private:
    int n_ = 0;
    std::vector<double> sigma_;
};

double data_transmission_cost(int server, const DeviceConnectivity& conn, double psi);
double computation_cost(long long dataset_size, double tau);
double model_transmission_cost(LinkId link, const SigmaMatrix& sigma);

// Per-round per-server E^dt / E^cp and per-link E^mt, with cumulative
// Tot. Cost and M.T. Cost counters.
class EnergyLedger {
public:
    explicit EnergyLedger(int n_servers) : n_(n_servers) {}

    void record_data(int round, int server, double joules);
    void record_compute(int round, int server, double joules);
    void record_model(int round, LinkId link, double joules);

    // Exact sum of all components recorded for the round; the topology is
    // checked against the recorded links. Also advances the cumulative
    // counters, so call once per round.
    double round_total(int round, const TopologyMatrix& topology);

    double total_joules() const { return total_; }
    double mt_joules() const { return mt_total_; }

    struct RoundSlice {
        std::vector<std::optional<double>> e_dt, e_cp;
        std::map<std::pair<int, int>, double> e_mt;  // (receiver, sender)
        double total = 0.0;
        bool closed = false;
    };
    const RoundSlice& round(int round) const;
    int n_rounds() const { return static_cast<int>(rounds_.size()); }

private:
    RoundSlice& slice(int round);
    int n_ = 0;
    std::vector<RoundSlice> rounds_;  // index round-1
    double total_ = 0.0;
    double mt_total_ = 0.0;
};

}  // namespace hatdfed
