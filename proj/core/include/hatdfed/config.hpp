#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hatdfed {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All hyperparameters, cost constants and the RNG seed for one experiment.
// Energies are joules, payloads are bits, energy efficiency is Kbit/J.
struct SimConfig {
    int n_servers = 5;
    int devices_per_server = 30;
    int n_rounds = 200;
    double alpha = 0.6;       // utility trade-off, [0,1]
    double beta = 0.4;        // aggregation trade-off, [0,1]
    double eta = 0.018;       // exploration/exploitation, (0,1]; default is the
                              // tuned sqrt(K log N)/(NK) at N=5, K=200
    double gamma = 0.3;       // topology sparsity, (0,1]
    double rho = 0.5;         // device-to-edge success probability
    double lambda_dir = 0.3;  // Dirichlet concentration
    int n_tr = 10;            // samples per device per round
    double sample_bits = 6272.0;
    double model_bits = 47.2e6;
    double ee_device = 1.0;  // Kbit/J
    std::array<double, 2> ee_link_range{20.0, 50.0};
    std::vector<double> tau_choices{0.05, 0.25};  // J per sample, per machine type
    int batch_sample_size = 10;                   // B, loss-probe size
    std::uint64_t seed = 1;

    bool operator==(const SimConfig&) const = default;
};

// Directed inter-edge link: src transmits its model to dst.
struct LinkId {
    int src = 0;
    int dst = 0;
    auto operator<=>(const LinkId&) const = default;
};

// Directed, self-loop-free binary adjacency over servers for one round.
// Entry (i, j) = 1 means server j is an in-neighbor of server i, i.e. the
// link {src=j, dst=i} is selected.
class TopologyMatrix {
public:
    TopologyMatrix() = default;
    explicit TopologyMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {}

    int size() const { return n_; }

    int at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    void set(int i, int j, int v) {
        if (i == j && v != 0) throw std::invalid_argument("topology: self-loop");
        a_[static_cast<std::size_t>(i) * n_ + j] = static_cast<std::uint8_t>(v != 0);
    }

    int link_count() const {
        int c = 0;
        for (auto v : a_) c += v;
        return c;
    }

    std::vector<LinkId> links() const {
        std::vector<LinkId> out;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (at(i, j)) out.push_back({j, i});
        return out;
    }

    std::vector<int> in_neighbors(int i) const {
        std::vector<int> out;
        for (int j = 0; j < n_; ++j)
            if (at(i, j)) out.push_back(j);
        return out;
    }

    bool operator==(const TopologyMatrix&) const = default;

private:
    int n_ = 0;
    std::vector<std::uint8_t> a_;
};

// Number of directed links selected per round: round-half-up of gamma*N(N-1).
int link_budget(double gamma, int n_servers);

// sigma^{i,j} = (model_bits / 1000) / ee_link, in joules.
double derive_link_cost(double ee_link, double model_bits);

// psi = (n_tr * sample_bits / 1000) / ee_device, in joules.
double derive_device_cost(int n_tr, double sample_bits, double ee_device);

// Returns every violated SimConfig invariant; empty means ok.
std::vector<std::string> validate_config(const SimConfig& cfg);

// JSON with exactly the SimConfig field names as keys; unknown keys are a
// hard error. serialize_config(parse_config(s)) == s for canonical s.
SimConfig parse_config(const std::string& text);
std::string serialize_config(const SimConfig& cfg);

// Reads a config file and applies the HATDFED_SEED environment override.
SimConfig load_config_file(const std::string& path);

}  // namespace hatdfed
