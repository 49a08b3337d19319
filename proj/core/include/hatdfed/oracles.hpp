#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hatdfed/bandit.hpp"
#include "hatdfed/rng.hpp"

namespace hatdfed::oracles {

enum class EnvKind { fixed_gap, drifting, adversarial_swap };

EnvKind parse_env_kind(const std::string& name);

// K x n_links utility table with entries in [0,1]; utilities are adversarial
// in the sense that no distributional assumption is made.
struct SyntheticBanditEnv {
    std::vector<std::vector<double>> utilities;

    int n_rounds() const { return static_cast<int>(utilities.size()); }
    int n_links() const { return utilities.empty() ? 0 : static_cast<int>(utilities[0].size()); }
};

// fixed_gap: a fixed best m-subset with utility 0.62, the rest at 0.50.
// drifting: the same gap plus slow per-arm sinusoidal drift (amplitude 0.04,
//   below half the gap, so the best subset never changes identity).
// adversarial_swap: large gap (0.9 vs 0.4) whose best-subset identity is
//   swapped once at round K/4, after the selector has committed.
SyntheticBanditEnv make_env(EnvKind kind, int n_rounds, int n_links, int m, Rng& rng);

// Exact 0-1 knapsack with unit weights by exhaustive enumeration; n <= 25.
std::pair<std::vector<int>, double> knapsack_bruteforce(const std::vector<double>& values,
                                                        int capacity);

// G*_K: sum over rounds of the m largest utilities.
double hindsight_optimal(const SyntheticBanditEnv& env, int m);

struct RegretResult {
    double regret = 0.0;            // R_K
    double bound = 0.0;             // 3N sqrt(K log N)
    double cum_selected = 0.0;
    double cum_oracle = 0.0;
    std::vector<double> per_round_selected;
    std::vector<double> per_round_oracle;
};

// 3N sqrt(K log N), the tuned Theorem-2-style bound.
double regret_bound(int n_servers, int n_rounds);

// eta = sqrt(K log N) / (N K), the tuning that yields the bound above.
double tuned_eta(int n_servers, int n_rounds);

// Runs the selector with bandit feedback (utilities observed only on the
// selected arms) against the per-round top-m hindsight oracle.
RegretResult empirical_regret(const SyntheticBanditEnv& env, int m, double eta, Rng& rng);

}  // namespace hatdfed::oracles
