#pragma once

#include <map>
#include <vector>

#include "hatdfed/config.hpp"
#include "hatdfed/energy.hpp"
#include "hatdfed/rng.hpp"

namespace hatdfed::bandit {

// Directed links (j -> i, i != j) are flattened to arm indices so the
// selector core is usable standalone as a combinatorial semi-bandit.
inline int n_links(int n_servers) { return n_servers * (n_servers - 1); }

inline int link_to_arm(LinkId link, int n_servers) {
    int col = link.src < link.dst ? link.src : link.src - 1;
    return link.dst * (n_servers - 1) + col;
}

inline LinkId arm_to_link(int arm, int n_servers) {
    int dst = arm / (n_servers - 1);
    int col = arm % (n_servers - 1);
    int src = col < dst ? col : col + 1;
    return {src, dst};
}

// Exponential-weights selector state over a flat arm set.
struct SelectorState {
    std::vector<double> weights;          // > 0, rescaled by max after updates
    std::vector<double> probs;            // last assignment, [0,1]
    std::vector<std::uint8_t> selected;   // last round's selection
    std::vector<double> utilities;        // observed u, valid where selected

    static SelectorState init(int n_arms);
};

// Coordinator-owned bandit state for the inter-edge topology.
struct BanditState {
    int n_servers = 0;
    int round = 0;  // last completed topology round
    SelectorState sel;

    static BanditState init(int n_servers);
    TopologyMatrix last_topology() const;
};

// Global information reported for the previous round.
struct UtilityInputs {
    std::vector<double> acc_curr;  // P_k per server
    std::vector<double> acc_prev;  // P_{k-1} per server
    std::vector<double> e_dt;      // per server, J
    std::vector<double> e_cp;      // per server, J
    SigmaMatrix e_mt;              // per link, J
};

// u = alpha * softmax(accuracy improvement) + (1-alpha) * (1 - softmax(cost)),
// both softmaxes taken over the selected links. Values lie in [0,1].
std::map<LinkId, double> compute_utilities(const UtilityInputs& inputs,
                                           const std::vector<LinkId>& selected, double alpha);

// Importance-weighted estimate: selected -> 1 - (1-u)/p, unselected -> 1.
// Probabilities below p_floor are floored before the division.
inline constexpr double kProbFloor = 1e-3;
double estimate_utility(LinkId link, const BanditState& state);
double estimate_arm(bool was_selected, double p, double u);

// w <- w * exp(eta * estimate), then all weights are divided by the maximum
// (assignment is scale invariant, so this only prevents overflow).
std::vector<double> update_weights(const std::vector<double>& weights,
                                   const std::vector<double>& estimates, double eta);

// Capped probability assignment: p = min(m*w/sum(w), 1) with the capped mass
// redistributed by iterated water-filling, so sum(p) = m exactly.
std::vector<double> assign_probabilities(const std::vector<double>& weights, int m);

// Pairwise mass-shifting rounding; preserves each marginal, and |selected|
// equals sum(p) whenever that sum is integral. Returns selected arm indices.
std::vector<int> dependent_rounding(std::vector<double> probs, Rng& rng);

// One full Phase I step: utilities -> estimates -> weights -> probabilities
// -> rounding. Advances the state to the next round.
TopologyMatrix construct_topology(BanditState& state, const UtilityInputs& inputs, double alpha,
                                  double eta, int m, Rng& rng);

// Standalone selector step for bandit-bench: true utilities for every arm are
// supplied by the environment but observed only on selected arms.
std::vector<int> selector_step(SelectorState& state, const std::vector<double>& true_utilities,
                               double eta, int m, Rng& rng);

}  // namespace hatdfed::bandit
