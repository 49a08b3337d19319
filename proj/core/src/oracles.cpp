#include "hatdfed/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hatdfed::oracles {

EnvKind parse_env_kind(const std::string& name) {
    if (name == "fixed-gap") return EnvKind::fixed_gap;
    if (name == "drifting") return EnvKind::drifting;
    if (name == "adversarial-swap") return EnvKind::adversarial_swap;
    throw std::invalid_argument("unknown environment kind: " + name +
                                " (supported: fixed-gap, drifting, adversarial-swap)");
}

SyntheticBanditEnv make_env(EnvKind kind, int n_rounds, int n_links, int m, Rng& rng) {
    if (m > n_links) throw std::invalid_argument("make_env: m > n_links");
    SyntheticBanditEnv env;
    env.utilities.assign(n_rounds, std::vector<double>(n_links, 0.0));

    std::vector<int> arms(n_links);
    std::iota(arms.begin(), arms.end(), 0);
    std::shuffle(arms.begin(), arms.end(), rng);
    std::vector<char> best(n_links, 0);
    for (int i = 0; i < m; ++i) best[arms[i]] = 1;

    switch (kind) {
        case EnvKind::fixed_gap: {
            for (auto& row : env.utilities)
                for (int a = 0; a < n_links; ++a) row[a] = best[a] ? 0.62 : 0.50;
            break;
        }
        case EnvKind::drifting: {
            std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
            std::vector<double> phi(n_links);
            for (double& p : phi) p = phase(rng);
            for (int k = 0; k < n_rounds; ++k)
                for (int a = 0; a < n_links; ++a) {
                    double base = best[a] ? 0.62 : 0.50;
                    double t = static_cast<double>(k) / std::max(1, n_rounds);
                    env.utilities[k][a] =
                        std::clamp(base + 0.04 * std::sin(2.0 * M_PI * t + phi[a]), 0.0, 1.0);
                }
            break;
        }
        case EnvKind::adversarial_swap: {
            std::vector<char> alt(n_links, 0);
            for (int i = m; i < std::min(2 * m, n_links); ++i) alt[arms[i]] = 1;
            int swap_at = n_rounds / 4;
            for (int k = 0; k < n_rounds; ++k) {
                const auto& top = (k < swap_at) ? best : alt;
                for (int a = 0; a < n_links; ++a) env.utilities[k][a] = top[a] ? 0.90 : 0.40;
            }
            break;
        }
    }
    return env;
}

std::pair<std::vector<int>, double> knapsack_bruteforce(const std::vector<double>& values,
                                                        int capacity) {
    const int n = static_cast<int>(values.size());
    if (n > 25) throw std::invalid_argument("knapsack_bruteforce: instance too large (n > 25)");
    if (capacity < 0) throw std::invalid_argument("knapsack_bruteforce: negative capacity");
    double best_total = 0.0;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) > capacity) continue;
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) total += values[i];
        if (total > best_total) {
            best_total = total;
            best_mask = mask;
        }
    }
    std::vector<int> subset;
    for (int i = 0; i < n; ++i)
        if (best_mask & (1u << i)) subset.push_back(i);
    return {subset, best_total};
}

namespace {

double top_m_sum(const std::vector<double>& u, int m) {
    std::vector<double> sorted(u);
    std::partial_sort(sorted.begin(), sorted.begin() + m, sorted.end(), std::greater<>());
    return std::accumulate(sorted.begin(), sorted.begin() + m, 0.0);
}

}  // namespace

double hindsight_optimal(const SyntheticBanditEnv& env, int m) {
    if (m > env.n_links()) throw std::invalid_argument("hindsight_optimal: m > n_links");
    double total = 0.0;
    for (const auto& row : env.utilities) total += top_m_sum(row, m);
    return total;
}

double regret_bound(int n_servers, int n_rounds) {
    return 3.0 * n_servers * std::sqrt(n_rounds * std::log(n_servers));
}

double tuned_eta(int n_servers, int n_rounds) {
    return std::sqrt(n_rounds * std::log(n_servers)) /
           (static_cast<double>(n_servers) * n_rounds);
}

RegretResult empirical_regret(const SyntheticBanditEnv& env, int m, double eta, Rng& rng) {
    const int n = env.n_links();
    if (m > n) throw std::invalid_argument("empirical_regret: m > n_links");

    // Bound reported for the N with N(N-1) closest to the arm count.
    int n_servers = 2;
    while (n_servers * (n_servers - 1) < n) ++n_servers;

    RegretResult res;
    res.bound = regret_bound(n_servers, env.n_rounds());

    auto state = bandit::SelectorState::init(n);
    std::vector<double> prev_utilities;
    for (int k = 0; k < env.n_rounds(); ++k) {
        auto chosen = bandit::selector_step(state, prev_utilities, eta, m, rng);
        const auto& row = env.utilities[k];
        double got = 0.0;
        for (int arm : chosen) got += row[arm];
        double opt = top_m_sum(row, m);
        res.cum_selected += got;
        res.cum_oracle += opt;
        res.per_round_selected.push_back(got);
        res.per_round_oracle.push_back(opt);
        prev_utilities = row;
    }
    res.regret = res.cum_oracle - res.cum_selected;
    return res;
}

}  // namespace hatdfed::oracles
