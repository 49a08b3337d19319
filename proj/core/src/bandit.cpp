#include "hatdfed/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hatdfed::bandit {

SelectorState SelectorState::init(int n_arms) {
    SelectorState s;
    // The paper initializes w_0 = 0, which is absorbing under multiplicative
    // updates; w_0 = 1 reproduces the described round-1 outcome (uniform
    // selection). p_0 = 1 for all arms.
    s.weights.assign(n_arms, 1.0);
    s.probs.assign(n_arms, 1.0);
    s.selected.assign(n_arms, 0);
    s.utilities.assign(n_arms, 0.0);
    return s;
}

BanditState BanditState::init(int n_servers) {
    BanditState st;
    st.n_servers = n_servers;
    st.sel = SelectorState::init(n_links(n_servers));
    return st;
}

TopologyMatrix BanditState::last_topology() const {
    TopologyMatrix a(n_servers);
    for (int arm = 0; arm < static_cast<int>(sel.selected.size()); ++arm) {
        if (sel.selected[arm]) {
            LinkId link = arm_to_link(arm, n_servers);
            a.set(link.dst, link.src, 1);
        }
    }
    return a;
}

namespace {

std::vector<double> softmax(const std::vector<double>& x) {
    double xmax = *std::max_element(x.begin(), x.end());
    std::vector<double> out(x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::exp(x[i] - xmax);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

// Quantize to 30 significant bits using exact power-of-two arithmetic, so
// weight vectors equal up to a common scale yield bit-identical ratios.
double quantize_ratio(double x) {
    if (x == 0.0) return 0.0;
    int e = 0;
    double mant = std::frexp(x, &e);
    const double scale = 1073741824.0;  // 2^30
    return std::ldexp(std::round(mant * scale) / scale, e);
}

}  // namespace

std::map<LinkId, double> compute_utilities(const UtilityInputs& inputs,
                                           const std::vector<LinkId>& selected, double alpha) {
    std::map<LinkId, double> out;
    if (selected.empty()) return out;

    std::vector<double> cost_raw(selected.size()), perf_raw(selected.size());
    for (std::size_t k = 0; k < selected.size(); ++k) {
        const LinkId& link = selected[k];
        double cost = inputs.e_dt[link.src] + inputs.e_cp[link.src] +
                      inputs.e_mt.at(link.dst, link.src);
        double perf = inputs.acc_curr[link.dst] - inputs.acc_prev[link.dst];
        if (!std::isfinite(cost) || !std::isfinite(perf)) {
            std::ostringstream msg;
            msg << "compute_utilities: non-finite input for link " << link.src << "->" << link.dst;
            throw std::runtime_error(msg.str());
        }
        cost_raw[k] = cost;
        perf_raw[k] = perf;
    }
    auto cost_sm = softmax(cost_raw);
    auto perf_sm = softmax(perf_raw);
    for (std::size_t k = 0; k < selected.size(); ++k) {
        double u = alpha * perf_sm[k] + (1.0 - alpha) * (1.0 - cost_sm[k]);
        out[selected[k]] = u;
    }
    return out;
}

double estimate_arm(bool was_selected, double p, double u) {
    if (!was_selected) return 1.0;
    if (!(p > 0.0))
        throw std::runtime_error("estimate_utility: selected arm with p = 0");
    double pf = std::max(p, kProbFloor);
    return 1.0 - (1.0 - u) / pf;
}

double estimate_utility(LinkId link, const BanditState& state) {
    int arm = link_to_arm(link, state.n_servers);
    return estimate_arm(state.sel.selected[arm], state.sel.probs[arm], state.sel.utilities[arm]);
}

std::vector<double> update_weights(const std::vector<double>& weights,
                                   const std::vector<double>& estimates, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta out of (0,1]");
    if (weights.size() != estimates.size())
        throw std::invalid_argument("update_weights: size mismatch");
    std::vector<double> out(weights.size());
    double wmax = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) throw std::runtime_error("update_weights: non-positive weight");
        out[i] = weights[i] * std::exp(eta * estimates[i]);
        if (!std::isfinite(out[i])) throw std::runtime_error("update_weights: overflow");
        wmax = std::max(wmax, out[i]);
    }
    for (double& w : out) w /= wmax;
    return out;
}

std::vector<double> assign_probabilities(const std::vector<double>& weights, int m) {
    const int n = static_cast<int>(weights.size());
    if (m < 0 || m > n) throw std::invalid_argument("assign_probabilities: m out of [0, n]");
    double wmax = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("assign_probabilities: weights must be positive finite");
        wmax = std::max(wmax, w);
    }

    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = quantize_ratio(weights[i] / wmax);

    std::vector<double> p(n, 0.0);
    std::vector<char> saturated(n, 0);
    int budget = m;
    for (;;) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            if (!saturated[i]) s += r[i];
        if (budget == 0 || s == 0.0) break;
        // Fix every entry whose uncapped share reaches 1, then re-apply the
        // assignment with the reduced budget over the rest.
        bool new_saturation = false;
        for (int i = 0; i < n; ++i) {
            if (!saturated[i] && budget * r[i] >= s) {
                saturated[i] = 1;
                p[i] = 1.0;
                new_saturation = true;
            }
        }
        if (new_saturation) {
            budget = m;
            for (int i = 0; i < n; ++i) budget -= saturated[i];
            continue;
        }
        for (int i = 0; i < n; ++i)
            if (!saturated[i]) p[i] = budget * r[i] / s;
        break;
    }
    return p;
}

std::vector<int> dependent_rounding(std::vector<double> probs, Rng& rng) {
    const double tol = 1e-12;
    const int n = static_cast<int>(probs.size());
    std::vector<int> frac;
    for (int i = 0; i < n; ++i) {
        if (!(probs[i] >= -tol && probs[i] <= 1.0 + tol))
            throw std::invalid_argument("dependent_rounding: probability out of [0,1]");
        probs[i] = std::clamp(probs[i], 0.0, 1.0);
        if (probs[i] > tol && probs[i] < 1.0 - tol) frac.push_back(i);
    }

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto snap = [&](int i) {
        if (probs[i] <= tol) probs[i] = 0.0;
        else if (probs[i] >= 1.0 - tol) probs[i] = 1.0;
    };
    while (frac.size() >= 2) {
        std::uniform_int_distribution<std::size_t> pick(0, frac.size() - 1);
        std::size_t ia = pick(rng);
        std::size_t ib = pick(rng);
        while (ib == ia) ib = pick(rng);
        int a = frac[ia];
        int b = frac[ib];
        double theta = std::min(1.0 - probs[a], probs[b]);
        double delta = std::min(probs[a], 1.0 - probs[b]);
        if (!(theta + delta > 0.0))
            throw std::logic_error("dependent_rounding: both picked entries at a bound");
        if (u01(rng) < delta / (theta + delta)) {
            probs[a] += theta;
            probs[b] -= theta;
        } else {
            probs[a] -= delta;
            probs[b] += delta;
        }
        snap(a);
        snap(b);
        if (ia < ib) std::swap(ia, ib);
        for (std::size_t pos : {ia, ib}) {
            int i = frac[pos];
            if (probs[i] == 0.0 || probs[i] == 1.0) {
                frac[pos] = frac.back();
                frac.pop_back();
            }
        }
    }
    // Last fractional entry: unreachable when sum(p) is integral, retained
    // for robustness with non-integral inputs.
    if (frac.size() == 1) probs[frac[0]] = probs[frac[0]] >= 0.5 ? 1.0 : 0.0;

    std::vector<int> selected;
    for (int i = 0; i < n; ++i)
        if (probs[i] == 1.0) selected.push_back(i);
    return selected;
}

namespace {

std::vector<int> advance_selector(SelectorState& st, const std::vector<double>& estimates,
                                  double eta, int m, Rng& rng) {
    st.weights = update_weights(st.weights, estimates, eta);
    st.probs = assign_probabilities(st.weights, m);
    auto chosen = dependent_rounding(st.probs, rng);
    std::fill(st.selected.begin(), st.selected.end(), 0);
    for (int arm : chosen) st.selected[arm] = 1;
    return chosen;
}

}  // namespace

TopologyMatrix construct_topology(BanditState& state, const UtilityInputs& inputs, double alpha,
                                  double eta, int m, Rng& rng) {
    const int n = state.n_servers;
    const int arms = n_links(n);

    auto prev_links = state.last_topology().links();
    auto utilities = compute_utilities(inputs, prev_links, alpha);
    for (const auto& [link, u] : utilities) state.sel.utilities[link_to_arm(link, n)] = u;

    std::vector<double> estimates(arms);
    for (int arm = 0; arm < arms; ++arm)
        estimates[arm] =
            estimate_arm(state.sel.selected[arm], state.sel.probs[arm], state.sel.utilities[arm]);

    auto chosen = advance_selector(state.sel, estimates, eta, m, rng);
    state.round += 1;

    TopologyMatrix a(n);
    for (int arm : chosen) {
        LinkId link = arm_to_link(arm, n);
        a.set(link.dst, link.src, 1);
    }
    return a;
}

std::vector<int> selector_step(SelectorState& state, const std::vector<double>& true_utilities,
                               double eta, int m, Rng& rng) {
    const int arms = static_cast<int>(state.weights.size());
    std::vector<double> estimates(arms);
    for (int arm = 0; arm < arms; ++arm) {
        double u = state.selected[arm] ? true_utilities.at(arm) : 0.0;
        estimates[arm] = estimate_arm(state.selected[arm], state.probs[arm], u);
    }
    return advance_selector(state, estimates, eta, m, rng);
}

}  // namespace hatdfed::bandit
