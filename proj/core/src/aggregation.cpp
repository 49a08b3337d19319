#include "hatdfed/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hatdfed {

double approximate_importance(const std::vector<double>& probe_losses) {
    if (probe_losses.empty()) throw std::invalid_argument("approximate_importance: B must be >= 1");
    double sq = 0.0;
    for (double l : probe_losses) {
        if (!std::isfinite(l)) throw std::runtime_error("approximate_importance: non-finite loss");
        sq += l * l;
    }
    double b = static_cast<double>(probe_losses.size());
    return b * std::sqrt(sq / b);
}

double approximate_importance(const ModelParams& model, const Dataset& data,
                              std::span<const int> probe) {
    return approximate_importance(per_sample_losses(model, data, probe));
}

namespace {

std::map<int, double> softmax_map(const std::map<int, double>& x) {
    double xmax = -1e300;
    for (const auto& [_, v] : x) xmax = std::max(xmax, v);
    double sum = 0.0;
    std::map<int, double> out;
    for (const auto& [k, v] : x) {
        out[k] = std::exp(v - xmax);
        sum += out[k];
    }
    for (auto& [_, v] : out) v /= sum;
    return out;
}

}  // namespace

std::map<int, double> assign_aggregation_weights(const std::map<int, double>& importances,
                                                 const std::map<int, double>& sizes, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("assign_aggregation_weights: beta out of [0,1]");
    if (importances.size() != sizes.size())
        throw std::invalid_argument("assign_aggregation_weights: key-set mismatch");
    double max_size = 0.0;
    for (const auto& [k, s] : sizes) {
        if (!importances.count(k))
            throw std::invalid_argument("assign_aggregation_weights: key-set mismatch");
        max_size = std::max(max_size, s);
    }
    std::map<int, double> norm_sizes;
    for (const auto& [k, s] : sizes) norm_sizes[k] = max_size > 0.0 ? s / max_size : 0.0;

    auto sm_l = softmax_map(importances);
    auto sm_s = softmax_map(norm_sizes);
    std::map<int, double> q;
    for (const auto& [k, v] : sm_l) q[k] = beta * v + (1.0 - beta) * sm_s[k];
    return q;
}

ModelParams aggregate_models(const std::vector<std::pair<const ModelParams*, double>>& models) {
    if (models.empty()) throw std::invalid_argument("aggregate_models: empty input");
    double qsum = 0.0;
    const ModelShape& shape = models.front().first->shape;
    for (const auto& [m, q] : models) {
        if (m->shape != shape) throw std::invalid_argument("aggregate_models: shape mismatch");
        qsum += q;
    }
    if (std::abs(qsum - 1.0) > 1e-9)
        throw std::invalid_argument("aggregate_models: weights do not sum to 1");

    ModelParams out;
    out.shape = shape;
    out.values.assign(models.front().first->values.size(), 0.0);
    for (const auto& [m, q] : models)
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += q * m->values[i];
    return out;
}

ModelParams dcmu_round(const InboundModel& own, const std::vector<InboundModel>& inbound,
                       const Dataset& data, std::span<const int> round_indices, int probe_size,
                       double beta, Rng& rng, std::map<int, double>* weights_out) {
    if (weights_out) weights_out->clear();
    if (inbound.empty()) {
        if (weights_out) (*weights_out)[own.sender] = 1.0;
        return own.params;
    }
    // Empty round dataset: no probe can be drawn, keep the local model.
    if (round_indices.empty()) {
        if (weights_out) (*weights_out)[own.sender] = 1.0;
        return own.params;
    }

    // One probe per server per round, reused across all inbound models.
    std::vector<int> probe(round_indices.begin(), round_indices.end());
    std::shuffle(probe.begin(), probe.end(), rng);
    probe.resize(std::min<std::size_t>(probe.size(), probe_size));

    std::map<int, double> importances, sizes;
    std::vector<std::pair<const ModelParams*, double>> participants;
    importances[own.sender] = approximate_importance(own.params, data, probe);
    sizes[own.sender] = static_cast<double>(own.train_size);
    for (const auto& in : inbound) {
        importances[in.sender] = approximate_importance(in.params, data, probe);
        sizes[in.sender] = static_cast<double>(in.train_size);
    }

    auto q = assign_aggregation_weights(importances, sizes, beta);
    if (weights_out) *weights_out = q;

    participants.push_back({&own.params, q.at(own.sender)});
    for (const auto& in : inbound) participants.push_back({&in.params, q.at(in.sender)});
    return aggregate_models(participants);
}

}  // namespace hatdfed
