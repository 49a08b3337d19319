#pragma once

#include <map>
#include <span>
#include <vector>

#include "hatdfed/learner.hpp"

namespace hatdfed {

struct InboundModel {
    int sender = 0;
    ModelParams params;
    long long train_size = 0;  // |D_k(s_j)|
};

// l = B * sqrt(mean of squared probe losses).
double approximate_importance(const std::vector<double>& probe_losses);
double approximate_importance(const ModelParams& model, const Dataset& data,
                              std::span<const int> probe);

// q = beta * softmax(l) + (1-beta) * softmax(sizes / max size); sum(q) = 1.
// Sizes are normalized by the largest size before the softmax so raw counts
// cannot overflow the exponent.
std::map<int, double> assign_aggregation_weights(const std::map<int, double>& importances,
                                                 const std::map<int, double>& sizes, double beta);

// Coordinatewise convex combination; weights must sum to 1.
ModelParams aggregate_models(const std::vector<std::pair<const ModelParams*, double>>& models);

// One Phase II aggregation step for a server: draws the B-sample probe from
// the round dataset, scores self + in-neighbors, assigns weights, aggregates.
// No in-neighbors (or an empty round dataset) leaves the model unchanged.
ModelParams dcmu_round(const InboundModel& own, const std::vector<InboundModel>& inbound,
                       const Dataset& data, std::span<const int> round_indices, int probe_size,
                       double beta, Rng& rng,
                       std::map<int, double>* weights_out = nullptr);

}  // namespace hatdfed
