#pragma once

#include <span>
#include <vector>

#include "hatdfed/data_env.hpp"
#include "hatdfed/rng.hpp"

namespace hatdfed {

// (dim, hidden, n_classes); hidden == 0 means softmax regression, otherwise
// a one-hidden-layer tanh network.
struct ModelShape {
    int dim = 0;
    int hidden = 0;
    int n_classes = 0;

    int param_count() const {
        if (hidden == 0) return n_classes * dim + n_classes;
        return hidden * dim + hidden + n_classes * hidden + n_classes;
    }
    bool operator==(const ModelShape&) const = default;
};

struct ModelParams {
    ModelShape shape;
    std::vector<double> values;

    bool operator==(const ModelParams&) const = default;
};

struct TrainReport {
    int steps = 0;
    double mean_loss = 0.0;
    bool diverged = false;
    ModelParams params_out;
};

// Xavier uniform: [-a, a] with a = sqrt(6 / (fan_in + fan_out)).
ModelParams init_params(ModelShape shape, Rng& rng);

// Per-class logits for one sample.
std::vector<double> forward_logits(const ModelParams& params, std::span<const double> x);

// Mean cross-entropy and its analytic gradient over the given sample indices.
double loss_and_gradient(const ModelParams& params, const Dataset& data,
                         std::span<const int> idx, std::vector<double>* grad);

// Mini-batch SGD on cross-entropy. Empty data leaves params unchanged.
// Non-finite loss or gradient aborts the round and returns the input params.
TrainReport local_train(const ModelParams& params, const Dataset& data, std::span<const int> idx,
                        double lr, int epochs, int batch, Rng& rng);

// Argmax-prediction accuracy on the full dataset; ties break toward the
// lowest class index.
double evaluate_accuracy(const ModelParams& params, const Dataset& test);

// Cross-entropy per sample, forward pass only.
std::vector<double> per_sample_losses(const ModelParams& params, const Dataset& data,
                                      std::span<const int> idx);

// Central finite differences vs analytic gradient on <= max_coords random
// coordinates; returns the maximum relative error.
double gradient_check(const ModelParams& params, const Dataset& data, std::span<const int> idx,
                      double epsilon, Rng& rng, int max_coords = 50);

// Flat text export with shape header (debug/repro only).
void save_params(const ModelParams& params, std::ostream& out);
ModelParams load_params(std::istream& in);

}  // namespace hatdfed
