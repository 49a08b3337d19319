#include "hatdfed/learner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace hatdfed {

namespace {

struct Layout {
    // Offsets into the flat parameter vector.
    int w1 = 0, b1 = 0, w2 = 0, b2 = 0;
    explicit Layout(const ModelShape& s) {
        if (s.hidden == 0) {
            w1 = 0;                  // W: L x d
            b1 = s.n_classes * s.dim;
        } else {
            w1 = 0;                      // W1: H x d
            b1 = s.hidden * s.dim;       // b1: H
            w2 = b1 + s.hidden;          // W2: L x H
            b2 = w2 + s.n_classes * s.hidden;
        }
    }
};

void check_shape(const ModelParams& p) {
    if (static_cast<int>(p.values.size()) != p.shape.param_count())
        throw std::invalid_argument("ModelParams: value count does not match shape");
}

double softmax_ce(const std::vector<double>& logits, int label, std::vector<double>* dlogits) {
    const int L = static_cast<int>(logits.size());
    double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - zmax);
    double lse = zmax + std::log(sum);
    if (dlogits) {
        dlogits->resize(L);
        for (int c = 0; c < L; ++c)
            (*dlogits)[c] = std::exp(logits[c] - lse) - (c == label ? 1.0 : 0.0);
    }
    return lse - logits[label];
}

}  // namespace

ModelParams init_params(ModelShape shape, Rng& rng) {
    ModelParams p;
    p.shape = shape;
    p.values.assign(shape.param_count(), 0.0);
    Layout lay(shape);
    auto fill = [&](int off, int rows, int cols) {
        double a = std::sqrt(6.0 / (rows + cols));
        std::uniform_real_distribution<double> u(-a, a);
        for (int k = 0; k < rows * cols; ++k) p.values[off + k] = u(rng);
    };
    if (shape.hidden == 0) {
        fill(lay.w1, shape.n_classes, shape.dim);
    } else {
        fill(lay.w1, shape.hidden, shape.dim);
        fill(lay.w2, shape.n_classes, shape.hidden);
    }
    return p;
}

std::vector<double> forward_logits(const ModelParams& p, std::span<const double> x) {
    check_shape(p);
    const auto& s = p.shape;
    Layout lay(s);
    const double* v = p.values.data();
    std::vector<double> logits(s.n_classes);
    if (s.hidden == 0) {
        for (int c = 0; c < s.n_classes; ++c) {
            double z = v[lay.b1 + c];
            const double* w = v + lay.w1 + c * s.dim;
            for (int d = 0; d < s.dim; ++d) z += w[d] * x[d];
            logits[c] = z;
        }
        return logits;
    }
    std::vector<double> h(s.hidden);
    for (int j = 0; j < s.hidden; ++j) {
        double z = v[lay.b1 + j];
        const double* w = v + lay.w1 + j * s.dim;
        for (int d = 0; d < s.dim; ++d) z += w[d] * x[d];
        h[j] = std::tanh(z);
    }
    for (int c = 0; c < s.n_classes; ++c) {
        double z = v[lay.b2 + c];
        const double* w = v + lay.w2 + c * s.hidden;
        for (int j = 0; j < s.hidden; ++j) z += w[j] * h[j];
        logits[c] = z;
    }
    return logits;
}

double loss_and_gradient(const ModelParams& p, const Dataset& data, std::span<const int> idx,
                         std::vector<double>* grad) {
    check_shape(p);
    const auto& s = p.shape;
    Layout lay(s);
    const double* v = p.values.data();
    if (grad) grad->assign(p.values.size(), 0.0);
    if (idx.empty()) return 0.0;

    double total_loss = 0.0;
    std::vector<double> dlogits, h, z1;
    for (int i : idx) {
        const auto& x = data.features[i];
        if (s.hidden == 0) {
            auto logits = forward_logits(p, x);
            total_loss += softmax_ce(logits, data.labels[i], grad ? &dlogits : nullptr);
            if (grad) {
                for (int c = 0; c < s.n_classes; ++c) {
                    double g = dlogits[c];
                    (*grad)[lay.b1 + c] += g;
                    double* gw = grad->data() + lay.w1 + c * s.dim;
                    for (int d = 0; d < s.dim; ++d) gw[d] += g * x[d];
                }
            }
        } else {
            h.resize(s.hidden);
            for (int j = 0; j < s.hidden; ++j) {
                double z = v[lay.b1 + j];
                const double* w = v + lay.w1 + j * s.dim;
                for (int d = 0; d < s.dim; ++d) z += w[d] * x[d];
                h[j] = std::tanh(z);
            }
            std::vector<double> logits(s.n_classes);
            for (int c = 0; c < s.n_classes; ++c) {
                double z = v[lay.b2 + c];
                const double* w = v + lay.w2 + c * s.hidden;
                for (int j = 0; j < s.hidden; ++j) z += w[j] * h[j];
                logits[c] = z;
            }
            total_loss += softmax_ce(logits, data.labels[i], grad ? &dlogits : nullptr);
            if (grad) {
                std::vector<double> dh(s.hidden, 0.0);
                for (int c = 0; c < s.n_classes; ++c) {
                    double g = dlogits[c];
                    (*grad)[lay.b2 + c] += g;
                    double* gw = grad->data() + lay.w2 + c * s.hidden;
                    const double* w = v + lay.w2 + c * s.hidden;
                    for (int j = 0; j < s.hidden; ++j) {
                        gw[j] += g * h[j];
                        dh[j] += g * w[j];
                    }
                }
                for (int j = 0; j < s.hidden; ++j) {
                    double dz = dh[j] * (1.0 - h[j] * h[j]);
                    (*grad)[lay.b1 + j] += dz;
                    double* gw = grad->data() + lay.w1 + j * s.dim;
                    for (int d = 0; d < s.dim; ++d) gw[d] += dz * x[d];
                }
            }
        }
    }
    double inv = 1.0 / static_cast<double>(idx.size());
    if (grad)
        for (double& g : *grad) g *= inv;
    return total_loss * inv;
}

TrainReport local_train(const ModelParams& params, const Dataset& data, std::span<const int> idx,
                        double lr, int epochs, int batch, Rng& rng) {
    if (!(lr > 0.0)) throw std::invalid_argument("local_train: lr must be > 0");
    if (epochs < 1 || batch < 1) throw std::invalid_argument("local_train: epochs/batch >= 1");
    check_shape(params);

    TrainReport rep;
    rep.params_out = params;
    if (idx.empty()) return rep;

    std::vector<int> order(idx.begin(), idx.end());
    std::vector<double> grad;
    double loss_sum = 0.0;
    for (int e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            std::span<const int> mb(order.data() + start,
                                    std::min<std::size_t>(batch, order.size() - start));
            double loss = loss_and_gradient(rep.params_out, data, mb, &grad);
            bool finite = std::isfinite(loss);
            for (double g : grad)
                if (!std::isfinite(g)) finite = false;
            if (!finite) {
                rep.diverged = true;
                rep.params_out = params;
                rep.steps = 0;
                rep.mean_loss = 0.0;
                return rep;
            }
            for (std::size_t k = 0; k < grad.size(); ++k) rep.params_out.values[k] -= lr * grad[k];
            loss_sum += loss;
            rep.steps += 1;
        }
    }
    rep.mean_loss = loss_sum / rep.steps;
    return rep;
}

double evaluate_accuracy(const ModelParams& params, const Dataset& test) {
    if (test.size() == 0) throw std::invalid_argument("evaluate_accuracy: empty test set");
    int correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        auto logits = forward_logits(params, test.features[i]);
        int best = 0;
        for (int c = 1; c < params.shape.n_classes; ++c)
            if (logits[c] > logits[best]) best = c;
        if (best == test.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::vector<double> per_sample_losses(const ModelParams& params, const Dataset& data,
                                      std::span<const int> idx) {
    if (idx.empty()) throw std::invalid_argument("per_sample_losses: B must be >= 1");
    std::vector<double> out;
    out.reserve(idx.size());
    for (int i : idx) {
        auto logits = forward_logits(params, data.features[i]);
        double loss = softmax_ce(logits, data.labels[i], nullptr);
        if (!std::isfinite(loss)) throw std::runtime_error("per_sample_losses: non-finite loss");
        out.push_back(loss);
    }
    return out;
}

double gradient_check(const ModelParams& params, const Dataset& data, std::span<const int> idx,
                      double epsilon, Rng& rng, int max_coords) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("gradient_check: epsilon must be > 0");
    std::vector<double> analytic;
    loss_and_gradient(params, data, idx, &analytic);

    std::vector<int> coords(params.values.size());
    std::iota(coords.begin(), coords.end(), 0);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(std::min<std::size_t>(coords.size(), max_coords));

    double max_rel = 0.0;
    ModelParams probe = params;
    for (int k : coords) {
        double orig = probe.values[k];
        probe.values[k] = orig + epsilon;
        double lp = loss_and_gradient(probe, data, idx, nullptr);
        probe.values[k] = orig - epsilon;
        double lm = loss_and_gradient(probe, data, idx, nullptr);
        probe.values[k] = orig;
        double numeric = (lp - lm) / (2.0 * epsilon);
        double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, std::abs(analytic[k] - numeric) / denom);
    }
    return max_rel;
}

void save_params(const ModelParams& p, std::ostream& out) {
    out << p.shape.dim << " " << p.shape.hidden << " " << p.shape.n_classes << "\n";
    char buf[64];
    for (double v : p.values) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        out << std::string_view(buf, end - buf) << '\n';
    }
}

ModelParams load_params(std::istream& in) {
    ModelParams p;
    if (!(in >> p.shape.dim >> p.shape.hidden >> p.shape.n_classes))
        throw std::runtime_error("params: bad shape header");
    double v;
    while (in >> v) p.values.push_back(v);
    check_shape(p);
    return p;
}

}  // namespace hatdfed
