#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/model.hpp"
#include "ambient/rng.hpp"

namespace ambient {

struct TrainConfig {
    double learning_rate = 1e-3;
    double momentum = 0.9;
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    std::uint64_t seed = 42;
    double init_scale = 1.0;  // multiplies the +-1/sqrt(fan_in) init bound
};

struct TrainResult {
    ModelParams params;
    // [0] = mean training loss at initialization, [e] = after epoch e.
    std::vector<double> loss_history;
    double seconds = 0.0;
};

inline std::size_t target_of(const Window& w) {
    if (!w.label) throw ArgumentError("training window has no label");
    auto idx = class_index(*w.label);
    if (!idx) throw ArgumentError("label '" + *w.label + "' is not a sensed activity");
    return *idx;
}

/// A window ready for the model: normalized input, spectra and class index.
struct Sample {
    PreparedInput in;
    std::size_t target = 0;
};

inline std::vector<Sample> prepare_samples(std::span<const Window> windows, const ModelParams& params) {
    std::vector<Sample> out(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        out[i].target = target_of(windows[i]);
        prepare_input(windows[i], params, out[i].in);
    }
    return out;
}

/// Mean cross-entropy (times scale) over the batch; gradient written to grad.
inline double loss_and_gradient(const ModelParams& params, std::span<const Sample* const> batch,
                                std::span<double> grad, double scale = 1.0) {
    if (batch.empty()) throw ArgumentError("empty batch");
    std::fill(grad.begin(), grad.end(), 0.0);
    Activations act;
    double loss = 0.0;
    const double per = scale / static_cast<double>(batch.size());
    for (const Sample* s : batch) {
        forward(s->in, params, act);
        loss += cross_entropy(act, s->target);
        backward(s->in, act, s->target, params, grad, per);
    }
    return loss * per;
}

inline double loss_and_gradient(const ModelParams& params, std::span<const Window> batch, std::span<double> grad,
                                double scale = 1.0) {
    if (batch.empty()) throw ArgumentError("empty batch");
    const auto samples = prepare_samples(batch, params);
    std::vector<const Sample*> ptrs;
    for (const auto& s : samples) ptrs.push_back(&s);
    return loss_and_gradient(params, std::span<const Sample* const>(ptrs), grad, scale);
}

inline double mean_loss(const ModelParams& params, std::span<const Sample> samples) {
    if (samples.empty()) throw ArgumentError("empty batch");
    Activations act;
    double loss = 0.0;
    for (const auto& s : samples) {
        forward(s.in, params, act);
        loss += cross_entropy(act, s.target);
    }
    return loss / static_cast<double>(samples.size());
}

inline double mean_loss(const ModelParams& params, std::span<const Window> windows) {
    return mean_loss(params, std::span<const Sample>(prepare_samples(windows, params)));
}

/// Minibatch SGD with momentum on mean cross-entropy. Bit-deterministic for
/// a fixed config and corpus.
inline TrainResult train(std::span<const Window> corpus, const TrainConfig& config) {
    if (corpus.empty()) throw ArgumentError("training corpus is empty");
    if (config.batch_size == 0 || config.epochs == 0 || !(config.learning_rate > 0.0) || config.momentum < 0.0)
        throw ArgumentError("invalid training configuration");
    std::set<std::size_t> classes;
    for (const auto& w : corpus) classes.insert(target_of(w));
    if (classes.size() < 2) throw ArgumentError("training corpus needs at least two classes");

    const auto t0 = std::chrono::steady_clock::now();
    TrainResult result;
    fit_normalization(result.params, corpus);
    init_weights(result.params, config.seed, config.init_scale);
    const auto samples = prepare_samples(corpus, result.params);
    result.loss_history.push_back(mean_loss(result.params, std::span<const Sample>(samples)));

    std::vector<double> grad(ModelShape::kTotal), velocity(ModelShape::kTotal, 0.0);
    std::vector<std::size_t> order(corpus.size());
    std::vector<const Sample*> batch;
    batch.reserve(config.batch_size);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(config.seed, {0xE90C, epoch}));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            batch.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i)
                batch.push_back(&samples[order[i]]);
            loss_and_gradient(result.params, std::span<const Sample* const>(batch), grad);
            auto& w = result.params.weights;
            for (std::size_t i = 0; i < w.size(); ++i) {
                velocity[i] = config.momentum * velocity[i] + grad[i];
                w[i] -= config.learning_rate * velocity[i];
            }
        }
        result.loss_history.push_back(mean_loss(result.params, std::span<const Sample>(samples)));
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

struct GroupCheck {
    ParamGroup group;
    std::size_t checked = 0;
    double rel_error = 0.0;  // ||analytic - numeric|| / (||analytic|| + ||numeric||)
    double analytic_norm = 0.0;
};

struct GradCheckReport {
    std::vector<GroupCheck> groups;
    double max_rel_error = 0.0;
    double grad_norm = 0.0;  // full analytic gradient
};

/// Compares backprop against central differences (step h) on up to
/// `per_group` coordinates of every parameter group (0 = all coordinates).
inline GradCheckReport grad_check(const ModelParams& params, std::span<const Window> batch, double h = 1e-5,
                                  std::size_t per_group = 48, std::uint64_t seed = 1) {
    if (batch.empty()) throw ArgumentError("grad_check needs a non-empty batch");
    std::vector<double> analytic(ModelShape::kTotal);
    loss_and_gradient(params, batch, analytic);

    GradCheckReport report;
    double sq = 0.0;
    for (double g : analytic) sq += g * g;
    report.grad_norm = std::sqrt(sq);

    const auto samples = prepare_samples(batch, params);
    ModelParams probe = params;
    Rng rng(derive_seed(seed, {0x6C}));
    for (ParamGroup g : kParamGroups) {
        std::vector<std::size_t> coords;
        for (auto [b, e] : group_ranges(g))
            for (std::size_t i = b; i < e; ++i) coords.push_back(i);
        if (per_group > 0 && coords.size() > per_group) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(per_group);
            std::sort(coords.begin(), coords.end());
        }
        double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
        for (std::size_t i : coords) {
            const double orig = probe.weights[i];
            probe.weights[i] = orig + h;
            const double up = mean_loss(probe, std::span<const Sample>(samples));
            probe.weights[i] = orig - h;
            const double down = mean_loss(probe, std::span<const Sample>(samples));
            probe.weights[i] = orig;
            const double numeric = (up - down) / (2.0 * h);
            diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
            a2 += analytic[i] * analytic[i];
            n2 += numeric * numeric;
        }
        GroupCheck gc{g, coords.size(), 0.0, std::sqrt(a2)};
        const double denom = std::sqrt(a2) + std::sqrt(n2);
        gc.rel_error = denom > 1e-12 ? std::sqrt(diff2) / denom : 0.0;
        report.max_rel_error = std::max(report.max_rel_error, gc.rel_error);
        report.groups.push_back(gc);
    }
    return report;
}

}  // namespace ambient
