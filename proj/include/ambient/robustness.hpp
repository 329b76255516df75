#pragma once

// Macro-F1 under noise injection and reduced sample rates.

#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ambient/metrics.hpp"
#include "ambient/model.hpp"
#include "ambient/trace.hpp"

namespace ambient {

struct SweepRow {
    std::string kind;  // "noise" or "rate"
    double level = 0.0;
    double macro_f1 = 0.0;
};

/// Test windows with noise of `sigma` times the training-set channel std
/// (the model's normalization std). Window i uses seed + i.
inline std::vector<Window> noisy_windows(std::span<const Window> windows, double sigma, const ChannelStats& channel_std,
                                         std::uint64_t seed) {
    std::vector<Window> out;
    out.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (sigma == 0.0) {
            out.push_back(windows[i]);
            continue;
        }
        auto noisy = add_noise(window_to_trace(windows[i]), sigma, channel_std, seed + i);
        auto w = extract_window(noisy, 0, windows[i].length);
        w.label = windows[i].label;
        w.origin_index = windows[i].origin_index;
        out.push_back(std::move(w));
    }
    return out;
}

/// Downsample to rate_hz, then zero-order hold back to the original length.
inline std::vector<Window> resampled_windows(std::span<const Window> windows, double rate_hz,
                                             double source_rate = kCanonicalRateHz) {
    std::vector<Window> out;
    out.reserve(windows.size());
    for (const auto& src : windows) {
        const auto trace = window_to_trace(src, source_rate);
        const auto low = downsample(trace, rate_hz);
        const std::size_t k = decimation_factor(source_rate, rate_hz);
        auto w = extract_window(zero_order_hold(low, k, src.length), 0, src.length);
        w.label = src.label;
        w.origin_index = src.origin_index;
        out.push_back(std::move(w));
    }
    return out;
}

inline std::vector<SweepRow> robustness_sweep(const ModelParams& params, std::span<const Window> test,
                                              std::span<const double> sigmas, std::span<const double> rates,
                                              std::uint64_t seed = 7) {
    if (sigmas.empty() && rates.empty()) throw ArgumentError("sweep needs at least one level");
    std::vector<SweepRow> rows;
    for (double sigma : sigmas) {
        auto windows = noisy_windows(test, sigma, params.stddev, seed);
        rows.push_back({"noise", sigma, evaluate(windows, params).macro_f1});
    }
    for (double rate : rates) {
        auto windows = resampled_windows(test, rate);
        rows.push_back({"rate", rate, evaluate(windows, params).macro_f1});
    }
    return rows;
}

inline std::string sweep_to_csv(std::span<const SweepRow> rows) {
    std::ostringstream os;
    os << "degradation_kind,level,macro_f1\n";
    for (const auto& r : rows) os << r.kind << ',' << format_value(r.level) << ',' << format_value(r.macro_f1) << '\n';
    return os.str();
}

}  // namespace ambient
