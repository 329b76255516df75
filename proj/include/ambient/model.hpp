#pragma once

// Activity classifier: per-channel time-branch MLP plus a spectral branch
// on rFFT magnitudes (the two FFC branches, fused by addition), then an MLP
// over all channel features and a softmax head.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/fft.hpp"
#include "ambient/labels.hpp"
#include "ambient/rng.hpp"
#include "ambient/trace.hpp"

namespace ambient {

struct ModelShape {
    static constexpr std::size_t kInput = kWindowLen;         // 180
    static constexpr std::size_t kBins = kWindowLen / 2 + 1;  // 91
    static constexpr std::size_t kHidden = 32;
    static constexpr std::size_t kFeature = 16;
    static constexpr std::size_t kFused = kNumChannels * kFeature;  // 240
    static constexpr std::size_t kFusionHidden = 64;
    static constexpr std::size_t kOutput = kNumClasses;

    // Per-channel block.
    static constexpr std::size_t kTimeW1 = kHidden * kInput;
    static constexpr std::size_t kTimeB1 = kHidden;
    static constexpr std::size_t kTimeW2 = kFeature * kHidden;
    static constexpr std::size_t kTimeB2 = kFeature;
    static constexpr std::size_t kSpecW = kFeature * kBins;
    static constexpr std::size_t kSpecB = kFeature;
    static constexpr std::size_t kChannelBlock = kTimeW1 + kTimeB1 + kTimeW2 + kTimeB2 + kSpecW + kSpecB;

    static constexpr std::size_t kFuseW1 = kFusionHidden * kFused;
    static constexpr std::size_t kFuseB1 = kFusionHidden;
    static constexpr std::size_t kFuseW2 = kOutput * kFusionHidden;
    static constexpr std::size_t kFuseB2 = kOutput;

    static constexpr std::size_t kFusionOffset = kNumChannels * kChannelBlock;
    static constexpr std::size_t kTotal = kFusionOffset + kFuseW1 + kFuseB1 + kFuseW2 + kFuseB2;
};

enum class ParamGroup { time_w1, time_b1, time_w2, time_b2, spec_w, spec_b, fuse_w1, fuse_b1, fuse_w2, fuse_b2 };

inline constexpr std::array<ParamGroup, 10> kParamGroups = {
    ParamGroup::time_w1, ParamGroup::time_b1, ParamGroup::time_w2, ParamGroup::time_b2, ParamGroup::spec_w,
    ParamGroup::spec_b,  ParamGroup::fuse_w1, ParamGroup::fuse_b1, ParamGroup::fuse_w2, ParamGroup::fuse_b2};

inline std::string_view group_name(ParamGroup g) {
    switch (g) {
        case ParamGroup::time_w1: return "time_w1";
        case ParamGroup::time_b1: return "time_b1";
        case ParamGroup::time_w2: return "time_w2";
        case ParamGroup::time_b2: return "time_b2";
        case ParamGroup::spec_w: return "spec_w";
        case ParamGroup::spec_b: return "spec_b";
        case ParamGroup::fuse_w1: return "fuse_w1";
        case ParamGroup::fuse_b1: return "fuse_b1";
        case ParamGroup::fuse_w2: return "fuse_w2";
        case ParamGroup::fuse_b2: return "fuse_b2";
    }
    return "?";
}

/// Flat-index ranges [begin, end) of one parameter group. Per-channel
/// groups yield one range per channel.
inline std::vector<std::pair<std::size_t, std::size_t>> group_ranges(ParamGroup g) {
    using S = ModelShape;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    auto per_channel = [&](std::size_t offset, std::size_t size) {
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            std::size_t b = c * S::kChannelBlock + offset;
            out.emplace_back(b, b + size);
        }
    };
    auto fusion = [&](std::size_t offset, std::size_t size) {
        out.emplace_back(S::kFusionOffset + offset, S::kFusionOffset + offset + size);
    };
    switch (g) {
        case ParamGroup::time_w1: per_channel(0, S::kTimeW1); break;
        case ParamGroup::time_b1: per_channel(S::kTimeW1, S::kTimeB1); break;
        case ParamGroup::time_w2: per_channel(S::kTimeW1 + S::kTimeB1, S::kTimeW2); break;
        case ParamGroup::time_b2: per_channel(S::kTimeW1 + S::kTimeB1 + S::kTimeW2, S::kTimeB2); break;
        case ParamGroup::spec_w: per_channel(S::kTimeW1 + S::kTimeB1 + S::kTimeW2 + S::kTimeB2, S::kSpecW); break;
        case ParamGroup::spec_b:
            per_channel(S::kTimeW1 + S::kTimeB1 + S::kTimeW2 + S::kTimeB2 + S::kSpecW, S::kSpecB);
            break;
        case ParamGroup::fuse_w1: fusion(0, S::kFuseW1); break;
        case ParamGroup::fuse_b1: fusion(S::kFuseW1, S::kFuseB1); break;
        case ParamGroup::fuse_w2: fusion(S::kFuseW1 + S::kFuseB1, S::kFuseW2); break;
        case ParamGroup::fuse_b2: fusion(S::kFuseW1 + S::kFuseB1 + S::kFuseW2, S::kFuseB2); break;
    }
    return out;
}

/// Views into a flat parameter (or gradient) buffer.
template <typename T>
struct ChannelWeights {
    std::span<T> time_w1, time_b1, time_w2, time_b2, spec_w, spec_b;
};

template <typename T>
struct FusionWeights {
    std::span<T> w1, b1, w2, b2;
};

template <typename T>
ChannelWeights<T> channel_view(std::span<T> flat, std::size_t c) {
    using S = ModelShape;
    auto block = flat.subspan(c * S::kChannelBlock, S::kChannelBlock);
    std::size_t o = 0;
    auto take = [&](std::size_t n) {
        auto s = block.subspan(o, n);
        o += n;
        return s;
    };
    ChannelWeights<T> v;
    v.time_w1 = take(S::kTimeW1);
    v.time_b1 = take(S::kTimeB1);
    v.time_w2 = take(S::kTimeW2);
    v.time_b2 = take(S::kTimeB2);
    v.spec_w = take(S::kSpecW);
    v.spec_b = take(S::kSpecB);
    return v;
}

template <typename T>
FusionWeights<T> fusion_view(std::span<T> flat) {
    using S = ModelShape;
    auto block = flat.subspan(S::kFusionOffset);
    std::size_t o = 0;
    auto take = [&](std::size_t n) {
        auto s = block.subspan(o, n);
        o += n;
        return s;
    };
    FusionWeights<T> v;
    v.w1 = take(S::kFuseW1);
    v.b1 = take(S::kFuseB1);
    v.w2 = take(S::kFuseW2);
    v.b2 = take(S::kFuseB2);
    return v;
}

/// All classifier weights plus the per-channel z-normalization statistics.
struct ModelParams {
    std::vector<double> weights = std::vector<double>(ModelShape::kTotal, 0.0);
    ChannelStats mean{};
    ChannelStats stddev = [] {
        ChannelStats s;
        s.fill(1.0);
        return s;
    }();

    ChannelWeights<const double> channel(std::size_t c) const {
        return channel_view(std::span<const double>(weights), c);
    }
    FusionWeights<const double> fusion() const { return fusion_view(std::span<const double>(weights)); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline constexpr double kStdFloor = 1e-8;

/// Per-channel mean and std over the given windows (std floored at 1e-8).
inline void fit_normalization(ModelParams& params, std::span<const Window> windows) {
    ChannelStats sum{};
    std::size_t count = 0;
    for (const auto& w : windows) {
        for (std::size_t c = 0; c < kNumChannels; ++c)
            for (double v : w.channel(c)) sum[c] += v;
        count += w.length;
    }
    if (count == 0) throw ArgumentError("cannot fit normalization on empty data");
    for (std::size_t c = 0; c < kNumChannels; ++c) params.mean[c] = sum[c] / static_cast<double>(count);
    ChannelStats sq{};
    for (const auto& w : windows)
        for (std::size_t c = 0; c < kNumChannels; ++c)
            for (double v : w.channel(c)) sq[c] += (v - params.mean[c]) * (v - params.mean[c]);
    for (std::size_t c = 0; c < kNumChannels; ++c)
        params.stddev[c] = std::max(kStdFloor, std::sqrt(sq[c] / static_cast<double>(count)));
}

/// Weights uniform in +-scale/sqrt(fan_in); biases zero.
inline void init_weights(ModelParams& params, std::uint64_t seed, double scale = 1.0) {
    using S = ModelShape;
    Rng rng(derive_seed(seed, {0x1417}));
    auto fill = [&](std::span<double> w, std::size_t fan_in) {
        const double bound = scale / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : w) v = dist(rng);
    };
    std::fill(params.weights.begin(), params.weights.end(), 0.0);
    std::span<double> flat(params.weights);
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        auto v = channel_view(flat, c);
        fill(v.time_w1, S::kInput);
        fill(v.time_w2, S::kHidden);
        fill(v.spec_w, S::kBins);
    }
    auto f = fusion_view(flat);
    fill(f.w1, S::kFused);
    fill(f.w2, S::kFusionHidden);
}

/// Normalized window and its per-channel magnitude spectra. Independent of
/// the weights, so training computes it once per window.
struct PreparedInput {
    using S = ModelShape;
    std::vector<double> input = std::vector<double>(kNumChannels * S::kInput);
    std::vector<double> spectrum = std::vector<double>(kNumChannels * S::kBins);
};

/// Intermediate activations of one forward pass, kept for backprop.
struct Activations {
    using S = ModelShape;
    std::vector<double> hidden = std::vector<double>(kNumChannels * S::kHidden);      // post-ReLU
    std::vector<double> time_feat = std::vector<double>(kNumChannels * S::kFeature);  // post-ReLU
    std::vector<double> spec_feat = std::vector<double>(kNumChannels * S::kFeature);  // post-ReLU
    std::vector<double> fused = std::vector<double>(S::kFused);
    std::vector<double> fusion_hidden = std::vector<double>(S::kFusionHidden);  // post-ReLU
    std::array<double, kNumClasses> logits{};
    std::array<double, kNumClasses> probs{};
};

namespace detail {

// out = relu?(W x + b), W row-major [out.size() x x.size()]
inline void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x,
                   std::span<double> out, bool relu) {
    const std::size_t n_in = x.size();
    for (std::size_t o = 0; o < out.size(); ++o) {
        const double* row = w.data() + o * n_in;
        double acc = b[o];
        for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * x[i];
        out[o] = relu ? std::max(0.0, acc) : acc;
    }
}

inline void softmax(std::span<const double> logits, std::span<double> probs) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        probs[k] = std::exp(logits[k] - m);
        z += probs[k];
    }
    for (double& p : probs) p /= z;
}

}  // namespace detail

inline void check_window(const Window& window) {
    if (window.length != kWindowLen || window.values.size() != kNumChannels * kWindowLen)
        throw ModelInputError("window must be " + std::to_string(kNumChannels) + "x" + std::to_string(kWindowLen));
    for (double v : window.values)
        if (!std::isfinite(v)) throw ModelInputError("non-finite value in window");
}

inline void prepare_input(const Window& window, const ModelParams& params, PreparedInput& in) {
    using S = ModelShape;
    check_window(window);
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        auto src = window.channel(c);
        std::span<double> x(in.input.data() + c * S::kInput, S::kInput);
        const double inv = 1.0 / params.stddev[c];
        for (std::size_t i = 0; i < S::kInput; ++i) x[i] = (src[i] - params.mean[c]) * inv;
        const auto mag = magnitude_spectrum(x);
        std::copy(mag.begin(), mag.end(), in.spectrum.begin() + static_cast<std::ptrdiff_t>(c * S::kBins));
    }
}

inline void forward(const PreparedInput& in, const ModelParams& params, Activations& act) {
    using S = ModelShape;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        const auto w = params.channel(c);
        std::span<const double> x(in.input.data() + c * S::kInput, S::kInput);
        std::span<const double> mag(in.spectrum.data() + c * S::kBins, S::kBins);
        std::span<double> h(act.hidden.data() + c * S::kHidden, S::kHidden);
        std::span<double> t(act.time_feat.data() + c * S::kFeature, S::kFeature);
        std::span<double> s(act.spec_feat.data() + c * S::kFeature, S::kFeature);
        detail::affine(w.time_w1, w.time_b1, x, h, true);
        detail::affine(w.time_w2, w.time_b2, h, t, true);
        detail::affine(w.spec_w, w.spec_b, mag, s, true);
        for (std::size_t k = 0; k < S::kFeature; ++k) act.fused[c * S::kFeature + k] = t[k] + s[k];
    }
    const auto f = params.fusion();
    detail::affine(f.w1, f.b1, act.fused, act.fusion_hidden, true);
    detail::affine(f.w2, f.b2, act.fusion_hidden, act.logits, false);
    detail::softmax(act.logits, act.probs);
}

inline void forward(const Window& window, const ModelParams& params, PreparedInput& in, Activations& act) {
    prepare_input(window, params, in);
    forward(in, params, act);
}

struct Prediction {
    std::array<double, kNumClasses> logits{};
    std::array<double, kNumClasses> probs{};

    std::size_t top() const {
        return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    }
    double confidence() const { return probs[top()]; }
    std::string_view label() const { return kSensedLabels[top()]; }
};

inline Prediction predict(const Window& window, const ModelParams& params) {
    PreparedInput in;
    Activations act;
    forward(window, params, in, act);
    return {act.logits, act.probs};
}

/// Accumulates d(scale * CE(probs, target))/d(weights) into grad.
inline void backward(const PreparedInput& in, const Activations& act, std::size_t target, const ModelParams& params,
                     std::span<double> grad, double scale = 1.0) {
    using S = ModelShape;
    std::array<double, kNumClasses> dlogits{};
    for (std::size_t k = 0; k < kNumClasses; ++k) dlogits[k] = scale * (act.probs[k] - (k == target ? 1.0 : 0.0));

    const auto f = params.fusion();
    auto gf = fusion_view(grad);
    std::array<double, S::kFusionHidden> dg{};
    for (std::size_t o = 0; o < S::kOutput; ++o) {
        const double d = dlogits[o];
        gf.b2[o] += d;
        double* grow = gf.w2.data() + o * S::kFusionHidden;
        const double* wrow = f.w2.data() + o * S::kFusionHidden;
        for (std::size_t i = 0; i < S::kFusionHidden; ++i) {
            grow[i] += d * act.fusion_hidden[i];
            dg[i] += d * wrow[i];
        }
    }
    for (std::size_t i = 0; i < S::kFusionHidden; ++i)
        if (act.fusion_hidden[i] <= 0.0) dg[i] = 0.0;

    std::array<double, S::kFused> dfused{};
    for (std::size_t o = 0; o < S::kFusionHidden; ++o) {
        const double d = dg[o];
        if (d == 0.0) continue;
        gf.b1[o] += d;
        double* grow = gf.w1.data() + o * S::kFused;
        const double* wrow = f.w1.data() + o * S::kFused;
        for (std::size_t i = 0; i < S::kFused; ++i) {
            grow[i] += d * act.fused[i];
            dfused[i] += d * wrow[i];
        }
    }

    for (std::size_t c = 0; c < kNumChannels; ++c) {
        const auto w = params.channel(c);
        auto g = channel_view(grad, c);
        const double* x = in.input.data() + c * S::kInput;
        const double* spec = in.spectrum.data() + c * S::kBins;
        const double* h = act.hidden.data() + c * S::kHidden;
        const double* t = act.time_feat.data() + c * S::kFeature;
        const double* s = act.spec_feat.data() + c * S::kFeature;

        std::array<double, S::kHidden> dh{};
        for (std::size_t k = 0; k < S::kFeature; ++k) {
            const double up = dfused[c * S::kFeature + k];
            if (up == 0.0) continue;
            if (t[k] > 0.0) {
                g.time_b2[k] += up;
                double* grow = g.time_w2.data() + k * S::kHidden;
                const double* wrow = w.time_w2.data() + k * S::kHidden;
                for (std::size_t i = 0; i < S::kHidden; ++i) {
                    grow[i] += up * h[i];
                    dh[i] += up * wrow[i];
                }
            }
            if (s[k] > 0.0) {
                g.spec_b[k] += up;
                double* grow = g.spec_w.data() + k * S::kBins;
                for (std::size_t i = 0; i < S::kBins; ++i) grow[i] += up * spec[i];
            }
        }
        for (std::size_t j = 0; j < S::kHidden; ++j) {
            if (h[j] <= 0.0 || dh[j] == 0.0) continue;
            const double d = dh[j];
            g.time_b1[j] += d;
            double* grow = g.time_w1.data() + j * S::kInput;
            for (std::size_t i = 0; i < S::kInput; ++i) grow[i] += d * x[i];
        }
    }
}

inline double cross_entropy(const Activations& act, std::size_t target) {
    // log-softmax via logits for accuracy near saturation
    const double m = *std::max_element(act.logits.begin(), act.logits.end());
    double z = 0.0;
    for (double l : act.logits) z += std::exp(l - m);
    return -(act.logits[target] - m - std::log(z));
}

// ---------------------------------------------------------------------------
// Serialization: "AMBM1", weights (LE f64, layout order), 15 means, 15 stds.

inline constexpr std::string_view kModelMagic = "AMBM1";

namespace detail {

inline void put_f64(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline double get_f64(std::string_view in, std::size_t& pos) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(bits);
}

}  // namespace detail

inline std::size_t model_file_size() {
    return kModelMagic.size() + 8 * (ModelShape::kTotal + 2 * kNumChannels);
}

inline std::string serialize_model(const ModelParams& params) {
    std::string out(kModelMagic);
    out.reserve(model_file_size());
    for (double v : params.weights) detail::put_f64(out, v);
    for (double v : params.mean) detail::put_f64(out, v);
    for (double v : params.stddev) detail::put_f64(out, v);
    return out;
}

inline ModelParams deserialize_model(std::string_view bytes) {
    if (bytes.substr(0, kModelMagic.size()) != kModelMagic) throw ModelFormatError("bad model magic");
    if (bytes.size() != model_file_size())
        throw ModelFormatError("model file has " + std::to_string(bytes.size()) + " bytes, expected " +
                               std::to_string(model_file_size()));
    ModelParams p;
    std::size_t pos = kModelMagic.size();
    for (double& v : p.weights) v = detail::get_f64(bytes, pos);
    for (double& v : p.mean) v = detail::get_f64(bytes, pos);
    for (double& v : p.stddev) v = detail::get_f64(bytes, pos);
    for (double v : p.weights)
        if (!std::isfinite(v)) throw ModelFormatError("non-finite weight");
    for (std::size_t c = 0; c < kNumChannels; ++c)
        if (!std::isfinite(p.mean[c]) || !(p.stddev[c] >= kStdFloor)) throw ModelFormatError("bad normalization stats");
    return p;
}

inline void save_model(const std::string& path, const ModelParams& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model file '" + path + "'");
    const auto bytes = serialize_model(params);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for '" + path + "'");
}

inline ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFormatError("cannot open model file '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace ambient
