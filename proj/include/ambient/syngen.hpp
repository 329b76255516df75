#pragma once

// Deterministic synthetic activity generator. Every output is a pure
// function of its explicit seed.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ambient/default_signatures.hpp"
#include "ambient/error.hpp"
#include "ambient/labels.hpp"
#include "ambient/rng.hpp"
#include "ambient/trace.hpp"

namespace ambient {

/// Generator parameters for one channel. Binary channels only use on_prob.
struct ChannelSignature {
    double dc = 0.0;
    double amp = 0.0;
    double freq_hz = 0.0;
    double burst_rate = 0.0;  // bursts per second
    double burst_amp = 0.0;
    double noise_std = 0.0;
    double on_prob = 0.0;  // binary: trigger rate per second

    friend bool operator==(const ChannelSignature&, const ChannelSignature&) = default;
};

using ActivitySignature = std::array<ChannelSignature, kNumChannels>;

// Burst shape: amp * exp(-k / kBurstDecay) for k in [0, kBurstLen).
inline constexpr double kBurstDecay = 4.0;
inline constexpr std::size_t kBurstLen = 12;
// PIR hold time after a trigger, in seconds.
inline constexpr double kPirHoldS = 1.0;

class SignatureTable {
public:
    void set(const std::string& label, std::size_t channel, const ChannelSignature& sig) {
        auto [it, inserted] = table_.try_emplace(label);
        (void)inserted;
        it->second.at(channel) = sig;
    }

    const ActivitySignature* find(std::string_view label) const {
        auto it = table_.find(std::string(label));
        return it == table_.end() ? nullptr : &it->second;
    }

    const ActivitySignature& at(std::string_view label) const {
        const auto* sig = find(label);
        if (!sig) throw ArgumentError("no signature for label '" + std::string(label) + "'");
        return *sig;
    }

    bool contains(std::string_view label) const { return find(label) != nullptr; }
    std::size_t size() const noexcept { return table_.size(); }

    /// Throws unless every sensed label has a signature.
    void require_complete() const {
        for (auto label : kSensedLabels)
            if (!contains(label)) throw ArgumentError("signature table lacks label '" + std::string(label) + "'");
    }

    friend bool operator==(const SignatureTable&, const SignatureTable&) = default;

private:
    std::map<std::string, ActivitySignature> table_;
};

/// Parses `sig <label> <channel> key=value ...` lines. Omitted keys are 0.
inline SignatureTable parse_signatures(std::string_view text) {
    SignatureTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw, label, channel;
        if (!(ls >> kw)) continue;
        if (kw != "sig") throw ParseError(lineno, "expected 'sig', got '" + kw + "'");
        if (!(ls >> label >> channel)) throw ParseError(lineno, "expected label and channel");
        if (!is_sensed_label(label) && label != kIdleLabel) throw ParseError(lineno, "unknown label '" + label + "'");
        auto ch = channel_index(channel);
        if (!ch) throw ParseError(lineno, "unknown channel '" + channel + "'");
        ChannelSignature sig;
        std::string kv;
        while (ls >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ParseError(lineno, "expected key=value, got '" + kv + "'");
            std::string key = kv.substr(0, eq);
            double value = detail::parse_double_field(std::string_view(kv).substr(eq + 1), lineno);
            if (key == "dc") sig.dc = value;
            else if (key == "amp") sig.amp = value;
            else if (key == "freq") sig.freq_hz = value;
            else if (key == "burst_rate") sig.burst_rate = value;
            else if (key == "burst_amp") sig.burst_amp = value;
            else if (key == "noise") sig.noise_std = value;
            else if (key == "on_prob") sig.on_prob = value;
            else throw ParseError(lineno, "unknown key '" + key + "'");
        }
        if (sig.freq_hz < 0.0 || sig.freq_hz >= kCanonicalRateHz / 2.0)
            throw ParseError(lineno, "frequency must lie in [0, 45) Hz");
        if (sig.noise_std < 0.0) throw ParseError(lineno, "noise must be >= 0");
        if (sig.burst_rate < 0.0 || sig.burst_rate > kCanonicalRateHz) throw ParseError(lineno, "burst_rate out of range");
        if (sig.on_prob < 0.0 || sig.on_prob > kCanonicalRateHz) throw ParseError(lineno, "on_prob out of range");
        table.set(label, *ch, sig);
    }
    return table;
}

inline const SignatureTable& default_signatures() {
    static const SignatureTable table = [] {
        auto t = parse_signatures(kDefaultSignatureText);
        t.require_complete();
        return t;
    }();
    return table;
}

namespace detail {

inline std::vector<double> synth_continuous(const ChannelSignature& sig, std::size_t n, double rate, Rng& rng) {
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    const double phase = phase_dist(rng);
    std::vector<double> out(n, sig.dc);
    if (sig.amp != 0.0) {
        const double w = 2.0 * std::numbers::pi * sig.freq_hz / rate;
        for (std::size_t i = 0; i < n; ++i) out[i] += sig.amp * std::sin(w * static_cast<double>(i) + phase);
    }
    if (sig.burst_rate > 0.0) {
        std::bernoulli_distribution onset(sig.burst_rate / rate);
        for (std::size_t i = 0; i < n; ++i) {
            if (!onset(rng)) continue;
            for (std::size_t k = 0; k < kBurstLen && i + k < n; ++k)
                out[i + k] += sig.burst_amp * std::exp(-static_cast<double>(k) / kBurstDecay);
        }
    }
    if (sig.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, sig.noise_std);
        for (double& v : out) v += noise(rng);
    }
    return out;
}

inline std::vector<double> synth_binary(const ChannelSignature& sig, std::size_t n, double rate, Rng& rng) {
    std::vector<double> out(n, 0.0);
    if (sig.on_prob <= 0.0) return out;
    std::bernoulli_distribution trigger(sig.on_prob / rate);
    const auto hold = static_cast<std::size_t>(std::llround(kPirHoldS * rate));
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (trigger(rng)) remaining = hold;
        if (remaining > 0) {
            out[i] = 1.0;
            --remaining;
        }
    }
    return out;
}

}  // namespace detail

inline std::size_t samples_for(double duration_s, double rate = kCanonicalRateHz) {
    return static_cast<std::size_t>(std::llround(duration_s * rate));
}

/// One labeled activity trace of round(duration*90) samples at 90 Hz.
inline SensorTrace generate_activity(std::string_view label, double duration_s, std::uint64_t seed,
                                     const SignatureTable& table = default_signatures()) {
    const auto* sig = table.find(label);
    if (!sig) throw ArgumentError("no signature for label '" + std::string(label) + "'");
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ArgumentError("duration must be positive");
    const std::size_t n = samples_for(duration_s);
    if (n < kWindowLen) throw ArgumentError("duration shorter than one window");
    // Label participates in the stream seed so two labels never share noise.
    std::uint64_t label_key = 0;
    for (char c : label) label_key = label_key * 131 + static_cast<unsigned char>(c);
    ChannelData data;
    for (const auto& spec : kChannels) {
        Rng rng(derive_seed(seed, {label_key, spec.index}));
        const auto& cs = (*sig)[spec.index];
        data[spec.index] = spec.kind == ChannelKind::binary ? detail::synth_binary(cs, n, kCanonicalRateHz, rng)
                                                            : detail::synth_continuous(cs, n, kCanonicalRateHz, rng);
    }
    return SensorTrace(kCanonicalRateHz, std::move(data), std::vector<std::string>(n, std::string(label)));
}

struct ScenarioStep {
    std::string label;
    double duration_s = 0.0;
};

struct ScenarioScript {
    std::vector<ScenarioStep> steps;
    std::uint64_t seed = 0;
};

/// Concatenation of per-step traces; step i uses seed + i.
inline SensorTrace generate_scenario(const ScenarioScript& script,
                                     const SignatureTable& table = default_signatures()) {
    if (script.steps.empty()) throw ArgumentError("scenario script is empty");
    std::vector<SensorTrace> parts;
    parts.reserve(script.steps.size());
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        if (samples_for(step.duration_s) < 2 * kWindowLen)
            throw ArgumentError("scenario step '" + step.label + "' shorter than two windows");
        parts.push_back(generate_activity(step.label, step.duration_s, script.seed + i, table));
    }
    return concat_traces(parts);
}

/// The morning-routine scenario used by the medication demo.
inline ScenarioScript medication_scenario(std::uint64_t seed = 42, double step_s = 4.0) {
    return {{{"teeth", step_s}, {"hand_wash", step_s}, {"pour_water", step_s}, {"eat", step_s}}, seed};
}

struct Corpus {
    std::vector<Window> train;
    std::vector<Window> test;
};

/// Balanced corpus of one-window activity clips, split 80/20 per class.
/// Each clip has its own generation seed so the split never slices a trace.
inline Corpus build_corpus(std::size_t n_per_class, std::uint64_t seed,
                           const SignatureTable& table = default_signatures()) {
    if (n_per_class < 2) throw ArgumentError("n_per_class must be >= 2");
    table.require_complete();
    const double clip_s = static_cast<double>(kWindowLen) / kCanonicalRateHz;
    const std::size_t n_train =
        std::min(n_per_class - 1, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n_per_class)))));
    Corpus corpus;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        std::vector<std::size_t> order(n_per_class);
        for (std::size_t i = 0; i < n_per_class; ++i) order[i] = i;
        Rng split_rng(derive_seed(seed, {0x5111, c}));
        std::shuffle(order.begin(), order.end(), split_rng);
        for (std::size_t j = 0; j < n_per_class; ++j) {
            const std::size_t i = order[j];
            auto trace = generate_activity(kSensedLabels[c], clip_s, derive_seed(seed, {c, i}), table);
            auto w = extract_window(trace, 0, kWindowLen);
            (j < n_train ? corpus.train : corpus.test).push_back(std::move(w));
        }
    }
    return corpus;
}

/// FNV-1a over window values and labels; identifies a corpus in manifests.
inline std::uint64_t corpus_hash(std::span<const Window> windows) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& w : windows) {
        feed(w.values.data(), w.values.size() * sizeof(double));
        if (w.label) feed(w.label->data(), w.label->size());
    }
    return h;
}

/// Corpus split file: windows laid end to end as one labeled trace.
inline SensorTrace windows_to_trace(std::span<const Window> windows) {
    if (windows.empty()) throw ArgumentError("no windows");
    std::vector<SensorTrace> parts;
    parts.reserve(windows.size());
    for (const auto& w : windows) parts.push_back(window_to_trace(w));
    return concat_traces(parts);
}

inline std::vector<Window> trace_to_windows(const SensorTrace& trace, std::size_t window_len = kWindowLen) {
    return segment_windows(trace, window_len, window_len);
}

}  // namespace ambient
