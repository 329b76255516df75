#pragma once

// Sensor data model: channel layout, traces, windows, the trace CSV format
// and the degradation transforms used for robustness experiments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/labels.hpp"
#include "ambient/rng.hpp"

namespace ambient {

enum class ChannelKind { binary, continuous };

struct ChannelSpec {
    std::string_view name;
    ChannelKind kind;
    std::string_view unit;
    std::size_t index;
};

inline constexpr std::size_t kNumChannels = 15;
inline constexpr double kCanonicalRateHz = 90.0;
inline constexpr std::size_t kWindowLen = 180;
inline constexpr std::size_t kHop = 90;

inline constexpr std::array<ChannelSpec, kNumChannels> kChannels = {{
    {"pir", ChannelKind::binary, "on/off", 0},
    {"accel_x", ChannelKind::continuous, "g", 1},
    {"accel_y", ChannelKind::continuous, "g", 2},
    {"accel_z", ChannelKind::continuous, "g", 3},
    {"audio", ChannelKind::continuous, "envelope", 4},
    {"rgb_r", ChannelKind::continuous, "counts", 5},
    {"rgb_g", ChannelKind::continuous, "counts", 6},
    {"rgb_b", ChannelKind::continuous, "counts", 7},
    {"pressure", ChannelKind::continuous, "hPa", 8},
    {"humidity", ChannelKind::continuous, "%RH", 9},
    {"mag_x", ChannelKind::continuous, "uT", 10},
    {"mag_y", ChannelKind::continuous, "uT", 11},
    {"mag_z", ChannelKind::continuous, "uT", 12},
    {"gas", ChannelKind::continuous, "kOhm", 13},
    {"temperature", ChannelKind::continuous, "degC", 14},
}};

inline std::optional<std::size_t> channel_index(std::string_view name) {
    for (const auto& ch : kChannels)
        if (ch.name == name) return ch.index;
    return std::nullopt;
}

using ChannelData = std::array<std::vector<double>, kNumChannels>;
using ChannelStats = std::array<double, kNumChannels>;

/// Multi-channel time series at a fixed sample rate. Validated on
/// construction and immutable afterwards.
class SensorTrace {
public:
    SensorTrace(double sample_rate_hz, ChannelData channels,
                std::optional<std::vector<std::string>> labels = std::nullopt, double start_time = 0.0)
        : rate_(sample_rate_hz), channels_(std::move(channels)), labels_(std::move(labels)),
          start_time_(start_time) {
        validate();
    }

    double sample_rate_hz() const noexcept { return rate_; }
    double start_time() const noexcept { return start_time_; }
    std::size_t size() const noexcept { return channels_[0].size(); }
    std::span<const double> channel(std::size_t c) const { return channels_.at(c); }
    const ChannelData& channels() const noexcept { return channels_; }
    const std::optional<std::vector<std::string>>& labels() const noexcept { return labels_; }
    bool has_labels() const noexcept { return labels_.has_value(); }
    double time_at(std::size_t i) const noexcept { return start_time_ + static_cast<double>(i) / rate_; }
    double duration_s() const noexcept { return static_cast<double>(size()) / rate_; }

    friend bool operator==(const SensorTrace&, const SensorTrace&) = default;

private:
    void validate() const {
        if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw ArgumentError("sample rate must be positive");
        if (!std::isfinite(start_time_)) throw ArgumentError("start time must be finite");
        const std::size_t n = channels_[0].size();
        if (n == 0) throw ArgumentError("trace must contain at least one sample");
        for (const auto& spec : kChannels) {
            const auto& data = channels_[spec.index];
            if (data.size() != n) throw ArgumentError("channel " + std::string(spec.name) + " length mismatch");
            for (double v : data) {
                if (!std::isfinite(v)) throw ArgumentError("non-finite value in channel " + std::string(spec.name));
                if (spec.kind == ChannelKind::binary && v != 0.0 && v != 1.0)
                    throw ArgumentError("binary channel out of domain: " + std::string(spec.name));
            }
        }
        if (labels_) {
            if (labels_->size() != n) throw ArgumentError("label sequence length mismatch");
            for (const auto& l : *labels_)
                if (!is_known_label(l)) throw ArgumentError("unknown label '" + l + "'");
        }
    }

    double rate_;
    ChannelData channels_;
    std::optional<std::vector<std::string>> labels_;
    double start_time_;
};

/// Fixed-length slice of all channels; the classifier's unit of input.
/// Values are channel-major: channel c occupies [c*W, (c+1)*W).
struct Window {
    std::vector<double> values;
    std::size_t length = 0;
    std::optional<std::string> label;
    std::size_t origin_index = 0;

    std::span<const double> channel(std::size_t c) const {
        return std::span<const double>(values).subspan(c * length, length);
    }
    std::span<double> channel(std::size_t c) { return std::span<double>(values).subspan(c * length, length); }

    friend bool operator==(const Window&, const Window&) = default;
};

// ---------------------------------------------------------------------------
// Windowing

/// Most frequent label; ties go to the label seen first.
inline std::string majority_label(std::span<const std::string> labels) {
    std::vector<std::pair<std::string_view, std::size_t>> counts;
    for (const auto& l : labels) {
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == l; });
        if (it == counts.end())
            counts.emplace_back(l, 1);
        else
            ++it->second;
    }
    if (counts.empty()) return std::string(kIdleLabel);
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    return std::string(best->first);
}

inline std::size_t window_count(std::size_t n, std::size_t window_len, std::size_t hop) {
    if (window_len > n) return 0;
    return (n - window_len) / hop + 1;
}

inline Window extract_window(const SensorTrace& trace, std::size_t offset, std::size_t window_len) {
    if (offset + window_len > trace.size()) throw ArgumentError("window exceeds trace bounds");
    Window w;
    w.length = window_len;
    w.origin_index = offset;
    w.values.resize(kNumChannels * window_len);
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        auto src = trace.channel(c).subspan(offset, window_len);
        std::copy(src.begin(), src.end(), w.values.begin() + static_cast<std::ptrdiff_t>(c * window_len));
    }
    if (trace.labels()) {
        std::span<const std::string> all(*trace.labels());
        w.label = majority_label(all.subspan(offset, window_len));
    }
    return w;
}

/// Windows at offsets 0, hop, 2*hop, ...; a trailing partial window is
/// dropped. Throws TraceTooShortError when not even one window fits.
inline std::vector<Window> segment_windows(const SensorTrace& trace, std::size_t window_len = kWindowLen,
                                           std::size_t hop = kHop) {
    if (window_len == 0 || hop == 0) throw ArgumentError("window length and hop must be positive");
    if (hop > window_len) throw ArgumentError("hop must not exceed window length");
    if (window_len > trace.size()) throw TraceTooShortError(trace.size(), window_len);
    const std::size_t count = window_count(trace.size(), window_len, hop);
    std::vector<Window> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(extract_window(trace, i * hop, window_len));
    return out;
}

inline SensorTrace window_to_trace(const Window& w, double rate_hz = kCanonicalRateHz) {
    ChannelData data;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        auto ch = w.channel(c);
        data[c].assign(ch.begin(), ch.end());
    }
    std::optional<std::vector<std::string>> labels;
    if (w.label) labels.emplace(w.length, *w.label);
    return SensorTrace(rate_hz, std::move(data), std::move(labels),
                       static_cast<double>(w.origin_index) / rate_hz);
}

// ---------------------------------------------------------------------------
// Degradations

/// Per-channel population standard deviation across a set of windows.
inline ChannelStats channel_std(std::span<const Window> windows) {
    ChannelStats mean{}, m2{};
    std::array<std::size_t, kNumChannels> n{};
    for (const auto& w : windows) {
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            for (double v : w.channel(c)) {
                ++n[c];
                double d = v - mean[c];
                mean[c] += d / static_cast<double>(n[c]);
                m2[c] += d * (v - mean[c]);
            }
        }
    }
    ChannelStats out{};
    for (std::size_t c = 0; c < kNumChannels; ++c) out[c] = n[c] ? std::sqrt(m2[c] / static_cast<double>(n[c])) : 0.0;
    return out;
}

/// Continuous channels: additive Gaussian noise with std sigma*channel_std[c].
/// Binary channels: each sample flipped with probability min(0.5, sigma/10).
inline SensorTrace add_noise(const SensorTrace& trace, double sigma, const ChannelStats& channel_std,
                             std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ArgumentError("noise sigma must be a finite value >= 0");
    if (sigma == 0.0) return trace;
    ChannelData data = trace.channels();
    for (const auto& spec : kChannels) {
        Rng rng(derive_seed(seed, {spec.index}));
        auto& ch = data[spec.index];
        if (spec.kind == ChannelKind::binary) {
            std::bernoulli_distribution flip(std::min(0.5, sigma / 10.0));
            for (double& v : ch)
                if (flip(rng)) v = 1.0 - v;
        } else {
            const double sd = sigma * channel_std[spec.index];
            if (!(sd > 0.0)) continue;
            std::normal_distribution<double> noise(0.0, sd);
            for (double& v : ch) v += noise(rng);
        }
    }
    return SensorTrace(trace.sample_rate_hz(), std::move(data), trace.labels(), trace.start_time());
}

inline std::size_t decimation_factor(double rate_hz, double target_hz) {
    if (!(target_hz > 0.0) || !std::isfinite(target_hz)) throw ArgumentError("target rate must be positive");
    if (target_hz > rate_hz) throw ArgumentError("target rate exceeds source rate");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rate_hz / target_hz)));
}

/// Keeps every k-th sample, k = round(rate / target_hz). Labels follow.
inline SensorTrace downsample(const SensorTrace& trace, double target_hz) {
    const std::size_t k = decimation_factor(trace.sample_rate_hz(), target_hz);
    if (k == 1) return trace;
    const std::size_t n = (trace.size() + k - 1) / k;
    ChannelData data;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        data[c].reserve(n);
        auto src = trace.channel(c);
        for (std::size_t i = 0; i < src.size(); i += k) data[c].push_back(src[i]);
    }
    std::optional<std::vector<std::string>> labels;
    if (trace.labels()) {
        labels.emplace();
        labels->reserve(n);
        for (std::size_t i = 0; i < trace.size(); i += k) labels->push_back((*trace.labels())[i]);
    }
    return SensorTrace(trace.sample_rate_hz() / static_cast<double>(k), std::move(data), std::move(labels),
                       trace.start_time());
}

/// Zero-order hold: repeats every sample `factor` times, then truncates or
/// pads (with the last sample) to `length`.
inline SensorTrace zero_order_hold(const SensorTrace& trace, std::size_t factor, std::size_t length) {
    if (factor == 0 || length == 0) throw ArgumentError("hold factor and length must be positive");
    ChannelData data;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        auto src = trace.channel(c);
        data[c].resize(length);
        for (std::size_t i = 0; i < length; ++i) data[c][i] = src[std::min(i / factor, src.size() - 1)];
    }
    std::optional<std::vector<std::string>> labels;
    if (trace.labels()) {
        labels.emplace(length);
        for (std::size_t i = 0; i < length; ++i)
            (*labels)[i] = (*trace.labels())[std::min(i / factor, trace.size() - 1)];
    }
    return SensorTrace(trace.sample_rate_hz() * static_cast<double>(factor), std::move(data), std::move(labels),
                       trace.start_time());
}

/// Concatenates traces of equal rate; timestamps continue from the first.
inline SensorTrace concat_traces(std::span<const SensorTrace> parts) {
    if (parts.empty()) throw ArgumentError("nothing to concatenate");
    const double rate = parts.front().sample_rate_hz();
    const bool labeled = std::all_of(parts.begin(), parts.end(), [](const auto& t) { return t.has_labels(); });
    ChannelData data;
    std::optional<std::vector<std::string>> labels;
    if (labeled) labels.emplace();
    for (const auto& p : parts) {
        if (p.sample_rate_hz() != rate) throw ArgumentError("cannot concatenate traces with different rates");
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            auto ch = p.channel(c);
            data[c].insert(data[c].end(), ch.begin(), ch.end());
        }
        if (labeled) labels->insert(labels->end(), p.labels()->begin(), p.labels()->end());
    }
    return SensorTrace(rate, std::move(data), std::move(labels), parts.front().start_time());
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_header(bool with_labels) {
    std::string h = "t";
    for (const auto& ch : kChannels) {
        h += ',';
        h += ch.name;
    }
    if (with_labels) h += ",label";
    return h;
}

inline std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string format_time(double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return buf;
}

inline void write_trace_csv(std::ostream& out, const SensorTrace& trace) {
    out << csv_header(trace.has_labels()) << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << format_time(trace.time_at(i));
        for (std::size_t c = 0; c < kNumChannels; ++c) out << ',' << format_value(trace.channel(c)[i]);
        if (trace.has_labels()) out << ',' << (*trace.labels())[i];
        out << '\n';
    }
}

inline std::string trace_to_csv(const SensorTrace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    return os.str();
}

namespace detail {

inline double parse_double_field(std::string_view field, std::size_t line) {
    std::string s(field);
    if (s.empty()) throw ParseError(line, "empty numeric field");
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw ParseError(line, "malformed number '" + s + "'");
    if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + s + "'");
    return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Recovers the sample rate from first/last timestamps. Rates of the form
// 90/k are snapped exactly so that downsampled traces round-trip.
inline double infer_rate(double t0, double t_last, std::size_t n) {
    if (n < 2) return kCanonicalRateHz;
    const double raw = static_cast<double>(n - 1) / (t_last - t0);
    const double k = std::round(kCanonicalRateHz / raw);
    if (k >= 1.0 && std::abs(kCanonicalRateHz / k - raw) <= 1e-6 * raw) return kCanonicalRateHz / k;
    const double k_up = std::round(raw / kCanonicalRateHz);
    if (k_up >= 1.0 && std::abs(kCanonicalRateHz * k_up - raw) <= 1e-6 * raw) return kCanonicalRateHz * k_up;
    return raw;
}

}  // namespace detail

/// Parses the trace CSV format. Errors name the offending line.
inline SensorTrace parse_trace_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool with_labels;
    if (line == csv_header(true))
        with_labels = true;
    else if (line == csv_header(false))
        with_labels = false;
    else
        throw ParseError(1, "malformed header");

    const std::size_t expected_fields = 1 + kNumChannels + (with_labels ? 1 : 0);
    ChannelData data;
    std::vector<std::string> labels;
    std::vector<double> times;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_commas(line);
        if (fields.size() != expected_fields)
            throw ParseError(lineno, "expected " + std::to_string(expected_fields) + " fields, got " +
                                         std::to_string(fields.size()));
        double t = detail::parse_double_field(fields[0], lineno);
        if (!times.empty() && !(t > times.back())) throw ParseError(lineno, "timestamps must increase");
        times.push_back(t);
        for (const auto& spec : kChannels) {
            double v = detail::parse_double_field(fields[1 + spec.index], lineno);
            if (spec.kind == ChannelKind::binary && v != 0.0 && v != 1.0)
                throw ParseError(lineno, "binary channel out of domain: " + std::string(spec.name));
            data[spec.index].push_back(v);
        }
        if (with_labels) {
            std::string label(fields.back());
            if (!is_known_label(label)) throw ParseError(lineno, "unknown label '" + label + "'");
            labels.push_back(std::move(label));
        }
    }
    if (times.empty()) throw ParseError(lineno, "trace has no samples");
    const double rate = detail::infer_rate(times.front(), times.back(), times.size());
    std::optional<std::vector<std::string>> opt_labels;
    if (with_labels) opt_labels = std::move(labels);
    return SensorTrace(rate, std::move(data), std::move(opt_labels), times.front());
}

inline SensorTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open trace file '" + path + "'");
    return parse_trace_csv(in);
}

inline void save_trace(const std::string& path, const SensorTrace& trace) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write trace file '" + path + "'");
    write_trace_csv(out, trace);
    if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace ambient
