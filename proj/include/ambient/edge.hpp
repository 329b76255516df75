#pragma once

// Edge agent: classifies windows locally, debounces the labels into
// atomic-activity events and ships them to the cloud, spilling to a local
// file while the cloud is unreachable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/labels.hpp"
#include "ambient/model.hpp"
#include "ambient/net.hpp"
#include "ambient/store.hpp"
#include "ambient/trace.hpp"
#include "ambient/wire.hpp"

namespace ambient {

/// The classifier has no idle class, so quiet windows are recognised from
/// the raw signal: no presence, low sound, no movement.
struct IdleGate {
    double max_pir_fraction = 0.05;
    double max_audio_mean = 0.3;
    double max_accel_std = 0.05;

    bool is_idle(const Window& w) const {
        auto mean = [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v;
            return s / static_cast<double>(x.size());
        };
        auto stdev = [&](std::span<const double> x) {
            const double m = mean(x);
            double s = 0.0;
            for (double v : x) s += (v - m) * (v - m);
            return std::sqrt(s / static_cast<double>(x.size()));
        };
        if (mean(w.channel(*channel_index("pir"))) > max_pir_fraction) return false;
        if (mean(w.channel(*channel_index("audio"))) > max_audio_mean) return false;
        for (const char* axis : {"accel_x", "accel_y", "accel_z"})
            if (stdev(w.channel(*channel_index(axis))) > max_accel_std) return false;
        return true;
    }
};

struct DebounceConfig {
    std::size_t votes = 3;
    double min_confidence = 0.6;
};

/// Majority vote over the last `votes` window labels. A label becomes
/// current once it holds a strict majority of a full history and its voters'
/// mean confidence clears the threshold.
class Debouncer {
public:
    explicit Debouncer(DebounceConfig cfg = {}) : cfg_(cfg) {
        if (cfg_.votes == 0) throw ArgumentError("debounce needs at least one vote");
        if (cfg_.min_confidence < 0.0 || cfg_.min_confidence > 1.0)
            throw ArgumentError("debounce confidence must lie in [0, 1]");
    }

    struct Change {
        std::string label;
        double confidence = 0.0;
    };

    std::optional<Change> push(std::string label, double confidence) {
        history_.push_back({std::move(label), confidence});
        if (history_.size() > cfg_.votes) history_.pop_front();
        if (history_.size() < cfg_.votes) return std::nullopt;

        std::map<std::string, std::pair<std::size_t, double>> tally;
        for (const auto& [l, c] : history_) {
            auto& t = tally[l];
            ++t.first;
            t.second += c;
        }
        for (const auto& [l, t] : tally) {
            if (2 * t.first <= history_.size()) continue;
            if (l == current_) return std::nullopt;
            const double mean_conf = t.second / static_cast<double>(t.first);
            if (mean_conf < cfg_.min_confidence) return std::nullopt;
            current_ = l;
            return Change{l, mean_conf};
        }
        return std::nullopt;
    }

    const std::string& current() const noexcept { return current_; }

private:
    DebounceConfig cfg_;
    std::deque<std::pair<std::string, double>> history_;
    std::string current_;
};

struct EdgeConfig {
    std::string device_id = "edge-1";
    DebounceConfig debounce;
    IdleGate idle;
    std::size_t window_len = kWindowLen;
    std::size_t hop = kHop;
    std::uint64_t first_seq = 1;
};

/// Stateful window-to-event stage.
class EdgeClassifier {
public:
    EdgeClassifier(const ModelParams& params, EdgeConfig cfg)
        : params_(params), cfg_(std::move(cfg)), debouncer_(cfg_.debounce), next_seq_(cfg_.first_seq) {
        if (cfg_.device_id.empty()) throw ArgumentError("device id must not be empty");
    }

    /// `end_ts` is the timestamp of the window's last sample boundary.
    std::optional<AtomicActivityEvent> push(const Window& w, double end_ts) {
        std::string label;
        double conf = 1.0;
        if (cfg_.idle.is_idle(w)) {
            label = std::string(kIdleLabel);
        } else {
            auto p = predict(w, params_);
            label = std::string(p.label());
            conf = p.confidence();
        }
        auto change = debouncer_.push(std::move(label), conf);
        if (!change || change->label == kIdleLabel) return std::nullopt;
        return AtomicActivityEvent{cfg_.device_id, next_seq_++, end_ts, change->label, change->confidence};
    }

    std::uint64_t next_seq() const noexcept { return next_seq_; }
    const EdgeConfig& config() const noexcept { return cfg_; }

private:
    const ModelParams& params_;
    EdgeConfig cfg_;
    Debouncer debouncer_;
    std::uint64_t next_seq_;
};

/// All events a trace produces, without any transport.
inline std::vector<AtomicActivityEvent> classify_trace(const SensorTrace& trace, const ModelParams& params,
                                                       const EdgeConfig& cfg = {}) {
    EdgeClassifier edge(params, cfg);
    std::vector<AtomicActivityEvent> out;
    for (const auto& w : segment_windows(trace, cfg.window_len, cfg.hop))
        if (auto e = edge.push(w, trace.time_at(w.origin_index + w.length))) out.push_back(std::move(*e));
    return out;
}

// ---------------------------------------------------------------------------
// delivery

class EventSink {
public:
    virtual ~EventSink() = default;
    /// Delivers one event and returns the reminders sent back before its ack.
    /// Throws TransportError when the event may not have been accepted.
    virtual std::vector<Reminder> deliver(const AtomicActivityEvent& e) = 0;
};

/// Persistent NDJSON connection to the cloud; reconnects lazily.
class TcpEventSink final : public EventSink {
public:
    explicit TcpEventSink(HostPort addr, std::chrono::milliseconds reply_timeout = std::chrono::seconds(10))
        : addr_(std::move(addr)), timeout_(reply_timeout) {}

    std::vector<Reminder> deliver(const AtomicActivityEvent& e) override {
        try {
            if (!sock_.valid()) {
                sock_ = connect_tcp(addr_);
                reader_ = std::make_unique<LineReader>(sock_.fd());
            }
            send_line(sock_.fd(), encode(e));
            std::vector<Reminder> reminders;
            for (;;) {
                auto line = reader_->next(timeout_);
                if (!line) throw TransportError("cloud closed the connection");
                if (line->empty()) continue;
                auto msg = decode(*line);
                if (auto* r = std::get_if<Reminder>(&msg)) {
                    reminders.push_back(std::move(*r));
                } else if (auto* a = std::get_if<Ack>(&msg)) {
                    if (a->seq_no == e.seq_no) return reminders;
                } else if (auto* err = std::get_if<ErrorReply>(&msg)) {
                    throw TransportError("cloud rejected event " + std::to_string(e.seq_no) + ": " + err->message);
                }
            }
        } catch (const Error&) {
            reset();
            throw;
        }
    }

    void reset() {
        reader_.reset();
        sock_.close();
    }

private:
    HostPort addr_;
    std::chrono::milliseconds timeout_;
    Socket sock_;
    std::unique_ptr<LineReader> reader_;
};

struct RetryPolicy {
    std::size_t attempts = 3;
    std::chrono::duration<double> initial_backoff = std::chrono::seconds(1);
    double multiplier = 2.0;
};

using SleepFn = std::function<void(std::chrono::duration<double>)>;

inline void real_sleep(std::chrono::duration<double> d) { std::this_thread::sleep_for(d); }

struct SendOutcome {
    bool delivered = false;
    std::vector<Reminder> reminders;
};

/// Bounded retry, then spill to an append-only NDJSON file. Spilled events
/// are replayed in order before anything newer is sent.
class ReliableSender {
public:
    ReliableSender(EventSink& sink, std::string spill_path, RetryPolicy policy = {}, SleepFn sleep = real_sleep,
                   LogFn log = {})
        : sink_(sink), spill_path_(std::move(spill_path)), policy_(policy), sleep_(std::move(sleep)),
          log_(std::move(log)) {
        if (policy_.attempts == 0) throw ArgumentError("retry policy needs at least one attempt");
        auto replay = store_replay(spill_path_);
        for (const auto& w : replay.warnings) note("spill file: " + w);
        for (auto& rec : replay.records)
            if (auto* e = std::get_if<AtomicActivityEvent>(&rec)) pending_.push_back(std::move(*e));
        if (!pending_.empty()) note(std::to_string(pending_.size()) + " spilled events awaiting replay");
    }

    SendOutcome send(const AtomicActivityEvent& e) {
        SendOutcome out;
        if (!pending_.empty()) {
            auto flushed = flush_once();
            out.reminders = std::move(flushed);
            if (!pending_.empty()) {
                spill(e);
                return out;
            }
        }
        for (std::size_t attempt = 0; attempt < policy_.attempts; ++attempt) {
            if (attempt > 0) sleep_(backoff(attempt - 1));
            try {
                auto r = sink_.deliver(e);
                out.reminders.insert(out.reminders.end(), r.begin(), r.end());
                out.delivered = true;
                return out;
            } catch (const Error& err) {
                note("delivery of seq " + std::to_string(e.seq_no) + " failed (attempt " +
                     std::to_string(attempt + 1) + "/" + std::to_string(policy_.attempts) + "): " + err.what());
            }
        }
        spill(e);
        return out;
    }

    /// Replays spilled events (one attempt each, stopping at the first
    /// failure) and returns any reminders they produced.
    std::vector<Reminder> flush_once() {
        std::vector<Reminder> reminders;
        std::size_t sent = 0;
        for (const auto& e : pending_) {
            try {
                auto r = sink_.deliver(e);
                reminders.insert(reminders.end(), r.begin(), r.end());
                ++sent;
            } catch (const Error& err) {
                note(std::string("spill replay paused: ") + err.what());
                break;
            }
        }
        if (sent > 0) {
            pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(sent));
            rewrite_spill();
            note("replayed " + std::to_string(sent) + " spilled events");
        }
        return reminders;
    }

    /// Flush with the full retry schedule; true when nothing is left.
    bool drain(std::vector<Reminder>* reminders = nullptr) {
        for (std::size_t attempt = 0; attempt < policy_.attempts && !pending_.empty(); ++attempt) {
            if (attempt > 0) sleep_(backoff(attempt - 1));
            auto r = flush_once();
            if (reminders) reminders->insert(reminders->end(), r.begin(), r.end());
        }
        return pending_.empty();
    }

    std::size_t pending() const noexcept { return pending_.size(); }
    std::size_t spilled_total() const noexcept { return spilled_total_; }

private:
    std::chrono::duration<double> backoff(std::size_t k) const {
        return policy_.initial_backoff * std::pow(policy_.multiplier, static_cast<double>(k));
    }

    void spill(const AtomicActivityEvent& e) {
        if (!spill_store_) spill_store_ = std::make_unique<EventStore>(spill_path_);
        spill_store_->append(Message{e});
        pending_.push_back(e);
        ++spilled_total_;
        note("spilled seq " + std::to_string(e.seq_no) + " to " + spill_path_);
    }

    void rewrite_spill() {
        spill_store_.reset();
        const std::string tmp = spill_path_ + ".tmp";
        std::filesystem::remove(tmp);
        {
            EventStore out(tmp);
            std::vector<Message> batch(pending_.begin(), pending_.end());
            out.append(batch);
        }
        std::filesystem::rename(tmp, spill_path_);
    }

    void note(const std::string& line) const {
        if (log_) log_(line);
    }

    EventSink& sink_;
    std::string spill_path_;
    RetryPolicy policy_;
    SleepFn sleep_;
    LogFn log_;
    std::deque<AtomicActivityEvent> pending_;
    std::unique_ptr<EventStore> spill_store_;
    std::size_t spilled_total_ = 0;
};

struct EdgeRunReport {
    std::vector<AtomicActivityEvent> events;
    std::vector<Reminder> reminders;
    std::size_t spilled = 0;
    std::size_t undelivered = 0;
};

/// Streams a trace through the classifier and the sender, window by window.
/// `stop` is polled between windows.
inline EdgeRunReport edge_run(const SensorTrace& trace, const ModelParams& params, ReliableSender& sender,
                              const EdgeConfig& cfg = {}, const std::function<bool()>& stop = {}) {
    EdgeClassifier edge(params, cfg);
    EdgeRunReport report;
    for (const auto& w : segment_windows(trace, cfg.window_len, cfg.hop)) {
        if (stop && stop()) break;
        auto e = edge.push(w, trace.time_at(w.origin_index + w.length));
        if (!e) continue;
        report.events.push_back(*e);
        auto outcome = sender.send(*e);
        report.reminders.insert(report.reminders.end(), outcome.reminders.begin(), outcome.reminders.end());
    }
    sender.drain(&report.reminders);
    report.spilled = sender.spilled_total();
    report.undelivered = sender.pending();
    return report;
}

}  // namespace ambient
