#pragma once

// Per-device cloud state: the recent event window plus the complex labels
// already reported, and the ingest step that turns events into reminders.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "ambient/rules.hpp"
#include "ambient/wire.hpp"

namespace ambient {

struct SessionConfig {
    std::size_t max_events = 16;
    double horizon_s = 1800.0;
};

class SessionBuffer {
public:
    explicit SessionBuffer(SessionConfig cfg = {}) : cfg_(cfg) {
        if (cfg_.max_events == 0) throw ArgumentError("session buffer needs room for at least one event");
        if (!(cfg_.horizon_s > 0.0)) throw ArgumentError("session horizon must be positive");
    }

    /// Appends and evicts by count and by age relative to the new event.
    void push(const AtomicActivityEvent& e) {
        events_.push_back(e);
        while (events_.size() > cfg_.max_events) events_.pop_front();
        while (!events_.empty() && events_.front().ts < e.ts - cfg_.horizon_s) events_.pop_front();
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(events_.size());
        for (const auto& e : events_) out.push_back(e.label);
        return out;
    }

    const std::deque<AtomicActivityEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }

    friend bool operator==(const SessionBuffer& a, const SessionBuffer& b) { return a.events_ == b.events_; }

private:
    SessionConfig cfg_;
    std::deque<AtomicActivityEvent> events_;
};

struct DeviceState {
    SessionBuffer buffer;
    std::uint64_t last_seq = 0;
    bool seen_any = false;
    std::set<std::string> open_labels;

    explicit DeviceState(SessionConfig cfg = {}) : buffer(cfg) {}

    bool is_duplicate(std::uint64_t seq) const noexcept { return seen_any && seq <= last_seq; }

    friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

/// Findings for a buffered label sequence (rule engine, optionally LLM).
using FindingSource = std::function<std::vector<Finding>(const std::vector<std::string>&)>;

inline FindingSource rule_engine_source(const RuleSet& rules) {
    return [&rules](const std::vector<std::string>& seq) { return check_sequence(seq, rules).findings; };
}

/// Applies one accepted event to the state and returns reminders for
/// complex labels that were not already open. Labels whose findings are gone
/// are closed so they can fire again later.
inline std::vector<Reminder> advance_session(DeviceState& st, const AtomicActivityEvent& e,
                                             const FindingSource& source) {
    st.buffer.push(e);
    st.last_seq = e.seq_no;
    st.seen_any = true;
    const auto findings = source(st.buffer.labels());
    std::vector<Reminder> out;
    std::set<std::string> now_open;
    for (const auto& f : findings) {
        now_open.insert(f.complex_label);
        if (st.open_labels.count(f.complex_label)) continue;
        if (std::any_of(out.begin(), out.end(), [&](const Reminder& r) { return r.complex_label == f.complex_label; }))
            continue;
        out.push_back(Reminder{e.device_id, e.ts, f.complex_label, f.message, f.severity, f.corrected});
    }
    st.open_labels = std::move(now_open);
    return out;
}

}  // namespace ambient
