#include <gtest/gtest.h>

#include <filesystem>

#include "ambient/edge.hpp"
#include "ambient/pipeline.hpp"
#include "shared_model.hpp"

using namespace ambient;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    auto p = fs::temp_directory_path() / ("ambient_" + std::to_string(::getpid()) + "_" + name);
    fs::remove(p);
    return p.string();
}

AtomicActivityEvent ev(std::uint64_t seq, const std::string& label = "eat") { return {"d1", seq, 1.0 * seq, label, 0.9}; }

// Fails the first `failures` deliveries, then records everything.
class FakeSink final : public EventSink {
public:
    std::size_t failures = 0;
    std::vector<AtomicActivityEvent> delivered;
    std::size_t calls = 0;

    std::vector<Reminder> deliver(const AtomicActivityEvent& e) override {
        ++calls;
        if (failures > 0) {
            --failures;
            throw TransportError("cloud unreachable");
        }
        delivered.push_back(e);
        if (e.label == "pour_water") return {Reminder{e.device_id, e.ts, "forgetting medication", "m", Severity::warning, {}}};
        return {};
    }
};

struct SleepLog {
    std::vector<double> seconds;
    SleepFn fn() {
        return [this](std::chrono::duration<double> d) { seconds.push_back(d.count()); };
    }
};

}  // namespace

TEST(Debouncer, NeedsAFullHistoryAndAStrictMajority) {
    Debouncer d;
    EXPECT_FALSE(d.push("eat", 0.9));
    EXPECT_FALSE(d.push("eat", 0.9));
    auto c = d.push("chop", 0.9);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->label, "eat");
    EXPECT_NEAR(c->confidence, 0.9, 1e-12);
    auto next = d.push("chop", 0.9);  // eat, chop, chop
    ASSERT_TRUE(next);
    EXPECT_EQ(next->label, "chop");
    EXPECT_EQ(d.current(), "chop");
}

TEST(Debouncer, NoRepeatsAndConfidenceFloor) {
    Debouncer d;
    d.push("eat", 0.9);
    d.push("eat", 0.9);
    ASSERT_TRUE(d.push("eat", 0.9));
    EXPECT_FALSE(d.push("eat", 0.9));
    EXPECT_FALSE(d.push("write", 0.5));
    EXPECT_FALSE(d.push("write", 0.5));  // majority but mean 0.5 < 0.6
    EXPECT_EQ(d.current(), "eat");
    auto c = d.push("write", 0.95);
    ASSERT_TRUE(c);
    EXPECT_NEAR(c->confidence, (0.5 + 0.5 + 0.95) / 3.0, 1e-12);

    Debouncer split;
    split.push("a", 1.0);
    split.push("b", 1.0);
    EXPECT_FALSE(split.push("c", 1.0));
    EXPECT_THROW(Debouncer(DebounceConfig{0, 0.5}), ArgumentError);
    EXPECT_THROW(Debouncer(DebounceConfig{3, 1.5}), ArgumentError);
}

TEST(IdleGate, QuietWindowsOnly) {
    IdleGate gate;
    auto idle = generate_activity("idle", 4.0, 1);
    for (const auto& w : segment_windows(idle, kWindowLen, kHop)) EXPECT_TRUE(gate.is_idle(w));
    auto corpus = build_corpus(10, 42);
    for (const auto& w : corpus.train) EXPECT_FALSE(gate.is_idle(w)) << *w.label;
}

TEST(ReliableSender, RetriesWithBackoffThenSpills) {
    auto spill = temp_path("spill_retry.ndjson");
    FakeSink sink;
    SleepLog sleeps;
    ReliableSender sender(sink, spill, {}, sleeps.fn());

    sink.failures = 2;
    auto first = sender.send(ev(1));
    EXPECT_TRUE(first.delivered);
    EXPECT_EQ(sleeps.seconds, (std::vector<double>{1.0, 2.0}));

    sink.failures = 3;
    auto second = sender.send(ev(2));
    EXPECT_FALSE(second.delivered);
    EXPECT_EQ(sender.pending(), 1u);
    EXPECT_EQ(store_replay(spill).records.size(), 1u);

    // While the sink stays down, new events queue behind the spilled one.
    sink.failures = 1;
    EXPECT_FALSE(sender.send(ev(3)).delivered);
    EXPECT_EQ(sender.pending(), 2u);

    auto third = sender.send(ev(4, "pour_water"));
    EXPECT_TRUE(third.delivered);
    EXPECT_EQ(sender.pending(), 0u);
    EXPECT_EQ(third.reminders.size(), 1u);
    ASSERT_EQ(sink.delivered.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(sink.delivered[i].seq_no, i + 1);  // order kept
    EXPECT_TRUE(store_replay(spill).records.empty());
    EXPECT_EQ(sender.spilled_total(), 2u);
    fs::remove(spill);
}

TEST(ReliableSender, SpillSurvivesRestart) {
    auto spill = temp_path("spill_restart.ndjson");
    SleepLog sleeps;
    {
        FakeSink down;
        down.failures = 1000;
        ReliableSender sender(down, spill, {}, sleeps.fn());
        for (std::uint64_t i = 1; i <= 3; ++i) sender.send(ev(i));
        EXPECT_FALSE(sender.drain());
        EXPECT_EQ(sender.pending(), 3u);
    }
    FakeSink up;
    ReliableSender sender(up, spill, {}, sleeps.fn());
    EXPECT_EQ(sender.pending(), 3u);
    sender.send(ev(4));
    ASSERT_EQ(up.delivered.size(), 4u);
    EXPECT_EQ(up.delivered.front().seq_no, 1u);
    EXPECT_EQ(up.delivered.back().seq_no, 4u);
    EXPECT_TRUE(sender.drain());
    fs::remove(spill);
}

TEST(EdgeClassifier, MedicationScenarioEvents) {
    const auto& params = test_support::default_model();
    auto trace = generate_scenario(medication_scenario(42));
    auto events = classify_trace(trace, params);
    ASSERT_EQ(events.size(), 4u);
    const std::vector<std::string> want{"teeth", "hand_wash", "pour_water", "eat"};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(events[i].label, want[i]);
        EXPECT_EQ(events[i].seq_no, i + 1);
        EXPECT_GE(events[i].confidence, 0.6);
        EXPECT_EQ(events[i].device_id, "edge-1");
        if (i) {
            EXPECT_GT(events[i].ts, events[i - 1].ts);
        }
    }
    EXPECT_EQ(classify_trace(trace, params), events);
    EXPECT_TRUE(classify_trace(generate_activity("idle", 10.0, 3), params).empty());
}

TEST(EdgeLoopback, MedicationScenarioOverTcp) {
    const auto& params = test_support::default_model();
    Config cfg;
    auto trace = generate_scenario(medication_scenario(42));
    auto report = run_loopback(trace, params, cfg, test_support::work_dir() + "/edge_loopback");
    EXPECT_EQ(report.events.size(), 4u);
    ASSERT_EQ(report.reminders.size(), 1u);
    EXPECT_EQ(report.reminders[0].complex_label, "forgetting medication");
    EXPECT_EQ(report.stored_events, 4u);
    EXPECT_EQ(report.stored_reminders, 1u);
    EXPECT_TRUE(report.replay_identical);
    EXPECT_EQ(report.undelivered, 0u);
}
