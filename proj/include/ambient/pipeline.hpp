#pragma once

// Glue shared by the command-line tool and the acceptance checks: corpus
// files, training artifacts and the loopback scenario.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ambient/cloud.hpp"
#include "ambient/config.hpp"
#include "ambient/edge.hpp"
#include "ambient/error.hpp"
#include "ambient/model.hpp"
#include "ambient/rules.hpp"
#include "ambient/store.hpp"
#include "ambient/syngen.hpp"
#include "ambient/train.hpp"

namespace ambient {

namespace fs = std::filesystem;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write to " + path + " failed");
}

inline SignatureTable signatures_for(const Config& cfg) {
    if (cfg.signatures_path.empty()) return default_signatures();
    auto table = parse_signatures(read_text_file(cfg.signatures_path));
    table.require_complete();
    return table;
}

inline RuleSet rules_for(const Config& cfg) {
    if (cfg.rules_path.empty()) return default_ruleset();
    return parse_rules(read_text_file(cfg.rules_path));
}

inline TrainConfig train_config_for(const Config& cfg) {
    TrainConfig tc;
    tc.learning_rate = cfg.lr;
    tc.momentum = cfg.momentum;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch;
    tc.seed = cfg.seed;
    tc.init_scale = cfg.init_scale;
    return tc;
}

inline std::string corpus_file(const std::string& dir, const char* split) { return (fs::path(dir) / split).string() + ".csv"; }

inline void save_corpus(const std::string& dir, const Corpus& corpus, const Config& cfg) {
    fs::create_directories(dir);
    save_trace(corpus_file(dir, "train"), windows_to_trace(corpus.train));
    save_trace(corpus_file(dir, "test"), windows_to_trace(corpus.test));
    nlohmann::ordered_json m;
    m["n_per_class"] = cfg.n_per_class;
    m["seed"] = cfg.seed;
    m["window"] = kWindowLen;
    m["n_train"] = corpus.train.size();
    m["n_test"] = corpus.test.size();
    m["train_hash"] = corpus_hash(corpus.train);
    m["test_hash"] = corpus_hash(corpus.test);
    write_text_file((fs::path(dir) / "manifest.json").string(), m.dump(2) + "\n");
}

inline bool corpus_on_disk(const std::string& dir) {
    return fs::exists(corpus_file(dir, "train")) && fs::exists(corpus_file(dir, "test"));
}

/// Loads the corpus files when present, otherwise regenerates the corpus
/// from the configured seed (same result as `gen`).
inline Corpus load_or_build_corpus(const Config& cfg, const LogFn& log = {}) {
    if (corpus_on_disk(cfg.corpus_dir)) {
        if (log) log("loading corpus from " + cfg.corpus_dir);
        return {trace_to_windows(load_trace(corpus_file(cfg.corpus_dir, "train"))),
                trace_to_windows(load_trace(corpus_file(cfg.corpus_dir, "test")))};
    }
    if (log) log("no corpus at " + cfg.corpus_dir + "; generating from seed " + std::to_string(cfg.seed));
    return build_corpus(cfg.n_per_class, cfg.seed, signatures_for(cfg));
}

inline nlohmann::ordered_json model_manifest(const Config& cfg, const TrainResult& r, std::uint64_t corpus_digest,
                                             std::size_t n_train) {
    nlohmann::ordered_json m;
    m["format"] = std::string(kModelMagic);
    m["shapes"] = {{"channels", kNumChannels},
                   {"window", ModelShape::kInput},
                   {"time_hidden", ModelShape::kHidden},
                   {"branch_features", ModelShape::kFeature},
                   {"spectrum_bins", ModelShape::kBins},
                   {"fusion_hidden", ModelShape::kFusionHidden},
                   {"classes", ModelShape::kOutput},
                   {"parameters", ModelShape::kTotal}};
    m["seed"] = cfg.seed;
    m["train"] = {{"lr", cfg.lr},
                  {"momentum", cfg.momentum},
                  {"epochs", cfg.epochs},
                  {"batch", cfg.batch},
                  {"init_scale", cfg.init_scale}};
    m["corpus_hash"] = corpus_digest;
    m["n_train"] = n_train;
    m["initial_loss"] = r.loss_history.front();
    m["final_loss"] = r.loss_history.back();
    m["seconds"] = r.seconds;
    return m;
}

inline std::string loss_csv(const TrainResult& r) {
    std::string out = "epoch,loss\n";
    for (std::size_t e = 0; e < r.loss_history.size(); ++e)
        out += std::to_string(e) + "," + format_value(r.loss_history[e]) + "\n";
    return out;
}

/// Trains on the configured corpus and writes the model, its manifest
/// (<model>.json) and the loss curve (<model>.loss.csv).
inline TrainResult train_and_save(const Config& cfg, const LogFn& log = {}) {
    auto corpus = load_or_build_corpus(cfg, log);
    auto result = train(corpus.train, train_config_for(cfg));
    if (auto parent = fs::path(cfg.model_path).parent_path(); !parent.empty()) fs::create_directories(parent);
    save_model(cfg.model_path, result.params);
    write_text_file(cfg.model_path + ".json",
                    model_manifest(cfg, result, corpus_hash(corpus.train), corpus.train.size()).dump(2) + "\n");
    write_text_file(cfg.model_path + ".loss.csv", loss_csv(result));
    if (log) {
        std::ostringstream os;
        os.precision(4);
        os << "trained " << corpus.train.size() << " windows in " << result.seconds << " s; loss "
           << result.loss_history.front() << " -> " << result.loss_history.back();
        log(os.str());
    }
    return result;
}

/// Loads the configured model, training it first when the file is missing.
inline ModelParams load_or_train_model(const Config& cfg, const LogFn& log = {}) {
    if (fs::exists(cfg.model_path)) {
        if (log) log("loading model from " + cfg.model_path);
        return load_model(cfg.model_path);
    }
    if (log) log("no model at " + cfg.model_path + "; training one");
    return train_and_save(cfg, log).params;
}

inline EdgeConfig edge_config_for(const Config& cfg) {
    EdgeConfig ec;
    ec.device_id = cfg.device_id;
    ec.debounce.votes = cfg.debounce_votes;
    ec.debounce.min_confidence = cfg.debounce_confidence;
    ec.window_len = cfg.window;
    ec.hop = cfg.hop;
    return ec;
}

inline CloudConfig cloud_config_for(const Config& cfg) {
    CloudConfig cc;
    cc.session.max_events = cfg.session_max_events;
    cc.session.horizon_s = cfg.session_horizon_s;
    cc.use_llm = cfg.llm_enabled;
    if (!cfg.llm_prompt_path.empty()) cc.prompt_template = read_text_file(cfg.llm_prompt_path);
    return cc;
}

inline RetryPolicy retry_policy_for(const Config& cfg) {
    RetryPolicy p;
    p.attempts = cfg.retry_attempts;
    p.initial_backoff = std::chrono::duration<double>(cfg.retry_backoff_s);
    return p;
}

struct LoopbackReport {
    std::vector<AtomicActivityEvent> events;
    std::vector<Reminder> reminders;          // as received by the edge
    std::size_t stored_events = 0;
    std::size_t stored_reminders = 0;
    bool replay_identical = false;
    std::size_t undelivered = 0;
    double seconds = 0.0;
    std::string store_path;
};

/// Runs a trace through an edge agent into an in-process cloud server over
/// loopback TCP, then restarts the cloud from its store and compares state.
inline LoopbackReport run_loopback(const SensorTrace& trace, const ModelParams& params, const Config& cfg,
                                   const std::string& work_dir, CompletionClient* llm = nullptr,
                                   const LogFn& log = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(work_dir);
    LoopbackReport report;
    report.store_path = (fs::path(work_dir) / "cloud_store.ndjson").string();
    const auto spill_path = (fs::path(work_dir) / "edge_spill.ndjson").string();
    fs::remove(report.store_path);
    fs::remove(spill_path);

    const auto rules = rules_for(cfg);
    const auto cloud_cfg = cloud_config_for(cfg);
    std::map<std::string, DeviceState> live;
    {
        EventStore store(report.store_path);
        CloudCore core(rules, cloud_cfg, &store, llm, log);
        CloudServer server(core, log);
        auto addr = server.start(HostPort{"127.0.0.1", 0});
        TcpEventSink sink(addr, std::chrono::milliseconds(static_cast<long>(cfg.reply_timeout_s * 1000)));
        ReliableSender sender(sink, spill_path, retry_policy_for(cfg), real_sleep, log);
        auto run = edge_run(trace, params, sender, edge_config_for(cfg));
        sink.reset();
        server.stop();
        report.events = std::move(run.events);
        report.reminders = std::move(run.reminders);
        report.undelivered = run.undelivered;
        live = core.snapshot();
    }

    auto replay = store_replay(report.store_path);
    for (const auto& w : replay.warnings)
        if (log) log("store: " + w);
    for (const auto& rec : replay.records) {
        report.stored_events += std::holds_alternative<AtomicActivityEvent>(rec);
        report.stored_reminders += std::holds_alternative<Reminder>(rec);
    }
    CloudCore restarted(rules, CloudConfig{cloud_cfg.session, false, cloud_cfg.prompt_template});
    restarted.restore(replay.records);
    report.replay_identical = restarted.snapshot() == live;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace ambient
