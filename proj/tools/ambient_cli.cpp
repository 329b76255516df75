// ambient: corpus generation, training, evaluation, rule checking and the
// edge/cloud gateway pair behind one command.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ambient/cloud.hpp"
#include "ambient/config.hpp"
#include "ambient/edge.hpp"
#include "ambient/llm.hpp"
#include "ambient/llm_http.hpp"
#include "ambient/metrics.hpp"
#include "ambient/pipeline.hpp"
#include "ambient/robustness.hpp"
#include "ambient/rules.hpp"
#include "ambient/syngen.hpp"

namespace {

using namespace ambient;

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAcceptance = 3;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

void install_signal_handlers() {
    struct sigaction sa {};
    sa.sa_handler = on_signal;
    sigemptyset(&sa.sa_mask);
    sigaction(SIGINT, &sa, nullptr);
    sigaction(SIGTERM, &sa, nullptr);
}

void log_line(const std::string& line) { std::cerr << "[ambient] " << line << '\n'; }

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
};

Config resolve(const Options& opt, const std::vector<std::string>& extra, const std::string& command) {
    Config cfg = opt.config_path.empty() ? Config{} : load_config(opt.config_path);
    for (const auto& o : opt.overrides) apply_override(cfg, o);
    for (const auto& o : extra) apply_override(cfg, o);
    validate_config(cfg);
    std::cerr << "[ambient] " << command << " with resolved config:\n" << config_to_text(cfg);
    return cfg;
}

std::unique_ptr<CompletionClient> make_llm(const Config& cfg) {
    if (cfg.llm_client == "mock") return std::make_unique<RuleEngineMockClient>();
    HttpLlmConfig hc;
    hc.endpoint = cfg.llm_endpoint;
    hc.model = cfg.llm_model;
    hc.timeout_s = cfg.llm_timeout_s;
    return std::make_unique<HttpCompletionClient>(hc);
}

// Overrides collected from subcommand flags; only set flags are applied.
struct Flags {
    std::vector<std::string> list;
    template <typename T>
    void add(const std::string& key, const T& value) {
        std::ostringstream os;
        os.precision(17);
        os << value;
        list.push_back(key + "=" + os.str());
    }
};

int cmd_gen(const Config& cfg, const std::string& scenario, const std::string& trace_out) {
    auto corpus = build_corpus(cfg.n_per_class, cfg.seed, signatures_for(cfg));
    save_corpus(cfg.corpus_dir, corpus, cfg);
    std::cout << "corpus: " << corpus.train.size() << " train / " << corpus.test.size() << " test windows in "
              << cfg.corpus_dir << " (train hash " << corpus_hash(corpus.train) << ")\n";
    if (!scenario.empty()) {
        if (scenario != "medication") throw ArgumentError("unknown scenario '" + scenario + "'");
        const auto path = trace_out.empty() ? (fs::path(cfg.corpus_dir) / "scenario_medication.csv").string() : trace_out;
        save_trace(path, generate_scenario(medication_scenario(cfg.seed), signatures_for(cfg)));
        std::cout << "scenario: " << path << '\n';
    }
    return kExitOk;
}

int cmd_train(const Config& cfg) {
    auto result = train_and_save(cfg, log_line);
    std::printf("model: %s\nloss: %.4f -> %.4f over %zu epochs (%.1f s)\n", cfg.model_path.c_str(),
                result.loss_history.front(), result.loss_history.back(), result.loss_history.size() - 1,
                result.seconds);
    return kExitOk;
}

int cmd_eval(const Config& cfg, bool untrained, std::string json_path) {
    auto corpus = load_or_build_corpus(cfg, log_line);
    ModelParams params;
    if (untrained) {
        fit_normalization(params, corpus.train);
        init_weights(params, cfg.seed, cfg.init_scale);
    } else {
        params = load_model(cfg.model_path);
    }
    const auto m = evaluate(corpus.test, params);
    std::cout << format_metrics_table(m);
    if (json_path.empty()) json_path = untrained ? cfg.model_path + ".untrained.metrics.json" : cfg.model_path + ".metrics.json";
    write_text_file(json_path, metrics_to_json(m).dump(2) + "\n");
    std::cout << "metrics json: " << json_path << '\n';
    return kExitOk;
}

int cmd_sweep(const Config& cfg, const std::string& out_path) {
    auto corpus = load_or_build_corpus(cfg, log_line);
    const auto params = load_model(cfg.model_path);
    const std::vector<double> sigmas = {0.0, 0.5, 1.0, 2.0};
    const std::vector<double> rates = {90.0, 45.0, 30.0, 15.0};
    const auto rows = robustness_sweep(params, corpus.test, sigmas, rates);
    const auto csv = sweep_to_csv(rows);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
    } else {
        write_text_file(out_path, csv);
        std::cout << csv << "sweep csv: " << out_path << '\n';
    }
    return kExitOk;
}

void print_findings(const std::vector<std::string>& corrected, const std::vector<Finding>& findings) {
    std::cout << "corrected: " << join_sequence(corrected) << '\n';
    if (findings.empty()) std::cout << "findings: none\n";
    for (const auto& f : findings) {
        std::cout << "finding: " << f.complex_label << " [" << severity_name(f.severity) << ", rule "
                  << f.rule_ordinal << "]";
        if (!f.message.empty()) std::cout << ": " << f.message;
        std::cout << '\n';
    }
}

int cmd_reason(const Config& cfg, const std::string& sequence, bool use_llm) {
    const auto items = split_sequence(sequence);
    if (items.empty()) throw ArgumentError("sequence is empty");
    const auto rules = rules_for(cfg);
    if (!use_llm && !cfg.llm_enabled) {
        auto r = check_sequence(items, rules);
        print_findings(r.corrected, r.findings);
        return kExitOk;
    }
    auto client = make_llm(cfg);
    log_line("llm client: " + client->identity());
    auto tmpl = cloud_config_for(cfg).prompt_template;
    auto r = verify_with_llm(items, rules, *client, tmpl);
    for (const auto& n : r.notes) log_line("llm: " + n);
    print_findings(r.corrected, r.findings);
    if (r.degraded) std::cout << "mode: degraded (rule engine result)\n";
    return kExitOk;
}

int cmd_serve(const Config& cfg) {
    const auto rules = rules_for(cfg);
    std::unique_ptr<CompletionClient> llm;
    if (cfg.llm_enabled) {
        llm = make_llm(cfg);
        log_line("llm client: " + llm->identity());
    }
    fs::path store_path(cfg.store_path);
    if (store_path.has_parent_path()) fs::create_directories(store_path.parent_path());
    auto replay = store_replay(cfg.store_path);
    for (const auto& w : replay.warnings) log_line("store: " + w);
    EventStore store(cfg.store_path);
    CloudCore core(rules, cloud_config_for(cfg), &store, llm.get(), log_line);
    core.restore(replay.records);
    log_line("restored " + std::to_string(replay.records.size()) + " records from " + cfg.store_path);
    CloudServer server(core, log_line);
    auto addr = server.start(parse_host_port(cfg.address));
    std::cout << "listening on " << addr.str() << std::endl;
    while (!g_stop.load() && !core.failed()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    log_line("stopped; store is fsynced per batch");
    return core.failed() ? kExitRuntime : kExitOk;
}

SensorTrace edge_trace(const Config& cfg, const std::string& trace_path, const std::string& scenario) {
    if (!trace_path.empty()) return load_trace(trace_path);
    if (scenario == "medication") return generate_scenario(medication_scenario(cfg.seed), signatures_for(cfg));
    throw ArgumentError(scenario.empty() ? "run-edge needs --trace or --scenario" : "unknown scenario '" + scenario + "'");
}

int cmd_run_edge(const Config& cfg, const std::string& trace_path, const std::string& scenario) {
    const auto trace = edge_trace(cfg, trace_path, scenario);
    const auto params = load_model(cfg.model_path);
    TcpEventSink sink(parse_host_port(cfg.address),
                      std::chrono::milliseconds(static_cast<long>(cfg.reply_timeout_s * 1000)));
    ReliableSender sender(sink, cfg.spill_path, retry_policy_for(cfg), real_sleep, log_line);
    auto report = edge_run(trace, params, sender, edge_config_for(cfg), [] { return g_stop.load(); });
    for (const auto& e : report.events)
        std::printf("event seq=%llu %s confidence=%.2f ts=%.3f\n", static_cast<unsigned long long>(e.seq_no),
                    e.label.c_str(), e.confidence, e.ts);
    for (const auto& r : report.reminders) std::printf("reminder: %s: %s\n", r.complex_label.c_str(), r.message.c_str());
    if (report.undelivered > 0) {
        std::printf("undelivered: %zu events remain in %s\n", report.undelivered, cfg.spill_path.c_str());
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_e2e(const Config& cfg, const std::string& scenario, const std::string& work_dir) {
    if (scenario != "medication") throw ArgumentError("unknown scenario '" + scenario + "'");
    const auto t0 = std::chrono::steady_clock::now();
    const auto params = load_or_train_model(cfg, log_line);
    const auto trace = generate_scenario(medication_scenario(cfg.seed), signatures_for(cfg));
    std::unique_ptr<CompletionClient> llm;
    if (cfg.llm_enabled) llm = make_llm(cfg);
    auto report = run_loopback(trace, params, cfg, work_dir, llm.get(), log_line);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<std::string> labels;
    for (const auto& e : report.events) {
        labels.push_back(e.label);
        std::printf("event seq=%llu %s confidence=%.2f ts=%.3f\n", static_cast<unsigned long long>(e.seq_no),
                    e.label.c_str(), e.confidence, e.ts);
    }
    for (const auto& r : report.reminders)
        std::printf("reminder: %s: %s (corrected: %s)\n", r.complex_label.c_str(), r.message.c_str(),
                    join_sequence(r.corrected).c_str());

    std::vector<std::string> failures;
    const std::vector<std::string> expected = {"teeth", "hand_wash", "pour_water", "eat"};
    if (labels != expected) failures.push_back("events were " + join_sequence(labels));
    if (report.reminders.size() != 1 || report.reminders.front().complex_label != "forgetting medication")
        failures.push_back("expected exactly one 'forgetting medication' reminder, got " +
                           std::to_string(report.reminders.size()));
    if (report.stored_reminders != 1) failures.push_back("store holds " + std::to_string(report.stored_reminders) + " reminders");
    if (report.undelivered != 0) failures.push_back(std::to_string(report.undelivered) + " events undelivered");
    if (!report.replay_identical) failures.push_back("store replay did not reproduce the cloud state");
    if (total >= 60.0) failures.push_back("took " + std::to_string(total) + " s");

    std::printf("store: %s (events %zu, reminders %zu, replay %s)\n", report.store_path.c_str(), report.stored_events,
                report.stored_reminders, report.replay_identical ? "identical" : "DIFFERENT");
    if (!failures.empty()) {
        for (const auto& f : failures) std::printf("e2e FAIL: %s\n", f.c_str());
        return kExitAcceptance;
    }
    std::printf("e2e PASS in %.1f s\n", total);
    return kExitOk;
}

int run(int argc, char** argv) {
    CLI::App app{"ambient: ambient-sensor activity recognition with edge/cloud reasoning"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("-c,--config", opt.config_path, "TOML-style config file")->check(CLI::ExistingFile);
    app.add_option("--set", opt.overrides, "override a config key (section.key=value), repeatable");

    // Per-subcommand flags map onto config keys.
    std::string corpus, model, rules, store, address, spill, device, scenario, trace_out, trace_in, json_path, out_path,
        work_dir = "out/e2e", sequence;
    std::uint64_t seed = 0;
    std::size_t n_per_class = 0, epochs = 0;
    bool untrained = false, use_llm = false;

    auto with_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "random seed"); };
    auto with_corpus = [&](CLI::App* sub) { sub->add_option("--corpus", corpus, "corpus directory"); };
    auto with_model = [&](CLI::App* sub) { sub->add_option("--model", model, "model file"); };
    auto with_rules = [&](CLI::App* sub) { sub->add_option("--rules", rules, "rule DSL file"); };

    auto* gen = app.add_subcommand("gen", "generate the synthetic corpus");
    with_seed(gen);
    with_corpus(gen);
    gen->add_option("--n-per-class", n_per_class, "clips per activity");
    gen->add_option("--scenario", scenario, "also write a scenario trace (medication)");
    gen->add_option("--trace-out", trace_out, "path of the scenario trace CSV");

    auto* train_cmd = app.add_subcommand("train", "train the classifier");
    with_seed(train_cmd);
    with_corpus(train_cmd);
    with_model(train_cmd);
    train_cmd->add_option("--epochs", epochs, "training epochs");

    auto* eval = app.add_subcommand("eval", "per-class metrics on the held-out split");
    with_seed(eval);
    with_corpus(eval);
    with_model(eval);
    eval->add_flag("--untrained", untrained, "evaluate a randomly initialised model");
    eval->add_option("--json", json_path, "where to write the metrics JSON");

    auto* sweep = app.add_subcommand("sweep", "noise and sampling-rate robustness sweep");
    with_seed(sweep);
    with_corpus(sweep);
    with_model(sweep);
    sweep->add_option("--out", out_path, "CSV output path ('-' for stdout)");

    auto* reason = app.add_subcommand("reason", "check an activity sequence against the rules");
    reason->add_option("sequence", sequence, "activities separated by '->'")->required();
    with_rules(reason);
    reason->add_flag("--llm", use_llm, "verify through the configured LLM client");

    auto* serve = app.add_subcommand("serve-cloud", "run the cloud gateway");
    with_rules(serve);
    serve->add_option("--listen", address, "listen address host:port");
    serve->add_option("--store", store, "append-only store file");
    serve->add_flag("--llm", use_llm, "verify sequences through the configured LLM client");

    auto* edge = app.add_subcommand("run-edge", "classify a trace and stream events to the cloud");
    with_seed(edge);
    with_model(edge);
    edge->add_option("--connect", address, "cloud address host:port");
    edge->add_option("--trace", trace_in, "trace CSV to stream");
    edge->add_option("--scenario", scenario, "generate a scenario trace instead (medication)");
    edge->add_option("--spill", spill, "spill file for undeliverable events");
    edge->add_option("--device", device, "device id");

    auto* e2e = app.add_subcommand("e2e", "scripted loopback run with pass/fail exit code");
    with_seed(e2e);
    with_model(e2e);
    with_rules(e2e);
    e2e->add_option("--scenario", scenario, "scenario name")->required();
    e2e->add_option("--work-dir", work_dir, "directory for the store and spill files");
    e2e->add_flag("--llm", use_llm, "verify sequences through the configured LLM client");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUser;
    }

    Flags f;
    auto* sub = app.get_subcommands().front();
    if (auto* o = sub->get_option_no_throw("--seed"); o && o->count() > 0) f.add("train.seed", seed);
    if (!corpus.empty()) f.list.push_back("paths.corpus=" + corpus);
    if (!model.empty()) f.list.push_back("paths.model=" + model);
    if (!rules.empty()) f.list.push_back("paths.rules=" + rules);
    if (!store.empty()) f.list.push_back("paths.store=" + store);
    if (!spill.empty()) f.list.push_back("paths.spill=" + spill);
    if (!address.empty()) f.list.push_back("gateway.address=" + address);
    if (!device.empty()) f.list.push_back("gateway.device_id=" + device);
    if (n_per_class) f.add("train.n_per_class", n_per_class);
    if (epochs) f.add("train.epochs", epochs);
    if (use_llm) f.list.push_back("llm.enabled=true");

    const std::string name = sub->get_name();
    const Config cfg = resolve(opt, f.list, name);
    install_signal_handlers();
    if (name == "gen") return cmd_gen(cfg, scenario, trace_out);
    if (name == "train") return cmd_train(cfg);
    if (name == "eval") return cmd_eval(cfg, untrained, json_path);
    if (name == "sweep") return cmd_sweep(cfg, out_path);
    if (name == "reason") return cmd_reason(cfg, sequence, use_llm);
    if (name == "serve-cloud") return cmd_serve(cfg);
    if (name == "run-edge") return cmd_run_edge(cfg, trace_in, scenario);
    return cmd_e2e(cfg, scenario, work_dir);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const ModelFormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const ModelInputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const TraceTooShortError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
