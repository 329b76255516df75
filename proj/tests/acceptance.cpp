// Acceptance harness: prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "ambient/fft.hpp"
#include "ambient/llm.hpp"
#include "ambient/metrics.hpp"
#include "ambient/pipeline.hpp"
#include "ambient/robustness.hpp"
#include "ambient/rules.hpp"
#include "ambient/train.hpp"

using namespace ambient;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Collects failed conditions for one criterion.
struct Check {
    std::vector<std::string> failures;
    std::vector<std::string> facts;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void note(const std::string& fact) { facts.push_back(fact); }
};

struct Shared {
    Config cfg;
    Corpus corpus;
    ModelParams params;
    double train_seconds = 0.0;
};

Shared& shared() {
    static Shared s = [] {
        Shared out;
        out.corpus = build_corpus(out.cfg.n_per_class, out.cfg.seed);
        const auto t0 = Clock::now();
        out.params = train(out.corpus.train, train_config_for(out.cfg)).params;
        out.train_seconds = since(t0);
        return out;
    }();
    return s;
}

void criterion1(Check& c) {
    auto& s = shared();
    auto m = evaluate(s.corpus.test, s.params);
    c.expect(s.train_seconds < 120.0, "training took " + fmt("%.1f s", s.train_seconds));
    c.expect(m.macro_f1 >= 0.90, "macro-F1 " + fmt("%.3f", m.macro_f1) + " < 0.90");
    std::size_t high = 0;
    for (const auto& pc : m.per_class) high += pc.f1 >= 0.95;
    c.expect(high >= 15, std::to_string(high) + " classes at F1 >= 0.95");

    std::vector<std::size_t> order(kNumClasses);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m.per_class[a].f1 < m.per_class[b].f1; });
    std::set<std::string> lowest;
    std::string lowest_text;
    for (std::size_t i = 0; i < 3; ++i) {
        lowest.insert(std::string(kSensedLabels[order[i]]));
        lowest_text += (i ? ", " : "") + std::string(kSensedLabels[order[i]]) + " " +
                       fmt("%.2f", m.per_class[order[i]].f1);
    }
    // Ties at the boundary are fine as long as the overlap classes are not beaten.
    double third = m.per_class[order[2]].f1;
    for (const char* l : {"paperdis", "pour_water", "chat"})
        c.expect(m.per_class[*class_index(l)].f1 <= third, std::string(l) + " is not among the lowest-F1 classes");
    c.note("train " + fmt("%.1f s", s.train_seconds) + ", macro-F1 " + fmt("%.3f", m.macro_f1) + ", " +
           std::to_string(high) + "/20 classes >= 0.95, lowest: " + lowest_text);

    // Keep the trained model for the slower test suites.
    const auto cache = fs::path(AMBIENT_TEST_WORK_DIR) / "default_model.bin";
    if (!fs::exists(cache)) {
        fs::create_directories(cache.parent_path());
        save_model(cache.string() + ".tmp", s.params);
        fs::rename(cache.string() + ".tmp", cache);
    }
}

void criterion2(Check& c) {
    auto row = class_metrics(3, 3, 5);
    c.expect(round2(row.precision) == 0.50 && round2(row.recall) == 0.38 && round2(row.f1) == 0.43,
             "TP=3/FP=3/FN=5 gives " + fmt("%.2f", round2(row.precision)) + "/" + fmt("%.2f", round2(row.recall)) +
                 "/" + fmt("%.2f", round2(row.f1)));
    std::vector<std::size_t> truth;
    for (std::size_t k = 0; k < kNumClasses; ++k) truth.insert(truth.end(), 4, k);
    auto perfect = compute_metrics(truth, truth);
    for (const auto& pc : perfect.per_class)
        c.expect(round2(pc.precision) == 1.0 && round2(pc.recall) == 1.0 && round2(pc.f1) == 1.0,
                 "all-correct row is not 1.00/1.00/1.00");
    c.note("paperdis row 0.50/0.38/0.43, perfect rows 1.00/1.00/1.00");
}

void criterion3(Check& c) {
    auto& s = shared();
    const double clean = evaluate(s.corpus.test, s.params).macro_f1;
    const std::vector<double> sigmas{0.0, 0.5, 1.0, 2.0}, rates{90.0, 45.0, 30.0, 15.0};
    auto rows = robustness_sweep(s.params, s.corpus.test, sigmas, rates);
    std::string text;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        text += (i ? " " : "") + rows[i].kind + "@" + fmt("%g", rows[i].level) + "=" + fmt("%.3f", rows[i].macro_f1);
        if (i > 0 && rows[i].kind == rows[i - 1].kind)
            c.expect(rows[i].macro_f1 <= rows[i - 1].macro_f1 + 0.02,
                     rows[i].kind + " F1 rises by more than 0.02 at level " + fmt("%g", rows[i].level));
    }
    c.expect(rows[0].macro_f1 == clean, "sigma=0 row differs from the clean score");
    c.expect(rows[4].macro_f1 == clean, "90 Hz row differs from the clean score");
    c.note(text);
}

void criterion4(Check& c) {
    using Seq = std::vector<std::string>;
    struct Golden {
        Seq in, out;
        std::string label;
    };
    const std::vector<Golden> goldens{
        {{"teeth", "hand_wash", "pour_water", "eat"},
         {"teeth", "hand_wash", "take_medication", "pour_water", "eat"},
         "forgetting medication"},
        {{"eat", "basketball", "teeth"}, {"teeth", "hand_wash", "eat", "basketball"}, "unhygienic behavior"},
        {{"door_pass", "paperdis"}, {"door_pass", "light_switch", "paperdis"}, "preventing slipping"},
    };
    for (const auto& g : goldens) {
        auto r = check_sequence(g.in, default_ruleset());
        c.expect(r.corrected == g.out, join_sequence(g.in) + " corrected to " + join_sequence(r.corrected));
        c.expect(r.findings.size() == 1 && r.findings[0].complex_label == g.label,
                 join_sequence(g.in) + " has the wrong findings");
        auto again = check_sequence(r.corrected, default_ruleset());
        c.expect(again.corrected == r.corrected && again.findings.empty(), "golden output not idempotent");
    }
    std::mt19937_64 rng(4);
    std::vector<std::string> alphabet;
    for (auto l : kSensedLabels) alphabet.emplace_back(l);
    alphabet.emplace_back("take_medication");
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(1, 12);
    std::size_t failures = 0;
    for (int i = 0; i < 10000; ++i) {
        Seq s(len(rng));
        for (auto& x : s) x = alphabet[pick(rng)];
        try {
            auto r = check_sequence(s, default_ruleset());
            auto again = check_sequence(r.corrected, default_ruleset());
            if (again.corrected != r.corrected || !again.findings.empty() || r.corrected.size() < s.size()) ++failures;
        } catch (const FixpointError&) {
            ++failures;
        }
    }
    c.expect(failures == 0, std::to_string(failures) + " random sequences failed");
    c.note("3 goldens verbatim, 10000 random sequences terminate and are idempotent");
}

void criterion5(Check& c) {
    // rfft against a textbook DFT in extended precision.
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double max_err = 0.0, parseval = 0.0;
    for (std::size_t n : {180u, 90u, 64u, 97u}) {
        std::vector<double> x(n);
        for (auto& v : x) v = d(rng);
        auto spec = rfft(x);
        double te = 0.0, fe = 0.0;
        for (double v : x) te += v * v;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            std::complex<long double> acc = 0;
            for (std::size_t j = 0; j < n; ++j) {
                long double a = -2.0L * std::numbers::pi_v<long double> * ((j * k) % n) / n;
                acc += static_cast<long double>(x[j]) * std::complex<long double>(std::cos(a), std::sin(a));
            }
            max_err = std::max(max_err, static_cast<double>(std::abs(
                                            std::complex<long double>(spec[k].real(), spec[k].imag()) - acc)));
            const bool paired = k != 0 && !(n % 2 == 0 && k == n / 2);
            fe += (paired ? 2.0 : 1.0) * std::norm(spec[k]);
        }
        parseval = std::max(parseval, std::abs(fe / static_cast<double>(n) / te - 1.0));
    }
    c.expect(max_err < 1e-9, "rfft error " + fmt("%.2e", max_err));
    c.expect(parseval < 1e-9, "Parseval error " + fmt("%.2e", parseval));

    auto small = build_corpus(4, 11);
    std::vector<Window> batch(small.train.begin(), small.train.begin() + 6);
    ModelParams p;
    fit_normalization(p, batch);
    init_weights(p, 3, 1.0);
    auto gc = grad_check(p, batch);
    c.expect(gc.max_rel_error < 1e-4, "gradient check " + fmt("%.2e", gc.max_rel_error));

    TrainConfig tiny;
    tiny.epochs = 1;
    tiny.init_scale = 1e-3;
    auto first = train(small.train, tiny);
    const double ce0 = first.loss_history.front();
    c.expect(std::abs(ce0 - std::log(20.0)) <= 0.1, "initial loss " + fmt("%.4f", ce0));

    TrainConfig det;
    det.epochs = 2;
    auto a = train(small.train, det), b = train(small.train, det);
    c.expect(a.params == b.params && a.loss_history == b.loss_history, "training is not bit-deterministic");
    c.note("rfft err " + fmt("%.1e", max_err) + ", Parseval " + fmt("%.1e", parseval) + ", grad rel err " +
           fmt("%.1e", gc.max_rel_error) + ", initial CE " + fmt("%.4f", ce0) + ", bit-deterministic");
}

void criterion6(Check& c) {
    auto& s = shared();
    const auto t0 = Clock::now();
    auto trace = generate_scenario(medication_scenario(s.cfg.seed));
    auto report = run_loopback(trace, s.params, s.cfg, (fs::path(AMBIENT_TEST_WORK_DIR) / "acceptance_e2e").string());
    const double seconds = since(t0);
    std::vector<std::string> labels;
    for (const auto& e : report.events) labels.push_back(e.label);
    const std::vector<std::string> want{"teeth", "hand_wash", "pour_water", "eat"};
    c.expect(labels == want, "edge events: " + join_sequence(labels));
    std::size_t medication = 0;
    for (const auto& r : report.reminders) medication += r.complex_label == "forgetting medication";
    c.expect(report.reminders.size() == 1 && medication == 1,
             std::to_string(report.reminders.size()) + " reminders received");
    c.expect(report.replay_identical, "store replay differs from live state");
    c.expect(report.undelivered == 0, "undelivered events");
    c.expect(seconds < 60.0, "loopback took " + fmt("%.1f s", seconds));
    c.note(join_sequence(labels) + ", 1 reminder, replay identical, " + fmt("%.2f s", seconds));
}

void criterion7(Check& c) {
    ScriptedClient garbage("As an assistant I cannot see any sensors.");
    for (const std::vector<std::string>& s :
         {std::vector<std::string>{"teeth", "hand_wash", "pour_water", "eat"},
          std::vector<std::string>{"eat", "basketball", "teeth"}, std::vector<std::string>{"door_pass", "paperdis"}}) {
        auto engine = check_sequence(s, default_ruleset());
        auto r = verify_with_llm(s, default_ruleset(), garbage);
        c.expect(r.degraded, join_sequence(s) + " not flagged degraded");
        c.expect(r.corrected == engine.corrected && r.findings == engine.findings,
                 join_sequence(s) + " differs from the rule engine");
    }
    const char* live = std::getenv("AMBIENT_LLM_LIVE");
    c.note(std::string("3 scenarios degraded to the rule engine; live LLM tests ") +
           (live && std::string(live) == "1" ? "enabled" : "skipped (AMBIENT_LLM_LIVE unset)"));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"1 classifier quality on the default corpus", criterion1},
        {"2 metric arithmetic", criterion2},
        {"3 robustness sweep shape", criterion3},
        {"4 rule engine goldens and termination", criterion4},
        {"5 numerical suite", criterion5},
        {"6 end-to-end loopback", criterion6},
        {"7 degraded LLM mode", criterion7},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = c.failures.empty();
        failed += !ok;
        std::printf("%s  criterion %s", ok ? "PASS" : "FAIL", name.c_str());
        for (const auto& f : c.facts) std::printf(" | %s", f.c_str());
        std::printf("\n");
        for (const auto& f : c.failures) std::printf("      %s\n", f.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
