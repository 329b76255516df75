#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ambient/error.hpp"
#include "ambient/labels.hpp"
#include "ambient/model.hpp"

namespace ambient {

struct ClassMetrics {
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  // tp + fn
    bool undefined = false;   // no instances and no predictions

    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

/// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); empty ratios are 0.
inline ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
    ClassMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.support = tp + fn;
    m.undefined = tp + fp + fn == 0;
    m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

using ConfusionMatrix = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;  // [truth][pred]

struct Metrics {
    ConfusionMatrix confusion{};
    std::array<ClassMetrics, kNumClasses> per_class{};
    // Macro averages skip classes flagged `undefined`.
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    std::size_t total = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

inline Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
    Metrics m;
    m.confusion = cm;
    std::size_t correct = 0, defined = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        std::size_t tp = cm[k][k], fp = 0, fn = 0;
        for (std::size_t j = 0; j < kNumClasses; ++j) {
            m.total += cm[k][j];
            if (j == k) continue;
            fp += cm[j][k];
            fn += cm[k][j];
        }
        correct += tp;
        m.per_class[k] = class_metrics(tp, fp, fn);
        if (!m.per_class[k].undefined) {
            ++defined;
            m.macro_precision += m.per_class[k].precision;
            m.macro_recall += m.per_class[k].recall;
            m.macro_f1 += m.per_class[k].f1;
        }
    }
    if (defined) {
        m.macro_precision /= static_cast<double>(defined);
        m.macro_recall /= static_cast<double>(defined);
        m.macro_f1 /= static_cast<double>(defined);
    }
    m.accuracy = m.total ? static_cast<double>(correct) / static_cast<double>(m.total) : 0.0;
    return m;
}

inline Metrics compute_metrics(std::span<const std::size_t> truth, std::span<const std::size_t> predicted) {
    if (truth.size() != predicted.size()) throw ArgumentError("truth/prediction length mismatch");
    ConfusionMatrix cm{};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= kNumClasses || predicted[i] >= kNumClasses) throw ArgumentError("class index out of range");
        ++cm[truth[i]][predicted[i]];
    }
    return metrics_from_confusion(cm);
}

inline Metrics evaluate(std::span<const Window> test, const ModelParams& params) {
    if (test.empty()) throw ArgumentError("test corpus is empty");
    std::vector<std::size_t> truth, pred;
    truth.reserve(test.size());
    pred.reserve(test.size());
    PreparedInput in;
    Activations act;
    for (const auto& w : test) {
        if (!w.label) throw ArgumentError("test window has no label");
        auto idx = class_index(*w.label);
        if (!idx) throw ArgumentError("label '" + *w.label + "' is not a sensed activity");
        forward(w, params, in, act);
        truth.push_back(*idx);
        pred.push_back(static_cast<std::size_t>(std::max_element(act.probs.begin(), act.probs.end()) -
                                                act.probs.begin()));
    }
    return compute_metrics(truth, pred);
}

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

/// Human-readable per-class table (F1, precision, recall; two decimals).
inline std::string format_metrics_table(const Metrics& m) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %6s %10s %8s %8s\n", "Activity Name", "F1", "Precision", "Recall",
                  "Support");
    out += line;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto& c = m.per_class[k];
        std::snprintf(line, sizeof line, "%-14s %6.2f %10.2f %8.2f %8zu%s\n", std::string(kSensedLabels[k]).c_str(),
                      round2(c.f1), round2(c.precision), round2(c.recall), c.support, c.undefined ? "  (undefined)" : "");
        out += line;
    }
    std::snprintf(line, sizeof line, "%-14s %6.2f %10.2f %8.2f %8zu\n", "macro avg", round2(m.macro_f1),
                  round2(m.macro_precision), round2(m.macro_recall), m.total);
    out += line;
    std::snprintf(line, sizeof line, "accuracy %.4f\n", m.accuracy);
    out += line;
    return out;
}

/// Machine-readable form; metrics_from_json() rebuilds an equal Metrics.
inline nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["labels"] = nlohmann::json::array();
    for (auto l : kSensedLabels) j["labels"].push_back(std::string(l));
    j["confusion"] = m.confusion;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto& c = m.per_class[k];
        rows.push_back({{"label", std::string(kSensedLabels[k])},
                        {"precision", c.precision},
                        {"recall", c.recall},
                        {"f1", c.f1},
                        {"support", c.support},
                        {"undefined", c.undefined}});
    }
    j["per_class"] = rows;
    j["macro_precision"] = m.macro_precision;
    j["macro_recall"] = m.macro_recall;
    j["macro_f1"] = m.macro_f1;
    j["accuracy"] = m.accuracy;
    return j;
}

inline Metrics metrics_from_json(const nlohmann::json& j) {
    try {
        ConfusionMatrix cm = j.at("confusion").get<ConfusionMatrix>();
        return metrics_from_confusion(cm);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("bad metrics json: ") + e.what());
    }
}

}  // namespace ambient
