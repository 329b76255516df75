#pragma once

// Cloud-side sequence verification through a text-completion model. The
// rule engine stays authoritative: LLM answers that still violate the rules
// or drop observed events are replaced by the rule engine's correction.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/labels.hpp"
#include "ambient/rules.hpp"

namespace ambient {

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    /// "mock" or "http(<endpoint>, <model>)"; never contains credentials.
    virtual std::string identity() const = 0;
};

inline constexpr std::string_view kDefaultPromptTemplate =
    R"(You check sequences of daily activities detected by ambient sensors in an elderly person's home.
Order rules, one per line:
{RULES}
Detected activity sequence (oldest first):
{SEQUENCE}
Correct the sequence so that it satisfies every rule without removing any detected activity,
name the complex activity the sequence reveals, and write a short reminder for the user.
Answer with exactly these three lines and nothing else:
CORRECTED: <activity> -> <activity> -> ...
COMPLEX: <complex activity name, or none>
MESSAGE: <reminder for the user>
)";

inline constexpr std::string_view kNoRulesStanza = "(no rules configured: accept the sequence as detected)";

/// Fills {RULES} (DSL lines) and {SEQUENCE} ("a -> b -> c") in the template.
inline std::string build_prompt(std::span<const std::string> seq, const RuleSet& rules,
                                std::string_view tmpl = kDefaultPromptTemplate) {
    constexpr std::string_view kRules = "{RULES}";
    constexpr std::string_view kSeq = "{SEQUENCE}";
    if (tmpl.find(kRules) == std::string_view::npos) throw ArgumentError("prompt template lacks {RULES}");
    if (tmpl.find(kSeq) == std::string_view::npos) throw ArgumentError("prompt template lacks {SEQUENCE}");
    std::string rules_text = rules.empty() ? std::string(kNoRulesStanza) : rules_to_dsl(rules);
    while (!rules_text.empty() && rules_text.back() == '\n') rules_text.pop_back();
    const std::string seq_text = join_sequence(seq);
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl.compare(i, kRules.size(), kRules) == 0) {
            out += rules_text;
            i += kRules.size();
        } else if (tmpl.compare(i, kSeq.size(), kSeq) == 0) {
            out += seq_text;
            i += kSeq.size();
        } else {
            out.push_back(tmpl[i++]);
        }
    }
    return out;
}

struct LlmVerdict {
    std::vector<std::string> corrected;
    std::string complex_label;
    std::string message;
    std::string raw;
};

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Value after "<key>:" when the line starts with key (case-insensitive,
// ignoring leading markdown decoration).
inline std::optional<std::string> field_value(std::string_view line, std::string_view key) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '*' || line[i] == '-' || line[i] == '>'))
        ++i;
    if (line.size() - i < key.size() + 1) return std::nullopt;
    for (std::size_t k = 0; k < key.size(); ++k)
        if (std::toupper(static_cast<unsigned char>(line[i + k])) != key[k]) return std::nullopt;
    i += key.size();
    while (i < line.size() && line[i] == '*') ++i;
    if (i >= line.size() || line[i] != ':') return std::nullopt;
    return trim(line.substr(i + 1));
}

}  // namespace detail

/// Extracts the CORRECTED / COMPLEX / MESSAGE lines. Any missing line or
/// unknown activity is an error; no partial verdicts.
inline LlmVerdict parse_verdict(const std::string& response) {
    std::optional<std::string> corrected, complex, message;
    std::istringstream in(response);
    std::string line;
    while (std::getline(in, line)) {
        if (!corrected) {
            if (auto v = detail::field_value(line, "CORRECTED")) {
                corrected = std::move(v);
                continue;
            }
        }
        if (!complex) {
            if (auto v = detail::field_value(line, "COMPLEX")) {
                complex = std::move(v);
                continue;
            }
        }
        if (!message) {
            if (auto v = detail::field_value(line, "MESSAGE")) message = std::move(v);
        }
    }
    if (!corrected) throw VerdictParseError("response lacks a CORRECTED line", response);
    if (!complex) throw VerdictParseError("response lacks a COMPLEX line", response);
    if (!message) throw VerdictParseError("response lacks a MESSAGE line", response);

    LlmVerdict v;
    v.raw = response;
    for (const auto& item : split_sequence(*corrected)) {
        auto canon = canonicalize_label(item);
        if (!canon) throw VerdictParseError("unknown activity '" + item + "' in CORRECTED line", response);
        v.corrected.push_back(std::move(*canon));
    }
    if (v.corrected.empty()) throw VerdictParseError("CORRECTED line is empty", response);
    v.complex_label = std::move(*complex);
    v.message = std::move(*message);
    return v;
}

/// Three-line answer for a rule-engine result; used by the mock client.
inline std::string format_verdict(const CheckResult& r) {
    std::string complex = r.findings.empty() ? "none" : r.findings.front().complex_label;
    std::string message;
    for (const auto& f : r.findings) {
        if (!message.empty()) message += ' ';
        message += f.message;
    }
    if (message.empty()) message = "No action needed.";
    return "CORRECTED: " + join_sequence(r.corrected) + "\nCOMPLEX: " + complex + "\nMESSAGE: " + message + "\n";
}

/// Deterministic offline client: reads the rule lines and the sequence line
/// back out of the prompt and answers with the rule engine's correction.
class RuleEngineMockClient final : public CompletionClient {
public:
    std::string complete(const std::string& prompt) override {
        RuleSet rules;
        std::vector<std::string> seq;
        std::istringstream in(prompt);
        std::string line;
        while (std::getline(in, line)) {
            try {
                auto parsed = parse_rules(line);
                if (!parsed.empty()) {
                    auto r = parsed.rules.front();
                    r.ordinal = rules.rules.size() + 1;
                    rules.rules.push_back(std::move(r));
                    continue;
                }
            } catch (const ParseError&) {
            }
            auto items = split_sequence(line);
            if (items.empty()) continue;
            try {
                seq = canonical_sequence(items);
            } catch (const ArgumentError&) {
            }
        }
        if (seq.empty()) return "I could not find an activity sequence in the request.";
        return format_verdict(check_sequence(seq, rules));
    }

    std::string identity() const override { return "mock"; }
};

/// Returns a fixed response regardless of the prompt.
class ScriptedClient final : public CompletionClient {
public:
    explicit ScriptedClient(std::string response) : response_(std::move(response)) {}
    std::string complete(const std::string&) override { return response_; }
    std::string identity() const override { return "mock"; }

private:
    std::string response_;
};

struct LlmCheckResult {
    std::vector<std::string> corrected;
    std::vector<Finding> findings;
    bool degraded = false;           // transport or parse failure; rule engine used
    bool llm_overridden = false;     // LLM answer failed the cross-check
    std::optional<LlmVerdict> verdict;
    std::vector<std::string> notes;  // discrepancies and failures, for the log
};

namespace detail {

// True when every event of `original` survives in `corrected` (as a
// multiset); reordering and insertion are allowed, deletion is not.
inline bool keeps_all_events(std::span<const std::string> original, std::span<const std::string> corrected) {
    std::map<std::string_view, long> count;
    for (const auto& s : corrected) ++count[s];
    for (const auto& s : original)
        if (--count[s] < 0) return false;
    return true;
}

}  // namespace detail

/// Builds the prompt, asks the client, and cross-checks the verdict with
/// the rule engine.
inline LlmCheckResult verify_with_llm(std::span<const std::string> seq, const RuleSet& rules, CompletionClient& client,
                                      std::string_view tmpl = kDefaultPromptTemplate) {
    const auto canonical = canonical_sequence(seq);
    const auto engine = check_sequence(canonical, rules);
    LlmCheckResult out;
    out.corrected = engine.corrected;
    out.findings = engine.findings;

    LlmVerdict verdict;
    try {
        verdict = parse_verdict(client.complete(build_prompt(canonical, rules, tmpl)));
    } catch (const VerdictParseError& e) {
        out.degraded = true;
        out.notes.push_back(std::string("llm response unusable: ") + e.what());
        return out;
    } catch (const Error& e) {
        out.degraded = true;
        out.notes.push_back(std::string("llm unavailable: ") + e.what());
        return out;
    }
    out.verdict = verdict;

    bool acceptable = detail::keeps_all_events(canonical, verdict.corrected);
    if (!acceptable) out.notes.push_back("llm correction drops detected events; using rule engine correction");
    if (acceptable) {
        try {
            auto recheck = check_sequence(verdict.corrected, rules);
            if (recheck.changed(verdict.corrected)) {
                acceptable = false;
                out.notes.push_back("llm correction still violates rules; using rule engine correction");
            }
        } catch (const FixpointError& e) {
            acceptable = false;
            out.notes.push_back(std::string("llm correction rejected: ") + e.what());
        }
    }
    if (!acceptable) {
        out.llm_overridden = true;
        return out;
    }
    out.corrected = verdict.corrected;
    const auto& label = verdict.complex_label;
    std::string lowered = label;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
    const bool names_something = !label.empty() && lowered != "none";
    const bool known = std::any_of(out.findings.begin(), out.findings.end(),
                                   [&](const Finding& f) { return f.complex_label == label; });
    if (names_something && !known) {
        Finding f;
        f.complex_label = label;
        f.rule_ordinal = 0;  // from the model, not a configured rule
        f.original = canonical;
        f.corrected = out.corrected;
        f.message = verdict.message;
        f.severity = Severity::info;
        out.findings.push_back(std::move(f));
    }
    for (auto& f : out.findings) f.corrected = out.corrected;
    return out;
}

}  // namespace ambient
