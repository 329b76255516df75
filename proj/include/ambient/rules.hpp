#pragma once

// Complex-activity rule engine: order rules over atomic-activity sequences,
// fixpoint correction and reminder findings.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/labels.hpp"

namespace ambient {

enum class RuleKind { precede, require, alert };
enum class Severity { info, warning, critical };

inline std::string_view severity_name(Severity s) {
    switch (s) {
        case Severity::info: return "info";
        case Severity::warning: return "warning";
        case Severity::critical: return "critical";
    }
    return "warning";
}

inline std::optional<Severity> parse_severity(std::string_view s) {
    if (s == "info") return Severity::info;
    if (s == "warning") return Severity::warning;
    if (s == "critical") return Severity::critical;
    return std::nullopt;
}

inline constexpr std::size_t kDefaultLookback = 8;
inline constexpr std::size_t kMaxPasses = 10;

struct Rule {
    RuleKind kind = RuleKind::precede;
    // precede: `first` must occur before `second`.
    // require: `first` is the required label, `second` the trigger.
    // alert: `first` is the watched label.
    std::string first;
    std::string second;
    std::string insert_before;  // require only; equals the trigger unless set
    std::size_t lookback = kDefaultLookback;
    Severity severity = Severity::warning;
    std::string complex_label;
    std::string message;
    std::size_t ordinal = 0;  // 1-based position among the rules of its file

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleSet {
    std::vector<Rule> rules;

    bool empty() const noexcept { return rules.empty(); }
    friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

struct Finding {
    std::string complex_label;
    std::size_t rule_ordinal = 0;
    std::vector<std::string> original;
    std::vector<std::string> corrected;
    std::string message;
    Severity severity = Severity::warning;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct CheckResult {
    std::vector<std::string> corrected;
    std::vector<Finding> findings;
    std::size_t passes = 0;

    bool changed(std::span<const std::string> original) const {
        return !std::equal(corrected.begin(), corrected.end(), original.begin(), original.end());
    }
};

// ---------------------------------------------------------------------------
// DSL

namespace detail {

struct Token {
    std::string text;
    bool quoted = false;
};

inline std::vector<Token> tokenize_rule_line(std::string_view line, std::size_t lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '"') {
            std::string text;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    text.push_back(line[i + 1]);
                    i += 2;
                } else if (line[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                } else {
                    text.push_back(line[i++]);
                }
            }
            if (!closed) throw ParseError(lineno, "unterminated string");
            out.push_back({std::move(text), true});
            continue;
        }
        std::string text;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '"' && line[i] != '\r')
            text.push_back(line[i++]);
        out.push_back({std::move(text), false});
    }
    return out;
}

inline std::string vocabulary_list() {
    std::string out;
    for (const auto& l : extended_vocabulary()) {
        if (!out.empty()) out += ", ";
        out += l;
    }
    return out;
}

inline std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

class RuleLineParser {
public:
    RuleLineParser(std::vector<Token> tokens, std::size_t lineno) : tokens_(std::move(tokens)), lineno_(lineno) {}

    bool done() const { return pos_ >= tokens_.size(); }

    bool peek_keyword(std::string_view kw) const {
        return !done() && !tokens_[pos_].quoted && tokens_[pos_].text == kw;
    }

    void keyword(std::string_view kw) {
        if (!peek_keyword(kw)) {
            throw ParseError(lineno_, "expected '" + std::string(kw) + "'" +
                                          (done() ? std::string(" at end of line") : ", got '" + tokens_[pos_].text + "'"));
        }
        ++pos_;
    }

    std::string string_arg(std::string_view what) {
        if (done() || !tokens_[pos_].quoted) throw ParseError(lineno_, "expected quoted " + std::string(what));
        return tokens_[pos_++].text;
    }

    std::string bare_arg(std::string_view what) {
        if (done() || tokens_[pos_].quoted) throw ParseError(lineno_, "expected " + std::string(what));
        return tokens_[pos_++].text;
    }

    std::string label_arg(bool strict) {
        std::string raw = string_arg("label");
        if (auto canon = canonicalize_label(raw)) return *canon;
        if (!strict) {
            auto norm = normalize_phrase(raw);
            if (!norm.empty()) return norm;
        }
        throw ParseError(lineno_, "unknown label '" + raw + "'; vocabulary: " + vocabulary_list());
    }

    std::size_t lineno() const { return lineno_; }

private:
    std::vector<Token> tokens_;
    std::size_t lineno_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the rule DSL; one rule per line, `#` starts a comment.
inline RuleSet parse_rules(std::string_view text) {
    RuleSet set;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = detail::tokenize_rule_line(line, lineno);
        if (tokens.empty()) continue;
        detail::RuleLineParser p(std::move(tokens), lineno);
        Rule r;
        if (p.peek_keyword("precede")) {
            p.keyword("precede");
            r.kind = RuleKind::precede;
            r.first = p.label_arg(true);
            p.keyword("before");
            r.second = p.label_arg(true);
            if (r.first == r.second) throw ParseError(lineno, "precede rule needs two different labels");
        } else if (p.peek_keyword("require")) {
            p.keyword("require");
            r.kind = RuleKind::require;
            r.first = p.label_arg(true);
            p.keyword("trigger");
            r.second = p.label_arg(true);
            r.insert_before = r.second;
            if (p.peek_keyword("before")) {
                p.keyword("before");
                r.insert_before = p.label_arg(true);
            }
            if (p.peek_keyword("lookback")) {
                p.keyword("lookback");
                auto n = p.bare_arg("lookback count");
                std::size_t used = 0;
                long long v = 0;
                try {
                    v = std::stoll(n, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != n.size() || v < 1) throw ParseError(lineno, "lookback must be an integer >= 1");
                r.lookback = static_cast<std::size_t>(v);
            }
            if (r.first == r.second) throw ParseError(lineno, "require rule cannot require its own trigger");
        } else if (p.peek_keyword("alert")) {
            p.keyword("alert");
            r.kind = RuleKind::alert;
            p.keyword("on");
            r.first = p.label_arg(false);
            p.keyword("severity");
            auto sev = parse_severity(p.bare_arg("severity"));
            if (!sev) throw ParseError(lineno, "severity must be info, warning or critical");
            r.severity = *sev;
        } else {
            throw ParseError(lineno, "unknown rule keyword '" + p.bare_arg("rule keyword") + "'");
        }
        p.keyword("label");
        r.complex_label = p.string_arg("complex label");
        p.keyword("msg");
        r.message = p.string_arg("message");
        if (!p.done()) throw ParseError(lineno, "unexpected trailing tokens");
        r.ordinal = set.rules.size() + 1;
        set.rules.push_back(std::move(r));
    }
    return set;
}

inline std::string rule_to_dsl(const Rule& r) {
    using detail::quote;
    std::string out;
    switch (r.kind) {
        case RuleKind::precede:
            out = "precede " + quote(r.first) + " before " + quote(r.second);
            break;
        case RuleKind::require:
            out = "require " + quote(r.first) + " trigger " + quote(r.second);
            if (r.insert_before != r.second) out += " before " + quote(r.insert_before);
            out += " lookback " + std::to_string(r.lookback);
            break;
        case RuleKind::alert:
            out = "alert on " + quote(r.first) + " severity " + std::string(severity_name(r.severity));
            break;
    }
    out += " label " + quote(r.complex_label) + " msg " + quote(r.message);
    return out;
}

inline std::string rules_to_dsl(const RuleSet& set) {
    std::string out;
    for (const auto& r : set.rules) out += rule_to_dsl(r) + "\n";
    return out;
}

inline constexpr std::string_view kDefaultRulesText =
    R"(# Medication is due before drinking water ahead of a meal.
require "take_medication" trigger "pour_water" lookback 8 label "forgetting medication" msg "Remember to take your medication before drinking water and eating."
# Brush teeth before eating.
precede "teeth" before "eat" label "unhygienic behavior" msg "Please brush your teeth before eating."
# Wash hands before eating.
require "hand_wash" trigger "eat" lookback 8 label "unhygienic behavior" msg "Please wash your hands before eating."
# Turn on the light before using the paper dispenser.
require "light_switch" trigger "paperdis" lookback 8 label "preventing slipping" msg "Turn on the light before using the paper dispenser to avoid slipping."
)";

inline const RuleSet& default_ruleset() {
    static const RuleSet set = parse_rules(kDefaultRulesText);
    return set;
}

// ---------------------------------------------------------------------------
// Correction

namespace detail {

inline std::optional<std::size_t> first_index(const std::vector<std::string>& seq, std::string_view label,
                                              std::size_t from = 0, std::size_t to = std::string::npos) {
    to = std::min(to, seq.size());
    for (std::size_t i = from; i < to; ++i)
        if (seq[i] == label) return i;
    return std::nullopt;
}

// Moves the earliest `first` to just before the earliest `second` when the
// order is violated.
inline bool apply_precede(const Rule& r, std::vector<std::string>& seq) {
    auto before = first_index(seq, r.first);
    auto after = first_index(seq, r.second);
    if (!before || !after || *before < *after) return false;
    std::string moved = std::move(seq[*before]);
    seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(*before));
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(*after), std::move(moved));
    return true;
}

// Scans triggers left to right. A trigger without `first` among its
// `lookback` predecessors gets `first` inserted before the earliest anchor
// inside that span, or directly before the trigger.
inline bool apply_require(const Rule& r, std::vector<std::string>& seq) {
    bool changed = false;
    for (std::size_t t = 0; t < seq.size(); ++t) {
        if (seq[t] != r.second) continue;
        const std::size_t lo = t >= r.lookback ? t - r.lookback : 0;
        if (first_index(seq, r.first, lo, t)) continue;
        const std::size_t span_lo = t + 1 >= r.lookback ? t + 1 - r.lookback : 0;
        std::size_t at = first_index(seq, r.insert_before, span_lo, t + 1).value_or(t);
        seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(at), r.first);
        changed = true;
        ++t;  // skip past the shifted trigger
    }
    return changed;
}

}  // namespace detail

/// Canonicalizes every label; throws ArgumentError on unknown ones.
inline std::vector<std::string> canonical_sequence(std::span<const std::string> seq) {
    std::vector<std::string> out;
    out.reserve(seq.size());
    for (const auto& s : seq) {
        auto canon = canonicalize_label(s);
        if (!canon) throw ArgumentError("unknown activity '" + s + "'");
        out.push_back(std::move(*canon));
    }
    return out;
}

/// Splits "a -> b -> c" (also accepts the unicode arrow and commas).
inline std::vector<std::string> split_sequence(std::string_view text) {
    std::string s(text);
    for (std::string_view arrow : {std::string_view("\xe2\x86\x92"), std::string_view("->")}) {
        std::size_t pos;
        while ((pos = s.find(arrow)) != std::string::npos) s.replace(pos, arrow.size(), ",");
    }
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        auto e = item.find_last_not_of(" \t\r\n");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

inline std::string join_sequence(std::span<const std::string> seq, std::string_view sep = " -> ") {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += sep;
        out += seq[i];
    }
    return out;
}

/// Applies precede rules, then require rules (each in file order), until
/// the sequence stops changing; then evaluates alert rules. Findings are
/// deduplicated by complex label.
inline CheckResult check_sequence(std::span<const std::string> sequence, const RuleSet& rules) {
    if (sequence.empty()) throw ArgumentError("sequence is empty");
    const auto original = canonical_sequence(sequence);
    CheckResult result;
    result.corrected = original;

    std::vector<const Rule*> fired;
    auto record = [&](const Rule& r) {
        auto dup = std::find_if(fired.begin(), fired.end(),
                                [&](const Rule* f) { return f->complex_label == r.complex_label; });
        if (dup == fired.end()) fired.push_back(&r);
    };

    std::vector<const Rule*> changed_last;
    bool settled = false;
    for (std::size_t pass = 1; pass <= kMaxPasses; ++pass) {
        result.passes = pass;
        changed_last.clear();
        for (RuleKind kind : {RuleKind::precede, RuleKind::require}) {
            for (const auto& r : rules.rules) {
                if (r.kind != kind) continue;
                bool changed = kind == RuleKind::precede ? detail::apply_precede(r, result.corrected)
                                                         : detail::apply_require(r, result.corrected);
                if (changed) {
                    record(r);
                    changed_last.push_back(&r);
                }
            }
        }
        if (changed_last.empty()) {
            settled = true;
            break;
        }
    }
    if (!settled) {
        std::string a = std::to_string(changed_last.front()->ordinal);
        std::string b = std::to_string(changed_last.size() > 1 ? changed_last[1]->ordinal : changed_last.front()->ordinal);
        throw FixpointError("rules " + a + " and " + b + " did not reach a fixpoint within " +
                            std::to_string(kMaxPasses) + " passes");
    }
    for (const auto& r : rules.rules)
        if (r.kind == RuleKind::alert && detail::first_index(result.corrected, r.first)) record(r);

    for (const Rule* r : fired) {
        Finding f;
        f.complex_label = r->complex_label;
        f.rule_ordinal = r->ordinal;
        f.original = original;
        f.corrected = result.corrected;
        f.message = r->message;
        f.severity = r->severity;
        result.findings.push_back(std::move(f));
    }
    return result;
}

}  // namespace ambient
