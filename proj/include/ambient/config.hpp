#pragma once

// Run configuration: a small TOML subset (sections, key = value, strings,
// numbers, booleans, # comments). Unknown keys are errors.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/trace.hpp"

namespace ambient {

struct Config {
    // paths
    std::string corpus_dir = "out/corpus";
    std::string model_path = "out/model.bin";
    std::string rules_path;  // empty: built-in default rules
    std::string store_path = "out/cloud_store.ndjson";
    std::string spill_path = "out/edge_spill.ndjson";
    std::string signatures_path;  // empty: built-in signatures

    // gateway
    std::string address = "127.0.0.1:7878";
    std::string device_id = "edge-1";
    std::size_t session_max_events = 16;
    double session_horizon_s = 1800.0;
    std::size_t retry_attempts = 3;
    double retry_backoff_s = 1.0;
    double reply_timeout_s = 10.0;

    // windowing and debounce
    std::size_t window = kWindowLen;
    std::size_t hop = kHop;
    std::size_t debounce_votes = 3;
    double debounce_confidence = 0.6;

    // data and training
    std::uint64_t seed = 42;
    std::size_t n_per_class = 50;
    std::size_t epochs = 30;
    std::size_t batch = 32;
    double lr = 1e-3;
    double momentum = 0.9;
    double init_scale = 1.0;

    // llm
    bool llm_enabled = false;
    std::string llm_client = "mock";  // mock | http
    std::string llm_endpoint = "https://api.openai.com/v1";
    std::string llm_model = "gpt-4";
    double llm_timeout_s = 30.0;
    std::string llm_prompt_path;  // empty: built-in template
};

namespace detail {

struct ConfigValue {
    std::string text;
    bool quoted = false;
    std::size_t line = 0;
};

inline std::string strip(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void config_fail(std::size_t line, const std::string& what) {
    throw ConfigError(line ? "config line " + std::to_string(line) + ": " + what : what);
}

inline std::string as_string(const std::string& key, const ConfigValue& v) {
    if (!v.quoted) config_fail(v.line, "value of '" + key + "' must be a quoted string");
    return v.text;
}

inline double as_double(const std::string& key, const ConfigValue& v) {
    if (v.quoted) config_fail(v.line, "value of '" + key + "' must be a number");
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc() || p != v.text.data() + v.text.size())
        config_fail(v.line, "value of '" + key + "' must be a number, got '" + v.text + "'");
    return out;
}

inline std::uint64_t as_uint(const std::string& key, const ConfigValue& v) {
    if (v.quoted) config_fail(v.line, "value of '" + key + "' must be an integer");
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc() || p != v.text.data() + v.text.size())
        config_fail(v.line, "value of '" + key + "' must be a non-negative integer, got '" + v.text + "'");
    return out;
}

inline bool as_bool(const std::string& key, const ConfigValue& v) {
    if (!v.quoted && v.text == "true") return true;
    if (!v.quoted && v.text == "false") return false;
    config_fail(v.line, "value of '" + key + "' must be true or false");
}

using Setter = std::function<void(Config&, const std::string&, const ConfigValue&)>;
using Getter = std::function<std::string(const Config&)>;

struct KeySpec {
    Setter set;
    Getter get;
};

inline std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

// Shortest text that reads back to the same double.
inline std::string num(double d) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, end);
}

template <typename T>
KeySpec str_key(T Config::*field) {
    return {[field](Config& c, const std::string& k, const ConfigValue& v) { c.*field = as_string(k, v); },
            [field](const Config& c) { return quoted(c.*field); }};
}
template <typename T>
KeySpec dbl_key(T Config::*field) {
    return {[field](Config& c, const std::string& k, const ConfigValue& v) { c.*field = as_double(k, v); },
            [field](const Config& c) { return num(c.*field); }};
}
template <typename T>
KeySpec uint_key(T Config::*field) {
    return {[field](Config& c, const std::string& k, const ConfigValue& v) {
                c.*field = static_cast<T>(as_uint(k, v));
            },
            [field](const Config& c) { return std::to_string(c.*field); }};
}
inline KeySpec bool_key(bool Config::*field) {
    return {[field](Config& c, const std::string& k, const ConfigValue& v) { c.*field = as_bool(k, v); },
            [field](const Config& c) { return std::string(c.*field ? "true" : "false"); }};
}

// Ordered so that the resolved config prints grouped by section.
inline const std::vector<std::pair<std::string, KeySpec>>& config_keys() {
    static const std::vector<std::pair<std::string, KeySpec>> keys = {
        {"paths.corpus", str_key(&Config::corpus_dir)},
        {"paths.model", str_key(&Config::model_path)},
        {"paths.rules", str_key(&Config::rules_path)},
        {"paths.store", str_key(&Config::store_path)},
        {"paths.spill", str_key(&Config::spill_path)},
        {"paths.signatures", str_key(&Config::signatures_path)},
        {"gateway.address", str_key(&Config::address)},
        {"gateway.device_id", str_key(&Config::device_id)},
        {"gateway.session_max_events", uint_key(&Config::session_max_events)},
        {"gateway.session_horizon_s", dbl_key(&Config::session_horizon_s)},
        {"gateway.retry_attempts", uint_key(&Config::retry_attempts)},
        {"gateway.retry_backoff_s", dbl_key(&Config::retry_backoff_s)},
        {"gateway.reply_timeout_s", dbl_key(&Config::reply_timeout_s)},
        {"window.length", uint_key(&Config::window)},
        {"window.hop", uint_key(&Config::hop)},
        {"debounce.votes", uint_key(&Config::debounce_votes)},
        {"debounce.min_confidence", dbl_key(&Config::debounce_confidence)},
        {"train.seed", uint_key(&Config::seed)},
        {"train.n_per_class", uint_key(&Config::n_per_class)},
        {"train.epochs", uint_key(&Config::epochs)},
        {"train.batch", uint_key(&Config::batch)},
        {"train.lr", dbl_key(&Config::lr)},
        {"train.momentum", dbl_key(&Config::momentum)},
        {"train.init_scale", dbl_key(&Config::init_scale)},
        {"llm.enabled", bool_key(&Config::llm_enabled)},
        {"llm.client", str_key(&Config::llm_client)},
        {"llm.endpoint", str_key(&Config::llm_endpoint)},
        {"llm.model", str_key(&Config::llm_model)},
        {"llm.timeout_s", dbl_key(&Config::llm_timeout_s)},
        {"llm.prompt", str_key(&Config::llm_prompt_path)},
    };
    return keys;
}

inline const KeySpec& find_key(const std::string& key, std::size_t line) {
    for (const auto& [k, spec] : config_keys())
        if (k == key) return spec;
    config_fail(line, "unknown key '" + key + "'");
}

// Parses the right-hand side of `key = value`, dropping a trailing comment.
inline ConfigValue parse_value(std::string_view raw, std::size_t line) {
    auto s = strip(raw);
    ConfigValue v;
    v.line = line;
    if (!s.empty() && s.front() == '"') {
        std::string out;
        std::size_t i = 1;
        for (; i < s.size() && s[i] != '"'; ++i) {
            if (s[i] == '\\' && i + 1 < s.size()) ++i;
            out.push_back(s[i]);
        }
        if (i >= s.size()) config_fail(line, "unterminated string");
        auto rest = strip(std::string_view(s).substr(i + 1));
        if (!rest.empty() && rest.front() != '#') config_fail(line, "unexpected text after string");
        v.text = std::move(out);
        v.quoted = true;
        return v;
    }
    auto hash = s.find('#');
    v.text = strip(std::string_view(s).substr(0, hash));
    if (v.text.empty()) config_fail(line, "missing value");
    return v;
}

}  // namespace detail

inline void validate_config(const Config& c) {
    if (c.window != kWindowLen)
        throw ConfigError("window.length must be " + std::to_string(kWindowLen) + " (the model's input size)");
    if (c.hop == 0) throw ConfigError("window.hop must be positive");
    if (c.debounce_votes == 0) throw ConfigError("debounce.votes must be positive");
    if (c.debounce_confidence < 0.0 || c.debounce_confidence > 1.0)
        throw ConfigError("debounce.min_confidence must lie in [0, 1]");
    if (c.session_max_events == 0) throw ConfigError("gateway.session_max_events must be positive");
    if (!(c.session_horizon_s > 0.0)) throw ConfigError("gateway.session_horizon_s must be positive");
    if (c.retry_attempts == 0) throw ConfigError("gateway.retry_attempts must be positive");
    if (c.retry_backoff_s < 0.0) throw ConfigError("gateway.retry_backoff_s must not be negative");
    if (!(c.reply_timeout_s > 0.0)) throw ConfigError("gateway.reply_timeout_s must be positive");
    if (c.n_per_class < 2) throw ConfigError("train.n_per_class must be at least 2");
    if (c.epochs == 0 || c.batch == 0) throw ConfigError("train.epochs and train.batch must be positive");
    if (!(c.lr > 0.0)) throw ConfigError("train.lr must be positive");
    if (c.momentum < 0.0 || c.momentum >= 1.0) throw ConfigError("train.momentum must lie in [0, 1)");
    if (c.llm_client != "mock" && c.llm_client != "http") throw ConfigError("llm.client must be \"mock\" or \"http\"");
    if (!(c.llm_timeout_s > 0.0)) throw ConfigError("llm.timeout_s must be positive");
}

/// Applies `section.key = value` assignments from text onto `cfg`.
inline void apply_config_text(Config& cfg, std::string_view text) {
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = detail::strip(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            auto close = line.find(']');
            if (close == std::string::npos) detail::config_fail(lineno, "unterminated section header");
            section = detail::strip(std::string_view(line).substr(1, close - 1));
            if (section.empty()) detail::config_fail(lineno, "empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) detail::config_fail(lineno, "expected key = value");
        auto key = detail::strip(std::string_view(line).substr(0, eq));
        if (key.empty()) detail::config_fail(lineno, "missing key");
        const std::string full = section.empty() ? key : section + "." + key;
        const auto& spec = detail::find_key(full, lineno);
        spec.set(cfg, full, detail::parse_value(std::string_view(line).substr(eq + 1), lineno));
    }
}

/// One `section.key=value` override, as given on the command line.
inline void apply_override(Config& cfg, std::string_view assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' must be key=value");
    const auto key = detail::strip(assignment.substr(0, eq));
    const auto& spec = detail::find_key(key, 0);
    auto value = detail::strip(assignment.substr(eq + 1));
    detail::ConfigValue v{value, false, 0};
    // Bare words are accepted for string keys on the command line.
    try {
        spec.set(cfg, key, v);
    } catch (const ConfigError&) {
        if (!value.empty() && value.front() == '"') v = detail::parse_value(value, 0);
        else v.quoted = true;
        spec.set(cfg, key, v);
    }
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Config cfg;
    apply_config_text(cfg, ss.str());
    return cfg;
}

/// Fully resolved configuration in the same syntax it is read from.
inline std::string config_to_text(const Config& cfg) {
    std::string out, section;
    for (const auto& [key, spec] : detail::config_keys()) {
        auto dot = key.find('.');
        auto sec = key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out += '\n';
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = " + spec.get(cfg) + "\n";
    }
    return out;
}

}  // namespace ambient
