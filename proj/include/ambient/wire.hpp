#pragma once

// NDJSON messages exchanged between edge and cloud; the store uses the same
// records. Field names are part of the protocol.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ambient/error.hpp"
#include "ambient/labels.hpp"
#include "ambient/rules.hpp"

namespace ambient {

/// Line-oriented diagnostic hook used by the gateway components.
using LogFn = std::function<void(const std::string&)>;

struct AtomicActivityEvent {
    std::string device_id;
    std::uint64_t seq_no = 0;
    double ts = 0.0;
    std::string label;
    double confidence = 0.0;

    friend bool operator==(const AtomicActivityEvent&, const AtomicActivityEvent&) = default;
};

struct Reminder {
    std::string device_id;
    double ts = 0.0;
    std::string complex_label;
    std::string message;
    Severity severity = Severity::warning;
    std::vector<std::string> corrected;

    friend bool operator==(const Reminder&, const Reminder&) = default;
};

struct Ack {
    std::uint64_t seq_no = 0;
    friend bool operator==(const Ack&, const Ack&) = default;
};

struct ErrorReply {
    std::string message;
    friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};

using Message = std::variant<AtomicActivityEvent, Reminder, Ack, ErrorReply>;

inline nlohmann::ordered_json to_json(const Message& msg) {
    using J = nlohmann::ordered_json;
    return std::visit(
        [](const auto& m) -> J {
            using T = std::decay_t<decltype(m)>;
            J j;
            if constexpr (std::is_same_v<T, AtomicActivityEvent>) {
                j["type"] = "event";
                j["device_id"] = m.device_id;
                j["seq_no"] = m.seq_no;
                j["ts"] = m.ts;
                j["label"] = m.label;
                j["confidence"] = m.confidence;
            } else if constexpr (std::is_same_v<T, Reminder>) {
                j["type"] = "reminder";
                j["device_id"] = m.device_id;
                j["ts"] = m.ts;
                j["complex_label"] = m.complex_label;
                j["message"] = m.message;
                j["severity"] = std::string(severity_name(m.severity));
                j["corrected"] = m.corrected;
            } else if constexpr (std::is_same_v<T, Ack>) {
                j["type"] = "ack";
                j["seq_no"] = m.seq_no;
            } else {
                j["type"] = "error";
                j["message"] = m.message;
            }
            return j;
        },
        msg);
}

/// One line, no trailing newline.
inline std::string encode(const Message& msg) { return to_json(msg).dump(); }

namespace detail {

template <typename J>
const J& require_field(const J& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
    return *it;
}

template <typename J>
std::string string_field(const J& j, const char* key) {
    const auto& v = require_field(j, key);
    if (!v.is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string");
    return v.template get<std::string>();
}

template <typename J>
double number_field(const J& j, const char* key) {
    const auto& v = require_field(j, key);
    if (!v.is_number()) throw ProtocolError(std::string("field '") + key + "' must be a number");
    double d = v.template get<double>();
    if (!std::isfinite(d)) throw ProtocolError(std::string("field '") + key + "' must be finite");
    return d;
}

template <typename J>
std::uint64_t seq_field(const J& j, const char* key) {
    const auto& v = require_field(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.template get<long long>() >= 0))
        throw ProtocolError(std::string("field '") + key + "' must be a non-negative integer");
    return v.template get<std::uint64_t>();
}

}  // namespace detail

inline Message decode(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProtocolError(std::string("malformed json: ") + e.what());
    }
    if (!j.is_object()) throw ProtocolError("message must be a json object");
    const auto type = detail::string_field(j, "type");
    if (type == "event") {
        AtomicActivityEvent e;
        e.device_id = detail::string_field(j, "device_id");
        if (e.device_id.empty()) throw ProtocolError("device_id must not be empty");
        e.seq_no = detail::seq_field(j, "seq_no");
        e.ts = detail::number_field(j, "ts");
        e.label = detail::string_field(j, "label");
        if (!is_sensed_label(e.label)) throw ProtocolError("label '" + e.label + "' is not a sensed activity");
        e.confidence = detail::number_field(j, "confidence");
        if (e.confidence < 0.0 || e.confidence > 1.0) throw ProtocolError("confidence must lie in [0, 1]");
        return e;
    }
    if (type == "reminder") {
        Reminder r;
        r.device_id = detail::string_field(j, "device_id");
        r.ts = detail::number_field(j, "ts");
        r.complex_label = detail::string_field(j, "complex_label");
        r.message = detail::string_field(j, "message");
        auto sev = parse_severity(detail::string_field(j, "severity"));
        if (!sev) throw ProtocolError("unknown severity");
        r.severity = *sev;
        const auto& corrected = detail::require_field(j, "corrected");
        if (!corrected.is_array()) throw ProtocolError("field 'corrected' must be an array");
        for (const auto& item : corrected) {
            if (!item.is_string()) throw ProtocolError("corrected entries must be strings");
            r.corrected.push_back(item.get<std::string>());
        }
        return r;
    }
    if (type == "ack") return Ack{detail::seq_field(j, "seq_no")};
    if (type == "error") return ErrorReply{detail::string_field(j, "message")};
    throw ProtocolError("unknown message type '" + type + "'");
}

}  // namespace ambient
