#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ambient {

inline constexpr std::size_t kNumClasses = 20;

/// The 20 sensed atomic activities, in classifier output order.
inline constexpr std::array<std::string_view, kNumClasses> kSensedLabels = {
    "eat",        "paperdis",     "write", "chop",      "hand_wash",  "pour_water", "clean_floor",
    "knock",      "run",          "curtain", "light_switch", "type",   "door_pass",  "wipe_desk",
    "chat",       "basketball",   "saw",   "shave",     "wash_dish",  "teeth"};

/// Labels the reasoner may use but the classifier never outputs.
inline constexpr std::array<std::string_view, 4> kReasonerOnlyLabels = {
    "take_medication", "fall", "get_dressed", "wear_coat"};

inline constexpr std::string_view kIdleLabel = "idle";

inline std::optional<std::size_t> class_index(std::string_view label) {
    auto it = std::find(kSensedLabels.begin(), kSensedLabels.end(), label);
    if (it == kSensedLabels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - kSensedLabels.begin());
}

inline bool is_sensed_label(std::string_view label) { return class_index(label).has_value(); }

/// Sensed, reasoner-only, or idle.
inline bool is_known_label(std::string_view label) {
    return is_sensed_label(label) || label == kIdleLabel ||
           std::find(kReasonerOnlyLabels.begin(), kReasonerOnlyLabels.end(), label) !=
               kReasonerOnlyLabels.end();
}

inline std::vector<std::string> extended_vocabulary() {
    std::vector<std::string> out(kSensedLabels.begin(), kSensedLabels.end());
    out.insert(out.end(), kReasonerOnlyLabels.begin(), kReasonerOnlyLabels.end());
    out.emplace_back(kIdleLabel);
    return out;
}

namespace detail {

struct Alias {
    std::string_view phrase;
    std::string_view label;
};

// Phrases are matched after normalize_phrase().
inline constexpr std::array<Alias, 16> kAliases = {{
    {"brushing_teeth", "teeth"},
    {"brush_teeth", "teeth"},
    {"brusing_teeth", "teeth"},
    {"wash_hands", "hand_wash"},
    {"washing_hands", "hand_wash"},
    {"hand_washing", "hand_wash"},
    {"turn_the_switch", "light_switch"},
    {"turn_on_the_light", "light_switch"},
    {"paper_dispenser", "paperdis"},
    {"using_paper_dispenser", "paperdis"},
    {"drink_water", "pour_water"},
    {"eating", "eat"},
    {"take_pills", "take_medication"},
    {"take_medicine", "take_medication"},
    {"taking_medication", "take_medication"},
    {"basket_ball", "basketball"},
}};

inline std::string normalize_phrase(std::string_view text) {
    std::string out;
    bool pending_sep = false;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (ch == ' ' || ch == '_' || ch == '-' || ch == '\t') {
            pending_sep = true;
        } else if (ch == '*' || ch == '"' || ch == '\'' || ch == '.') {
            // decoration from free-text answers
        } else {
            pending_sep = true;
        }
    }
    return out;
}

}  // namespace detail

/// Maps free-text activity names ("brush teeth", "Wash Hands") onto
/// canonical labels. Returns nullopt when the phrase is not recognised.
inline std::optional<std::string> canonicalize_label(std::string_view text) {
    std::string norm = detail::normalize_phrase(text);
    if (norm.empty()) return std::nullopt;
    if (is_known_label(norm)) return norm;
    for (const auto& alias : detail::kAliases) {
        if (alias.phrase == norm) return std::string(alias.label);
    }
    return std::nullopt;
}

}  // namespace ambient
