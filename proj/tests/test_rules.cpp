#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ambient/rules.hpp"

using namespace ambient;

namespace {

using Seq = std::vector<std::string>;

CheckResult check(const Seq& s) { return check_sequence(s, default_ruleset()); }

}  // namespace

TEST(Rules, MedicationScenario) {
    auto r = check({"teeth", "hand_wash", "pour_water", "eat"});
    EXPECT_EQ(r.corrected, (Seq{"teeth", "hand_wash", "take_medication", "pour_water", "eat"}));
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(r.findings[0].complex_label, "forgetting medication");
    EXPECT_EQ(r.findings[0].rule_ordinal, 1u);
}

TEST(Rules, UnhygienicScenario) {
    auto r = check({"eat", "basketball", "teeth"});
    EXPECT_EQ(r.corrected, (Seq{"teeth", "hand_wash", "eat", "basketball"}));
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(r.findings[0].complex_label, "unhygienic behavior");
}

TEST(Rules, SlippingScenario) {
    auto r = check({"door_pass", "paperdis"});
    EXPECT_EQ(r.corrected, (Seq{"door_pass", "light_switch", "paperdis"}));
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(r.findings[0].complex_label, "preventing slipping");
}

TEST(Rules, SatisfiedSequenceIsUntouched) {
    Seq ok{"teeth", "hand_wash", "take_medication", "pour_water", "eat"};
    auto r = check(ok);
    EXPECT_EQ(r.corrected, ok);
    EXPECT_TRUE(r.findings.empty());
    EXPECT_EQ(r.passes, 1u);
    EXPECT_FALSE(r.changed(ok));
}

TEST(Rules, LoneEatGetsHandWash) {
    auto r = check({"eat"});
    EXPECT_EQ(r.corrected, (Seq{"hand_wash", "eat"}));
}

TEST(Rules, LabelsAreCanonicalized) {
    auto r = check({"Brush Teeth", "hand wash", "pour water", "eat"});
    EXPECT_EQ(r.corrected[2], "take_medication");
    EXPECT_THROW(check({"eat", "flying"}), ArgumentError);
    EXPECT_THROW(check({}), ArgumentError);
}

TEST(Rules, RandomSequencesTerminateGrowAndAreIdempotent) {
    std::mt19937_64 rng(2024);
    std::vector<std::string> alphabet;
    for (auto l : kSensedLabels) alphabet.emplace_back(l);
    alphabet.emplace_back("take_medication");
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(1, 12);
    for (int i = 0; i < 10000; ++i) {
        Seq s(len(rng));
        for (auto& x : s) x = alphabet[pick(rng)];
        CheckResult r;
        ASSERT_NO_THROW(r = check(s)) << join_sequence(s);
        ASSERT_GE(r.corrected.size(), s.size());
        auto again = check(r.corrected);
        ASSERT_EQ(again.corrected, r.corrected) << join_sequence(s);
        ASSERT_TRUE(again.findings.empty()) << join_sequence(s);
    }
}

TEST(Rules, CorrectionNeverDeletesEvents) {
    Seq s{"paperdis", "eat", "pour_water", "teeth", "eat"};
    auto r = check(s);
    // Original events survive in order modulo moved precede labels.
    std::map<std::string, int> before, after;
    for (auto& x : s) ++before[x];
    for (auto& x : r.corrected) ++after[x];
    for (auto& [k, v] : before) EXPECT_GE(after[k], v) << k;
}

TEST(Rules, CyclicRulesReportFixpointFailure) {
    auto set = parse_rules(
        "precede \"eat\" before \"chop\" label \"a\" msg \"a\"\n"
        "precede \"chop\" before \"eat\" label \"b\" msg \"b\"\n");
    try {
        check_sequence(Seq{"eat", "chop"}, set);
        FAIL() << "expected FixpointError";
    } catch (const FixpointError& e) {
        EXPECT_NE(std::string(e.what()).find("rules 1 and 2"), std::string::npos) << e.what();
    }
}

TEST(Rules, AlertRulesFireOnPresence) {
    auto set = parse_rules("alert on \"fall\" severity critical label \"fall detected\" msg \"Call for help.\"\n");
    auto r = check_sequence(Seq{"run", "fall"}, set);
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(r.findings[0].severity, Severity::critical);
    EXPECT_TRUE(check_sequence(Seq{"run"}, set).findings.empty());
}

TEST(RulesDsl, DefaultRulesRoundTrip) {
    const auto& set = default_ruleset();
    ASSERT_EQ(set.rules.size(), 4u);
    EXPECT_EQ(parse_rules(rules_to_dsl(set)), set);
    EXPECT_EQ(set.rules[0].second, "pour_water");
    for (const auto& r : set.rules)
        if (r.kind == RuleKind::require) {
            EXPECT_EQ(r.lookback, 8u);
        }
}

TEST(RulesDsl, GrammarExamples) {
    auto one = parse_rules("precede \"teeth\" before \"eat\" label \"unhygienic behavior\" msg \"Brush before eating\"");
    ASSERT_EQ(one.rules.size(), 1u);
    EXPECT_EQ(one.rules[0].kind, RuleKind::precede);
    EXPECT_TRUE(parse_rules("").empty());
    EXPECT_TRUE(parse_rules("# only a comment\n\n").empty());
    auto anchored = parse_rules("require \"take_medication\" trigger \"eat\" before \"pour_water\" lookback 3 label \"x\" msg \"y\"");
    EXPECT_EQ(anchored.rules[0].insert_before, "pour_water");
    EXPECT_EQ(anchored.rules[0].lookback, 3u);
    EXPECT_EQ(parse_rules(rules_to_dsl(anchored)), anchored);
}

TEST(RulesDsl, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) {
        try {
            parse_rules(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    EXPECT_EQ(line_of("preceed \"teeth\" before \"eat\" label \"a\" msg \"b\""), 1u);
    EXPECT_EQ(line_of("\n\nprecede \"teeth\" before \"flying\" label \"a\" msg \"b\""), 3u);
    EXPECT_EQ(line_of("require \"hand_wash\" trigger \"eat\" lookback 0 label \"a\" msg \"b\""), 1u);
    EXPECT_EQ(line_of("precede \"teeth\" before \"eat\" label \"a\""), 1u);
    EXPECT_EQ(line_of("precede \"teeth\" before \"eat\" label \"a\" msg \"b"), 1u);
    try {
        parse_rules("precede \"teeth\" before \"flying\" label \"a\" msg \"b\"");
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("vocabulary"), std::string::npos);
    }
}

TEST(RulesDsl, ShippedRulesFileMatchesBuiltIn) {
    std::ifstream in(std::string(AMBIENT_DATA_DIR) + "/default.rules");
    std::stringstream ss;
    ss << in.rdbuf();
    ASSERT_FALSE(ss.str().empty());
    EXPECT_EQ(parse_rules(ss.str()), default_ruleset());
}
