#include <gtest/gtest.h>

#include <random>

#include "ambient/metrics.hpp"

using namespace ambient;

TEST(Metrics, HandBuiltCountsRoundLikeThePublishedRow) {
    auto m = class_metrics(3, 3, 5);
    EXPECT_EQ(round2(m.precision), 0.50);
    EXPECT_EQ(round2(m.recall), 0.38);
    EXPECT_EQ(round2(m.f1), 0.43);
    EXPECT_DOUBLE_EQ(m.recall, 0.375);
}

TEST(Metrics, AllCorrectIsPerfect) {
    std::vector<std::size_t> truth;
    for (std::size_t k = 0; k < kNumClasses; ++k)
        for (int i = 0; i < 3; ++i) truth.push_back(k);
    auto m = compute_metrics(truth, truth);
    for (const auto& c : m.per_class) {
        EXPECT_EQ(round2(c.precision), 1.00);
        EXPECT_EQ(round2(c.recall), 1.00);
        EXPECT_EQ(round2(c.f1), 1.00);
    }
    EXPECT_EQ(m.macro_f1, 1.0);
    EXPECT_EQ(m.accuracy, 1.0);
}

TEST(Metrics, EmptyClassesAreZeroAndFlagged) {
    auto m = class_metrics(0, 0, 0);
    EXPECT_TRUE(m.undefined);
    EXPECT_EQ(m.f1, 0.0);
    auto nothing_right = class_metrics(0, 2, 2);
    EXPECT_FALSE(nothing_right.undefined);
    EXPECT_EQ(nothing_right.f1, 0.0);

    // Only class 0 and 1 present: the macro average covers just those.
    std::vector<std::size_t> truth{0, 0, 1, 1}, pred{0, 1, 1, 1};
    auto mm = compute_metrics(truth, pred);
    EXPECT_TRUE(mm.per_class[5].undefined);
    EXPECT_NEAR(mm.macro_f1, (mm.per_class[0].f1 + mm.per_class[1].f1) / 2.0, 1e-15);
}

TEST(Metrics, MatchesBruteForceCounting) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> cls(0, kNumClasses - 1);
    std::vector<std::size_t> truth(200), pred(200);
    for (std::size_t i = 0; i < 200; ++i) {
        truth[i] = cls(rng);
        pred[i] = rng() % 3 == 0 ? cls(rng) : truth[i];
    }
    auto m = compute_metrics(truth, pred);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < 200; ++i) correct += truth[i] == pred[i];
    EXPECT_DOUBLE_EQ(m.accuracy, correct / 200.0);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < 200; ++i) {
            tp += truth[i] == k && pred[i] == k;
            fp += truth[i] != k && pred[i] == k;
            fn += truth[i] == k && pred[i] != k;
        }
        EXPECT_EQ(m.per_class[k], class_metrics(tp, fp, fn)) << k;
    }
}

TEST(Metrics, JsonRoundTripAndTable) {
    std::vector<std::size_t> truth{0, 1, 2, 2, 3}, pred{0, 2, 2, 2, 4};
    auto m = compute_metrics(truth, pred);
    EXPECT_EQ(metrics_from_json(nlohmann::json::parse(metrics_to_json(m).dump())), m);
    auto table = format_metrics_table(m);
    EXPECT_NE(table.find("macro avg"), std::string::npos);
    EXPECT_NE(table.find("pour_water"), std::string::npos);
    EXPECT_THROW(metrics_from_json(nlohmann::json::object()), ParseError);
}

TEST(Metrics, RejectsMismatchedInput) {
    std::vector<std::size_t> a{0, 1}, b{0};
    EXPECT_THROW(compute_metrics(a, b), ArgumentError);
    std::vector<std::size_t> c{0, 99};
    EXPECT_THROW(compute_metrics(a, c), ArgumentError);
}
