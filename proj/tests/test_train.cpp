#include <gtest/gtest.h>

#include <cmath>

#include "ambient/metrics.hpp"
#include "ambient/syngen.hpp"
#include "ambient/train.hpp"

using namespace ambient;

namespace {

const Corpus& small_corpus() {
    static const Corpus corpus = build_corpus(10, 42);
    return corpus;
}

TrainConfig quick(std::size_t epochs = 3, std::uint64_t seed = 42) {
    TrainConfig tc;
    tc.epochs = epochs;
    tc.seed = seed;
    return tc;
}

}  // namespace

TEST(Train, InitialLossIsLogClassCountNearZeroInit) {
    auto tc = quick(1);
    tc.init_scale = 1e-3;
    auto r = train(small_corpus().train, tc);
    EXPECT_NEAR(r.loss_history.front(), std::log(20.0), 0.1);
}

TEST(Train, LossHistoryHasOneEntryPerEpochPlusInitial) {
    auto r = train(small_corpus().train, quick(4));
    ASSERT_EQ(r.loss_history.size(), 5u);
    EXPECT_LT(r.loss_history.back(), r.loss_history.front());
    for (double l : r.loss_history) EXPECT_TRUE(std::isfinite(l));
}

TEST(Train, BitDeterministicUnderFixedSeed) {
    auto a = train(small_corpus().train, quick(2));
    auto b = train(small_corpus().train, quick(2));
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.loss_history, b.loss_history);
    auto c = train(small_corpus().train, quick(2, 43));
    EXPECT_NE(a.params.weights, c.params.weights);
}

TEST(Train, LearnsWellAboveChance) {
    auto tc = quick(15);
    tc.learning_rate = 1e-2;
    auto r = train(small_corpus().train, tc);
    auto m = evaluate(small_corpus().test, r.params);
    EXPECT_GT(m.accuracy, 0.6);
    EXPECT_GT(m.macro_f1, 0.5);
}

TEST(Train, RejectsDegenerateInput) {
    std::vector<Window> none;
    EXPECT_THROW(train(none, quick()), ArgumentError);
    std::vector<Window> one_class;
    for (const auto& w : small_corpus().train)
        if (*w.label == "eat") one_class.push_back(w);
    EXPECT_THROW(train(one_class, quick()), ArgumentError);
    auto tc = quick();
    tc.batch_size = 0;
    EXPECT_THROW(train(small_corpus().train, tc), ArgumentError);
    auto unlabeled = small_corpus().train;
    unlabeled[0].label.reset();
    EXPECT_THROW(train(unlabeled, quick()), ArgumentError);
}
