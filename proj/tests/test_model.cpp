#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "ambient/model.hpp"
#include "ambient/syngen.hpp"
#include "ambient/train.hpp"

using namespace ambient;

namespace {

std::vector<Window> small_batch(std::size_t per_class = 1, std::uint64_t seed = 3) {
    std::vector<Window> out;
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            auto t = generate_activity(kSensedLabels[c * 5], 2.0, derive_seed(seed, {c, i}));
            out.push_back(extract_window(t, 0, kWindowLen));
        }
    return out;
}

ModelParams initialized(const std::vector<Window>& data, std::uint64_t seed = 1, double scale = 1.0) {
    ModelParams p;
    fit_normalization(p, data);
    init_weights(p, seed, scale);
    return p;
}

}  // namespace

TEST(Model, ParameterCountAndGroups) {
    EXPECT_EQ(ModelShape::kTotal, 133604u);
    std::vector<int> covered(ModelShape::kTotal, 0);
    for (auto g : kParamGroups)
        for (auto [b, e] : group_ranges(g))
            for (std::size_t i = b; i < e; ++i) ++covered[i];
    EXPECT_TRUE(std::all_of(covered.begin(), covered.end(), [](int c) { return c == 1; }));
}

TEST(Model, InitBoundsAndZeroBiases) {
    ModelParams p;
    init_weights(p, 5, 1.0);
    auto f = p.fusion();
    for (double b : f.b1) EXPECT_EQ(b, 0.0);
    for (double b : f.b2) EXPECT_EQ(b, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(ModelShape::kFused));
    for (double w : f.w1) ASSERT_LE(std::abs(w), bound);
    auto ch = p.channel(3);
    const double tb = 1.0 / std::sqrt(static_cast<double>(ModelShape::kInput));
    for (double w : ch.time_w1) ASSERT_LE(std::abs(w), tb);
    ModelParams q;
    init_weights(q, 5, 1.0);
    EXPECT_EQ(p, q);
}

TEST(Model, ForwardGivesADistribution) {
    auto batch = small_batch();
    auto p = initialized(batch);
    for (const auto& w : batch) {
        auto pred = predict(w, p);
        double sum = std::accumulate(pred.probs.begin(), pred.probs.end(), 0.0);
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_EQ(pred.confidence(), pred.probs[pred.top()]);
        EXPECT_TRUE(is_sensed_label(pred.label()));
    }
}

TEST(Model, RejectsWrongWindowShape) {
    ModelParams p;
    Window w;
    w.length = 90;
    w.values.assign(kNumChannels * 90, 0.0);
    EXPECT_THROW(predict(w, p), ModelInputError);
    w.length = 180;
    EXPECT_THROW(predict(w, p), ModelInputError);
}

TEST(Model, NormalizationIsPerChannel) {
    auto batch = small_batch(2);
    ModelParams p;
    fit_normalization(p, batch);
    EXPECT_NEAR(p.mean[*channel_index("pressure")], 1013.0, 1.0);
    for (double s : p.stddev) EXPECT_GE(s, kStdFloor);
}

TEST(Model, SerializationRoundTripsExactly) {
    auto batch = small_batch();
    auto p = initialized(batch, 9);
    const auto bytes = serialize_model(p);
    EXPECT_EQ(bytes.size(), 5 + 8 * (ModelShape::kTotal + 30));
    EXPECT_EQ(bytes.size(), model_file_size());
    EXPECT_EQ(bytes.substr(0, 5), "AMBM1");
    EXPECT_EQ(deserialize_model(bytes), p);

    auto path = (std::filesystem::temp_directory_path() / "ambient_model_roundtrip.bin").string();
    save_model(path, p);
    EXPECT_EQ(load_model(path), p);
    std::filesystem::remove(path);
}

TEST(Model, CorruptFilesAreRejected) {
    auto bytes = serialize_model(ModelParams{});
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(deserialize_model(bad_magic), ModelFormatError);
    EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() - 1)), ModelFormatError);
    EXPECT_THROW(deserialize_model(bytes + "x"), ModelFormatError);
    EXPECT_THROW(load_model("/nonexistent/model.bin"), ModelFormatError);
}

TEST(Gradient, MatchesFiniteDifferencesOnEveryGroup) {
    auto batch = small_batch(1, 11);
    auto p = initialized(batch, 2);
    auto report = grad_check(p, batch, 1e-5, 48);
    ASSERT_EQ(report.groups.size(), kParamGroups.size());
    for (const auto& g : report.groups) {
        EXPECT_LT(g.rel_error, 1e-4) << group_name(g.group);
        EXPECT_GT(g.analytic_norm, 0.0) << group_name(g.group);
    }
    EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(Gradient, ZeroWeightsOnlyMoveOutputBias) {
    // With every weight zero the logits are zero, so only the output bias
    // receives gradient: mean(softmax - onehot) = 1/20 - [class share].
    auto batch = small_batch(1);
    ModelParams p;
    fit_normalization(p, batch);
    std::vector<double> grad(ModelShape::kTotal);
    const double loss = loss_and_gradient(p, batch, grad);
    EXPECT_NEAR(loss, std::log(20.0), 1e-12);
    auto [b2_begin, b2_end] = group_ranges(ParamGroup::fuse_b2).front();
    for (std::size_t i = 0; i < ModelShape::kTotal; ++i) {
        if (i >= b2_begin && i < b2_end) continue;
        ASSERT_EQ(grad[i], 0.0) << i;
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        double share = 0.0;
        for (const auto& w : batch) share += *class_index(*w.label) == k;
        share /= static_cast<double>(batch.size());
        EXPECT_NEAR(grad[b2_begin + k], 1.0 / 20.0 - share, 1e-12);
    }
}

TEST(Gradient, BatchGradientIsMeanOfSingles) {
    auto batch = small_batch(1, 4);
    auto p = initialized(batch, 3);
    std::vector<double> whole(ModelShape::kTotal), single(ModelShape::kTotal), sum(ModelShape::kTotal, 0.0);
    loss_and_gradient(p, batch, whole);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        loss_and_gradient(p, std::span<const Window>(&batch[i], 1), single);
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += single[j] / static_cast<double>(batch.size());
    }
    for (std::size_t j = 0; j < sum.size(); ++j) ASSERT_NEAR(whole[j], sum[j], 1e-12 + 1e-9 * std::abs(sum[j]));

    std::vector<double> scaled(ModelShape::kTotal);
    loss_and_gradient(p, batch, scaled, 2.0);
    for (std::size_t j = 0; j < sum.size(); ++j) ASSERT_NEAR(scaled[j], 2.0 * whole[j], 1e-12 + 1e-12 * std::abs(whole[j]));
}
