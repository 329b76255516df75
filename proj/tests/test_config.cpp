#include <gtest/gtest.h>

#include "ambient/config.hpp"

using namespace ambient;

TEST(Config, DefaultsValidate) {
    Config c;
    EXPECT_NO_THROW(validate_config(c));
    EXPECT_EQ(c.window, 180u);
    EXPECT_EQ(c.hop, 90u);
    EXPECT_EQ(c.seed, 42u);
}

TEST(Config, SectionsAndComments) {
    Config c;
    apply_config_text(c, R"(
# comment
[gateway]
address = "0.0.0.0:9000"   # trailing
session_max_events = 8
[train]
lr = 0.01
[llm]
enabled = true
)");
    EXPECT_EQ(c.address, "0.0.0.0:9000");
    EXPECT_EQ(c.session_max_events, 8u);
    EXPECT_EQ(c.lr, 0.01);
    EXPECT_TRUE(c.llm_enabled);
}

TEST(Config, TextRoundTrips) {
    Config c;
    c.model_path = "some \"quoted\" path";
    c.lr = 0.1 + 0.2;
    c.debounce_confidence = 0.75;
    c.llm_enabled = true;
    Config back;
    apply_config_text(back, config_to_text(c));
    EXPECT_EQ(config_to_text(back), config_to_text(c));
    EXPECT_EQ(back.model_path, c.model_path);
    EXPECT_EQ(back.lr, c.lr);
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
    Config c;
    EXPECT_THROW(apply_config_text(c, "[gateway]\nbogus = 1\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "epochs = 3\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "[train]\nepochs = three\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "[train]\nepochs = -3\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "[paths]\nmodel = unquoted\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "[llm]\nenabled = maybe\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "[train\n"), ConfigError);
    try {
        apply_config_text(c, "\n\n[gateway]\nbogus = 1\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("gateway.bogus"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_config("/nonexistent/ambient.toml"), ConfigError);
}

TEST(Config, OverridesFromCommandLine) {
    Config c;
    apply_override(c, "train.epochs=5");
    apply_override(c, "paths.model=out/m.bin");
    apply_override(c, "gateway.device_id=\"kitchen\"");
    apply_override(c, "llm.enabled=true");
    EXPECT_EQ(c.epochs, 5u);
    EXPECT_EQ(c.model_path, "out/m.bin");
    EXPECT_EQ(c.device_id, "kitchen");
    EXPECT_TRUE(c.llm_enabled);
    EXPECT_THROW(apply_override(c, "train.epochs=abc"), ConfigError);
    EXPECT_THROW(apply_override(c, "nokey"), ConfigError);
    EXPECT_THROW(apply_override(c, "gateway.bogus=1"), ConfigError);
}

TEST(Config, ValidationCatchesBadCombinations) {
    auto bad = [](auto mutate) {
        Config c;
        mutate(c);
        return c;
    };
    EXPECT_THROW(validate_config(bad([](Config& c) { c.window = 128; })), ConfigError);
    EXPECT_THROW(validate_config(bad([](Config& c) { c.hop = 0; })), ConfigError);
    EXPECT_THROW(validate_config(bad([](Config& c) { c.debounce_confidence = 2.0; })), ConfigError);
    EXPECT_THROW(validate_config(bad([](Config& c) { c.momentum = 1.0; })), ConfigError);
    EXPECT_THROW(validate_config(bad([](Config& c) { c.llm_client = "carrier-pigeon"; })), ConfigError);
    EXPECT_THROW(validate_config(bad([](Config& c) { c.n_per_class = 1; })), ConfigError);
}

TEST(Config, ShippedSampleHoldsTheDefaults) {
    auto c = load_config(std::string(AMBIENT_DATA_DIR) + "/ambient.toml");
    EXPECT_EQ(config_to_text(c), config_to_text(Config{}));
}
