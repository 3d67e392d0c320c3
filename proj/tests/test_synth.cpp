#include "surftex/error.hpp"
#include "surftex/oracles.hpp"
#include "surftex/synth.hpp"
#include "surftex/textio.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace surftex;

TEST(Synth, CorpusCardinalityAndLayout) {
    test::TempDir dir("synth");
    SynthConfig cfg;
    cfg.recipes = default_recipes();
    cfg.per_class = 100;
    cfg.seed = 3;
    auto m = gen_corpus(cfg, dir.path());
    EXPECT_EQ(m.entries.size(), 300u);
    EXPECT_EQ(m.classes.size(), 3u);
    std::size_t files = 0;
    for (auto& e : std::filesystem::recursive_directory_iterator(dir.path()))
        if (e.path().extension() == ".pgm") ++files;
    EXPECT_EQ(files, 300u);
    auto loaded = load_manifest(dir / "manifest.csv");
    EXPECT_EQ(loaded.entries.size(), 300u);
    EXPECT_EQ(loaded.entries[0].path, "snow/snow_0000.pgm");
    auto img = load_gray(loaded.resolve(loaded.entries[150]));
    EXPECT_EQ(img.width(), 64);
}

TEST(Synth, NoiselessGratingFollowsFormula) {
    TextureRecipe r;
    r.label = "g";
    r.amplitude = 50.0;
    r.theta = 0.4;
    r.freq = 0.1;
    SplitMix64 rng(1);
    auto img = render_patch(r, 32, rng);
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
            const double expect = std::clamp(
                128.0 + 50.0 * std::sin(2.0 * std::numbers::pi * 0.1 * (x * std::cos(0.4) + y * std::sin(0.4))),
                0.0, 255.0);
            EXPECT_LE(std::abs(img.at(x, y) - expect), 0.5);
        }
    }
}

TEST(Synth, SameSeedSameBytes) {
    test::TempDir a("synA"), b("synB");
    SynthConfig cfg;
    cfg.recipes = default_recipes();
    cfg.per_class = 5;
    cfg.seed = 42;
    gen_corpus(cfg, a.path());
    gen_corpus(cfg, b.path());
    for (auto& e : std::filesystem::recursive_directory_iterator(a.path())) {
        if (!e.is_regular_file()) continue;
        auto rel = std::filesystem::relative(e.path(), a.path());
        EXPECT_EQ(textio::read_file(e.path()), textio::read_file(b.path() / rel)) << rel;
    }
    cfg.seed = 43;
    auto other = render_corpus(cfg);
    EXPECT_NE(other[0].image, render_corpus(SynthConfig{cfg.recipes, 5, 64, 42})[0].image);
}

TEST(Synth, RoughnessOrdersLocalVariance) {
    SynthConfig cfg{default_recipes(), 4, 64, 9};
    auto samples = render_corpus(cfg);
    auto mean_std = [&](const std::string& label) {
        double s = 0.0;
        int n = 0;
        for (const auto& smp : samples) {
            if (smp.entry.label != label) continue;
            for (double v : stddev_filter(smp.image, {3}).values) s += v;
            n += 64 * 64;
        }
        return s / n;
    };
    EXPECT_GT(mean_std("snow"), mean_std("ice"));
    EXPECT_GT(mean_std("ice"), mean_std("water"));
}

TEST(Synth, RecipeFileParsing) {
    auto recipes = parse_recipes(
        "# three classes\n"
        "smooth base=100 roughness=2 blur=2\n"
        "lines amplitude=30 theta=1.0 freq=0.125 phase=random streaks=2 streak_gain=40\n");
    ASSERT_EQ(recipes.size(), 2u);
    EXPECT_EQ(recipes[0].blur, 2);
    EXPECT_TRUE(recipes[1].random_phase);
    EXPECT_EQ(recipes[1].streaks, 2);
    EXPECT_THROW(parse_recipes("x color=red\n"), DataError);
    EXPECT_THROW(parse_recipes("x roughness=-1\n"), DataError);
    EXPECT_THROW(parse_recipes("\n"), DataError);
}

TEST(Synth, InvalidConfig) {
    SynthConfig cfg;
    EXPECT_THROW(render_corpus(cfg), InvalidArgument);
    cfg.recipes = default_recipes();
    cfg.recipes.push_back(cfg.recipes[0]);
    EXPECT_THROW(render_corpus(cfg), InvalidArgument);
}

TEST(Oracle, IdentityConvolutionAndConstantStddev) {
    std::mt19937_64 rng(2);
    auto img = test::random_image(rng, 10, 6);
    EXPECT_EQ(oracle::convolve(img, Kernel(1, {1.0}), Padding::zero).values,
              std::vector<double>(img.pixels().begin(), img.pixels().end()));
    for (double v : oracle::stddev(test::constant_image(8, 8, 5.0), 5, Padding::replicate).values) {
        EXPECT_EQ(v, 0.0);
    }
}
