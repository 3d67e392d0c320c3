#pragma once

#include "surftex/eval.hpp"
#include "surftex/image.hpp"
#include "surftex/prng.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace surftex {

/// Procedural texture for one class. Each pixel is
///
///   base + amplitude * sin(2 pi freq (x cos theta + y sin theta) + phase)
///        + roughness * n(x, y) + streaks(x, y)
///
/// clamped to [0, 255] and rounded to the nearest integer. n is unit-variance
/// Gaussian noise, box-blurred over a (2 blur + 1)^2 window and rescaled by
/// (2 blur + 1) to keep unit variance. Each streak is a bright line along
/// theta through a random point, with a Gaussian cross-section of
/// `streak_width` and peak `streak_gain`.
struct TextureRecipe {
    std::string label;
    double base = 128.0;
    double roughness = 0.0;
    int blur = 0;
    double amplitude = 0.0;
    double theta = 0.0;
    double freq = 0.125;
    double phase = 0.0;
    bool random_phase = false;
    int streaks = 0;
    double streak_gain = 0.0;
    double streak_width = 1.0;

    void validate() const;
};

struct SynthConfig {
    std::vector<TextureRecipe> recipes;
    int per_class = 100;
    int patch_side = 64;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Three classes separable by local variance: smooth "water", coarse-grained
/// "snow", and "ice" with moderate grain, a faint grating and bright streaks.
std::vector<TextureRecipe> default_recipes();

/// Three noisy gratings at orientations 0, pi/3 and 2 pi/3 with random phase.
std::vector<TextureRecipe> orientation_recipes();

/// One recipe per non-empty line: "<label> key=value ...". Keys match the
/// TextureRecipe fields; "phase=random" sets random_phase. '#' comments.
std::vector<TextureRecipe> parse_recipes(std::string_view text, const std::string& origin = "<memory>");
std::vector<TextureRecipe> load_recipes(const std::filesystem::path& path);

/// Consumes the generator in a fixed order: phase draw (if random), the
/// noise field row-major, then two uniforms per streak.
GrayImage render_patch(const TextureRecipe& recipe, int side, SplitMix64& rng);

struct SynthSample {
    ManifestEntry entry;
    GrayImage image;
};

/// Patch i of class c (0-based, recipe order) uses the stream
/// SplitMix64(derive_seed(seed, c * per_class + i)). Ids are
/// "<label>_<i padded to 4 digits>", paths "<label>/<id>.pgm".
std::vector<SynthSample> render_corpus(const SynthConfig& cfg);

/// Writes every patch as PGM under <out>/<label>/ and manifest.csv at <out>.
Manifest gen_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace surftex
