#include "surftex/synth.hpp"

#include "surftex/error.hpp"
#include "surftex/textio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

namespace surftex {

void TextureRecipe::validate() const {
    if (label.empty() || label.find_first_of(",|/\\ \t") != std::string::npos) {
        throw InvalidArgument("recipe label '" + label + "' is empty or has reserved characters");
    }
    if (roughness < 0.0 || blur < 0 || amplitude < 0.0 || streaks < 0 || streak_width <= 0.0) {
        throw InvalidArgument("recipe '" + label + "' has a negative parameter");
    }
    if (amplitude > 0.0 && !(freq > 0.0)) {
        throw InvalidArgument("recipe '" + label + "' needs a positive grating frequency");
    }
}

void SynthConfig::validate() const {
    if (recipes.empty()) throw InvalidArgument("no texture recipes");
    if (per_class < 1) throw InvalidArgument("per_class must be >= 1");
    if (patch_side < 8) throw InvalidArgument("patch side must be >= 8");
    std::set<std::string> labels;
    for (const auto& r : recipes) {
        r.validate();
        if (!labels.insert(r.label).second) {
            throw InvalidArgument("duplicate recipe label '" + r.label + "'");
        }
    }
}

std::vector<TextureRecipe> default_recipes() {
    TextureRecipe water;
    water.label = "water";
    water.base = 110.0;
    water.roughness = 3.0;
    water.blur = 2;

    TextureRecipe snow;
    snow.label = "snow";
    snow.base = 200.0;
    snow.roughness = 28.0;

    TextureRecipe ice;
    ice.label = "ice";
    ice.base = 140.0;
    ice.roughness = 9.0;
    ice.blur = 1;
    ice.amplitude = 12.0;
    ice.theta = std::numbers::pi / 4.0;
    ice.freq = 0.125;
    ice.random_phase = true;
    ice.streaks = 3;
    ice.streak_gain = 50.0;
    ice.streak_width = 1.5;

    return {snow, ice, water};
}

std::vector<TextureRecipe> orientation_recipes() {
    std::vector<TextureRecipe> out;
    const char* names[] = {"deg0", "deg60", "deg120"};
    for (int i = 0; i < 3; ++i) {
        TextureRecipe r;
        r.label = names[i];
        r.base = 128.0;
        r.amplitude = 40.0;
        r.theta = i * std::numbers::pi / 3.0;
        r.freq = 0.125;
        r.random_phase = true;
        r.roughness = 10.0;
        out.push_back(r);
    }
    return out;
}

std::vector<TextureRecipe> parse_recipes(std::string_view text, const std::string& origin) {
    std::vector<TextureRecipe> out;
    int lineno = 0;
    for (const auto& raw : textio::lines(text)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = textio::trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::istringstream in{std::string(line)};
        TextureRecipe r;
        in >> r.label;
        std::string tok;
        while (in >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw DataError(where + ": expected key=value, got '" + tok + "'");
            auto key = tok.substr(0, eq);
            auto value = tok.substr(eq + 1);
            auto num = [&] { return textio::parse_double(value, where + " " + key); };
            auto whole = [&] { return static_cast<int>(textio::parse_int(value, where + " " + key)); };
            if (key == "base") r.base = num();
            else if (key == "roughness") r.roughness = num();
            else if (key == "blur") r.blur = whole();
            else if (key == "amplitude") r.amplitude = num();
            else if (key == "theta") r.theta = num();
            else if (key == "freq") r.freq = num();
            else if (key == "phase") {
                if (value == "random") r.random_phase = true;
                else r.phase = num();
            }
            else if (key == "streaks") r.streaks = whole();
            else if (key == "streak_gain") r.streak_gain = num();
            else if (key == "streak_width") r.streak_width = num();
            else throw DataError(where + ": unknown recipe key '" + key + "'");
        }
        try {
            r.validate();
        } catch (const InvalidArgument& e) {
            throw DataError(where + ": " + e.what());
        }
        out.push_back(std::move(r));
    }
    if (out.empty()) throw DataError(origin + ": no recipes");
    return out;
}

std::vector<TextureRecipe> load_recipes(const std::filesystem::path& path) {
    return parse_recipes(textio::read_file(path), path.string());
}

GrayImage render_patch(const TextureRecipe& r, int side, SplitMix64& rng) {
    r.validate();
    const double phase = r.random_phase ? 2.0 * std::numbers::pi * rng.uniform_open() : r.phase;

    std::vector<double> noise(static_cast<std::size_t>(side) * side, 0.0);
    if (r.roughness > 0.0) {
        const int b = r.blur;
        const int ext = side + 2 * b;
        std::vector<double> field(static_cast<std::size_t>(ext) * ext);
        for (auto& v : field) v = rng.gaussian();
        const double scale = 1.0 / (2 * b + 1);
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) {
                double s = 0.0;
                for (int dy = 0; dy <= 2 * b; ++dy)
                    for (int dx = 0; dx <= 2 * b; ++dx)
                        s += field[static_cast<std::size_t>(y + dy) * ext + (x + dx)];
                noise[static_cast<std::size_t>(y) * side + x] = s * scale;
            }
        }
    }

    struct Streak {
        double px, py;
    };
    std::vector<Streak> streaks;
    for (int i = 0; i < r.streaks; ++i) {
        const double px = side * rng.uniform_open();
        const double py = side * rng.uniform_open();
        streaks.push_back({px, py});
    }

    const double c = std::cos(r.theta);
    const double s = std::sin(r.theta);
    std::vector<double> px(static_cast<std::size_t>(side) * side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            double v = r.base;
            if (r.amplitude > 0.0) {
                v += r.amplitude * std::sin(2.0 * std::numbers::pi * r.freq * (x * c + y * s) + phase);
            }
            v += r.roughness * noise[static_cast<std::size_t>(y) * side + x];
            for (const auto& st : streaks) {
                const double d = -(x - st.px) * s + (y - st.py) * c;
                v += r.streak_gain * std::exp(-0.5 * d * d / (r.streak_width * r.streak_width));
            }
            px[static_cast<std::size_t>(y) * side + x] = std::round(std::clamp(v, 0.0, 255.0));
        }
    }
    return GrayImage(side, side, std::move(px));
}

std::vector<SynthSample> render_corpus(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<SynthSample> out;
    out.reserve(cfg.recipes.size() * cfg.per_class);
    for (std::size_t ci = 0; ci < cfg.recipes.size(); ++ci) {
        const auto& r = cfg.recipes[ci];
        for (int i = 0; i < cfg.per_class; ++i) {
            SplitMix64 rng(derive_seed(cfg.seed, ci * static_cast<std::uint64_t>(cfg.per_class) + i));
            char num[16];
            std::snprintf(num, sizeof num, "%04d", i);
            const std::string id = r.label + "_" + num;
            out.push_back({{id, r.label + "/" + id + ".pgm", r.label, std::nullopt},
                           render_patch(r, cfg.patch_side, rng)});
        }
    }
    return out;
}

Manifest gen_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
    auto samples = render_corpus(cfg);
    std::error_code ec;
    for (const auto& r : cfg.recipes) {
        std::filesystem::create_directories(out_dir / r.label, ec);
        if (ec) {
            throw IoError("cannot create '" + (out_dir / r.label).string() + "': " + ec.message());
        }
    }
    Manifest m;
    m.base_dir = out_dir;
    for (const auto& r : cfg.recipes) m.classes.push_back(r.label);
    for (auto& s : samples) {
        write_pgm(out_dir / s.entry.path, s.image);
        m.entries.push_back(std::move(s.entry));
    }
    write_manifest(out_dir / "manifest.csv", m);
    return m;
}

}  // namespace surftex
