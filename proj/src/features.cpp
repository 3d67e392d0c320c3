#include "surftex/features.hpp"

#include "surftex/error.hpp"
#include "surftex/stats.hpp"
#include "surftex/textio.hpp"

#include <algorithm>
#include <cmath>

namespace surftex {

Method parse_method(std::string_view tag) {
    if (tag == "gabor") return Method::gabor;
    if (tag == "stddev") return Method::stddev;
    throw DataError("unknown feature method '" + std::string(tag) + "' (gabor|stddev)");
}

std::string_view to_string(Method m) { return m == Method::gabor ? "gabor" : "stddev"; }

FeatureVector gabor_features(const GrayImage& img, std::span<const Kernel> bank) {
    if (bank.empty()) throw InvalidArgument("gabor bank is empty");
    FeatureVector out{Method::gabor, {}};
    out.values.reserve(2 * bank.size());
    std::vector<double> magnitude;
    for (const auto& k : bank) {
        auto resp = convolve_same(img, k, Padding::replicate);
        magnitude.resize(resp.values.size());
        std::transform(resp.values.begin(), resp.values.end(), magnitude.begin(),
                       [](double v) { return std::abs(v); });
        out.values.push_back(mean_of(magnitude));
        out.values.push_back(population_std(resp.values));
    }
    return out;
}

FeatureVector gabor_features(const GrayImage& img, std::span<const BankEntry> bank) {
    std::vector<Kernel> kernels;
    kernels.reserve(bank.size());
    for (const auto& e : bank) kernels.push_back(e.kernel);
    return gabor_features(img, std::span<const Kernel>(kernels));
}

FeatureVector stddev_features(const GrayImage& img, const StddevFeatureConfig& cfg) {
    if (cfg.windows.empty()) throw InvalidArgument("no std-dev windows configured");
    if (cfg.grid < 1) throw InvalidArgument("grid must be >= 1");
    if (img.width() != img.height()) {
        throw InvalidArgument("std-dev features need a square patch, got " +
                              std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    const int side = img.width();
    if (side % cfg.grid != 0) {
        throw InvalidArgument("patch side " + std::to_string(side) + " is not divisible by grid " +
                              std::to_string(cfg.grid));
    }
    const int block = side / cfg.grid;
    const double cells = static_cast<double>(block) * block;

    FeatureVector out{Method::stddev, {}};
    out.values.reserve(cfg.windows.size() * cfg.grid * cfg.grid);
    for (const auto& w : cfg.windows) {
        auto map = stddev_filter(img, w, Padding::replicate);
        for (int by = 0; by < cfg.grid; ++by) {
            for (int bx = 0; bx < cfg.grid; ++bx) {
                double s = 0.0;
                for (int y = by * block; y < (by + 1) * block; ++y)
                    for (int x = bx * block; x < (bx + 1) * block; ++x) s += map.at(x, y);
                out.values.push_back(s / cells);
            }
        }
    }
    return out;
}

std::string FeatureConfig::describe() const {
    std::string s = "method=" + std::string(to_string(method));
    if (method == Method::gabor) {
        auto list = [](const std::vector<double>& v) {
            std::vector<std::string> parts;
            for (double x : v) parts.push_back(textio::format_double(x));
            return textio::join(parts, '|');
        };
        s += ";orientations=" + list(bank.orientations) + ";frequencies=" + list(bank.frequencies) +
             ";sigma_scale=" + textio::format_double(bank.sigma_scale) +
             ";half_size_scale=" + textio::format_double(bank.half_size_scale);
    } else {
        std::vector<std::string> sides;
        for (auto w : stddev.windows) sides.push_back(std::to_string(w.side));
        s += ";windows=" + textio::join(sides, '|') + ";grid=" + std::to_string(stddev.grid);
    }
    return s + ";padding=replicate";
}

FeatureExtractor::FeatureExtractor(FeatureConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.method == Method::gabor) {
        for (auto& e : make_gabor_bank(cfg_.bank)) kernels_.push_back(std::move(e.kernel));
    } else {
        if (cfg_.stddev.windows.empty()) throw InvalidArgument("no std-dev windows configured");
        for (const auto& w : cfg_.stddev.windows) w.validate();
        if (cfg_.stddev.grid < 1) throw InvalidArgument("grid must be >= 1");
    }
}

FeatureVector FeatureExtractor::operator()(const GrayImage& img) const {
    if (cfg_.method == Method::gabor) return gabor_features(img, std::span<const Kernel>(kernels_));
    return stddev_features(img, cfg_.stddev);
}

MinMaxScaler MinMaxScaler::fit(std::span<const LabeledFeature> data) {
    if (data.empty()) throw InvalidArgument("cannot fit scaler on an empty set");
    const auto dim = data.front().feature.dim();
    MinMaxScaler s;
    s.lo_ = data.front().feature.values;
    std::vector<double> hi = s.lo_;
    for (const auto& d : data) {
        if (d.feature.dim() != dim) throw DataError("scaler fit on mixed dimensions");
        for (std::size_t i = 0; i < dim; ++i) {
            s.lo_[i] = std::min(s.lo_[i], d.feature.values[i]);
            hi[i] = std::max(hi[i], d.feature.values[i]);
        }
    }
    s.range_.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) s.range_[i] = hi[i] - s.lo_[i];
    return s;
}

FeatureVector MinMaxScaler::transform(const FeatureVector& v) const {
    if (v.dim() != lo_.size()) throw DataError("scaler dimension mismatch");
    FeatureVector out{v.method, std::vector<double>(v.dim())};
    for (std::size_t i = 0; i < v.dim(); ++i) {
        out.values[i] = range_[i] > 0.0 ? (v.values[i] - lo_[i]) / range_[i] : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Feature files

namespace {

void check_token(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_of(",|\n\r") != std::string::npos) {
        throw DataError(std::string(what) + " '" + s + "' is empty or contains a reserved character");
    }
}

}  // namespace

FeatureSet make_feature_set(std::vector<LabeledFeature> items, Method method,
                            std::vector<std::string> classes) {
    FeatureSet set;
    set.method = method;
    set.dim = items.empty() ? 0 : items.front().feature.dim();
    bool declared = !classes.empty();
    set.classes = std::move(classes);
    for (const auto& it : items) {
        if (it.feature.method != method || it.feature.dim() != set.dim) {
            throw DataError("feature set mixes methods or dimensions (sample '" + it.source + "')");
        }
        if (std::find(set.classes.begin(), set.classes.end(), it.label) == set.classes.end()) {
            if (declared) throw DataError("label '" + it.label + "' not in declared classes");
            set.classes.push_back(it.label);
        }
    }
    set.items = std::move(items);
    return set;
}

std::string format_features(const FeatureSet& set) {
    for (const auto& c : set.classes) check_token(c, "class");
    std::string out = "#method=" + std::string(to_string(set.method)) +
                      ",dim=" + std::to_string(set.dim) +
                      ",classes=" + textio::join(set.classes, '|') + "\n";
    for (const auto& it : set.items) {
        if (it.feature.method != set.method || it.feature.dim() != set.dim) {
            throw DataError("cannot write mixed feature set: sample '" + it.source + "' has method " +
                            std::string(to_string(it.feature.method)) + " dim " +
                            std::to_string(it.feature.dim()));
        }
        check_token(it.label, "label");
        check_token(it.source, "source id");
        out += it.label;
        out += ',';
        out += it.source;
        for (double v : it.feature.values) {
            out += ',';
            out += textio::format_double(v);
        }
        out += '\n';
    }
    return out;
}

FeatureSet parse_features(std::string_view text, const std::string& origin) {
    auto all = textio::lines(text);
    if (all.empty() || all.front().rfind("#method=", 0) != 0) {
        throw DataError(origin + ": missing '#method=...' header");
    }
    FeatureSet set;
    bool have_method = false, have_dim = false, have_classes = false;
    for (const auto& field : textio::split(std::string_view(all.front()).substr(1), ',')) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw DataError(origin + ": malformed header field '" + field + "'");
        auto key = field.substr(0, eq);
        auto value = field.substr(eq + 1);
        if (key == "method") {
            try {
                set.method = parse_method(value);
            } catch (const DataError& e) {
                throw DataError(origin + ": " + e.what());
            }
            have_method = true;
        } else if (key == "dim") {
            auto d = textio::parse_int(value, "dim");
            if (d < 0) throw DataError(origin + ": negative dim");
            set.dim = static_cast<std::size_t>(d);
            have_dim = true;
        } else if (key == "classes") {
            if (!value.empty()) set.classes = textio::split(value, '|');
            have_classes = true;
        } else {
            throw DataError(origin + ": unknown header field '" + key + "'");
        }
    }
    if (!have_method || !have_dim || !have_classes) {
        throw DataError(origin + ": header must declare method, dim and classes");
    }
    for (std::size_t ln = 1; ln < all.size(); ++ln) {
        if (textio::trim(all[ln]).empty()) continue;
        auto cols = textio::split(all[ln], ',');
        const std::string where = origin + ":" + std::to_string(ln + 1);
        if (cols.size() != set.dim + 2) {
            throw DataError(where + ": expected " + std::to_string(set.dim) + " values, found " +
                            std::to_string(cols.size() < 2 ? 0 : cols.size() - 2));
        }
        LabeledFeature lf;
        lf.label = cols[0];
        lf.source = cols[1];
        if (std::find(set.classes.begin(), set.classes.end(), lf.label) == set.classes.end()) {
            throw DataError(where + ": label '" + lf.label + "' not declared in header");
        }
        lf.feature.method = set.method;
        lf.feature.values.reserve(set.dim);
        for (std::size_t i = 0; i < set.dim; ++i) {
            lf.feature.values.push_back(textio::parse_double(cols[i + 2], "feature value at " + where));
        }
        set.items.push_back(std::move(lf));
    }
    return set;
}

void write_features(const std::filesystem::path& path, const FeatureSet& set) {
    textio::atomic_write(path, format_features(set));
}

FeatureSet read_features(const std::filesystem::path& path) {
    return parse_features(textio::read_file(path), path.string());
}

}  // namespace surftex
