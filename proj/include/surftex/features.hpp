#pragma once

#include "surftex/filters.hpp"
#include "surftex/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace surftex {

enum class Method { gabor, stddev };

Method parse_method(std::string_view tag);
std::string_view to_string(Method m);

struct FeatureVector {
    Method method = Method::stddev;
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    /// Distance-eligible iff method and dimension agree.
    bool comparable(const FeatureVector& other) const noexcept {
        return method == other.method && dim() == other.dim();
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct LabeledFeature {
    FeatureVector feature;
    std::string label;
    std::string source;

    friend bool operator==(const LabeledFeature&, const LabeledFeature&) = default;
};

/// Per kernel, in bank order: mean |response| then population std of the
/// response, both under replicate padding. dim = 2 * bank size.
FeatureVector gabor_features(const GrayImage& img, std::span<const Kernel> bank);
FeatureVector gabor_features(const GrayImage& img, std::span<const BankEntry> bank);

struct StddevFeatureConfig {
    std::vector<WindowSpec> windows = default_windows();
    /// Blocks per side used to pool each filtered map. A grid equal to the
    /// patch side keeps the full-resolution map.
    int grid = 8;
};

/// For each window in order: std-dev filtered map pooled into grid x grid
/// block means, blocks row-major. dim = windows * grid^2.
FeatureVector stddev_features(const GrayImage& img, const StddevFeatureConfig& cfg = {});

/// Selects and configures one of the two extractors.
struct FeatureConfig {
    Method method = Method::stddev;
    BankConfig bank = default_bank_config();
    StddevFeatureConfig stddev;

    /// Single-line description used in report and CLI config echoes.
    std::string describe() const;
};

/// Reusable extractor; builds the Gabor bank once.
class FeatureExtractor {
public:
    explicit FeatureExtractor(FeatureConfig cfg);

    FeatureVector operator()(const GrayImage& img) const;
    const FeatureConfig& config() const noexcept { return cfg_; }

private:
    FeatureConfig cfg_;
    std::vector<Kernel> kernels_;
};

/// Per-dimension min-max scaling fitted on one set and applied to others.
/// Dimensions with zero range map to 0.
class MinMaxScaler {
public:
    static MinMaxScaler fit(std::span<const LabeledFeature> data);
    FeatureVector transform(const FeatureVector& v) const;

private:
    std::vector<double> lo_;
    std::vector<double> range_;
};

/// In-memory form of a feature file.
struct FeatureSet {
    Method method = Method::stddev;
    std::size_t dim = 0;
    std::vector<std::string> classes;
    std::vector<LabeledFeature> items;
};

/// Builds a set from homogeneous features; classes in first-seen order
/// unless `classes` is given.
FeatureSet make_feature_set(std::vector<LabeledFeature> items, Method method,
                            std::vector<std::string> classes = {});

/// CSV. Header "#method=<tag>,dim=<n>,classes=<c1|c2|...>", then one row
/// per sample: label, source id, values in shortest round-trip form.
std::string format_features(const FeatureSet& set);
FeatureSet parse_features(std::string_view text, const std::string& origin = "<memory>");

void write_features(const std::filesystem::path& path, const FeatureSet& set);
FeatureSet read_features(const std::filesystem::path& path);

}  // namespace surftex
