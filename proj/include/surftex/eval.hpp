#pragma once

#include "surftex/features.hpp"
#include "surftex/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace surftex {

struct CropRect {
    int x0 = 0;
    int y0 = 0;
    int side = 0;

    friend bool operator==(const CropRect&, const CropRect&) = default;
};

struct ManifestEntry {
    std::string id;
    std::string path;  ///< as written; relative paths resolve against Manifest::base_dir
    std::string label;
    std::optional<CropRect> crop;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Dataset index. CSV with header "sample_id,path,label[,x0,y0,side]". An
/// optional leading "#classes=a|b|c" line fixes the class list and order;
/// otherwise classes are taken in first-seen order.
struct Manifest {
    std::vector<std::string> classes;
    std::vector<ManifestEntry> entries;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const ManifestEntry& e) const;
    std::vector<std::string> labels() const;
};

/// Parses and validates; every problem found is listed in one DataError.
/// With `check_files`, missing image files are reported per entry.
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                        const std::string& origin = "<memory>", bool check_files = false);
Manifest load_manifest(const std::filesystem::path& path, bool check_files = true);
std::string format_manifest(const Manifest& m);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

/// Loads the entry's image as grayscale and applies its crop, if any.
GrayImage load_sample(const Manifest& m, const ManifestEntry& e);

struct SplitSpec {
    /// Used when train_per_class is unset.
    double train_fraction = 0.7;
    std::optional<int> train_per_class;
    int trials = 10;
    std::uint64_t seed = 0;
    bool stratified = true;

    void validate() const;
};

struct Split {
    std::vector<std::size_t> train;  ///< ascending indices
    std::vector<std::size_t> test;   ///< ascending indices
};

/// Partitions sample indices for one trial. The trial's generator is
/// SplitMix64(derive_seed(seed, trial)). Stratified: for each class in
/// `classes` order, that class's indices (ascending) are shuffled with the
/// shared generator and the first n go to train. Otherwise all indices are
/// shuffled once. Fractions round to nearest and keep at least one sample
/// on each side.
Split split(std::span<const std::string> labels, std::span<const std::string> classes,
            const SplitSpec& spec, int trial);

struct TrialResult {
    std::size_t correct = 0;
    std::size_t total = 0;
    double accuracy = 0.0;
    /// confusion[true][predicted], indexed like EvalReport::classes.
    std::vector<std::vector<std::size_t>> confusion;
};

struct EvalPoint {
    std::optional<int> train_per_class;
    std::size_t train_total = 0;
    std::size_t test_total = 0;
    std::vector<TrialResult> trials;
    double mean = 0.0;
    double std = 0.0;  ///< population
};

struct EvalReport {
    std::string config;
    std::vector<std::string> classes;
    std::vector<EvalPoint> points;
};

/// Predicts one label per test sample.
using Classifier = std::function<std::vector<std::string>(const std::vector<LabeledFeature>& train,
                                                          const std::vector<LabeledFeature>& test)>;

/// k-NN over L1; with `minmax`, a MinMaxScaler is fitted on each train set.
Classifier knn_classifier(int k, unsigned threads = 0, bool minmax = false);

/// Repeated-split evaluation over precomputed features. One point per entry
/// of `train_sizes` (samples per class); an empty list gives a single point
/// at spec's fraction or per-class count. The same trial index yields the
/// same shuffle at every point, so train sets are nested across sizes.
EvalReport evaluate_features(const std::vector<LabeledFeature>& samples,
                             const std::vector<std::string>& classes, const SplitSpec& spec,
                             const std::vector<int>& train_sizes, const Classifier& classifier,
                             const std::string& config);

struct EvalOptions {
    int k = 1;
    bool minmax = false;
    unsigned threads = 0;
};

/// Extracts features once per manifest entry, then runs evaluate_features
/// with a k-NN classifier.
EvalReport evaluate(const Manifest& manifest, const FeatureConfig& features, const SplitSpec& spec,
                    const std::vector<int>& train_sizes, const EvalOptions& opts = {});

std::vector<LabeledFeature> extract_all(const Manifest& manifest, const FeatureExtractor& extractor,
                                        unsigned threads = 0);

/// CSV: "#config=..." line, then
///   kind,train_per_class,train_total,test_total,trial,accuracy,mean,std
/// with one "trial" row per trial and one "aggregate" row per point, a blank
/// line, then the confusion block
///   kind,train_per_class,trial,true_label,pred_<class>...
std::string format_report(const EvalReport& report);
void write_report(const std::filesystem::path& path, const EvalReport& report);

}  // namespace surftex
