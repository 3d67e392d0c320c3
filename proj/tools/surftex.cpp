// surftex: command-line front end for corpus generation, feature extraction,
// k-NN classification, repeated-split evaluation and kernel inspection.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.

#include "surftex/classify.hpp"
#include "surftex/error.hpp"
#include "surftex/eval.hpp"
#include "surftex/features.hpp"
#include "surftex/filters.hpp"
#include "surftex/synth.hpp"
#include "surftex/textio.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace surftex;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    for (const auto& part : textio::split(text, ',')) {
        auto t = textio::trim(part);
        if (t.empty()) continue;
        try {
            out.push_back(static_cast<int>(textio::parse_int(t, what)));
        } catch (const DataError& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

void echo(const std::string& cmd, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::cerr << "surftex " << cmd;
    for (const auto& [k, v] : kv) std::cerr << " " << k << "=" << v;
    std::cerr << "\n";
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string out;
    int per_class = 100;
    int side = 64;
    std::uint64_t seed = 0;
    std::string recipes;
    bool orientation = false;
};

int run_synth(const SynthArgs& a) {
    SynthConfig cfg;
    cfg.per_class = a.per_class;
    cfg.patch_side = a.side;
    cfg.seed = a.seed;
    if (!a.recipes.empty()) {
        cfg.recipes = load_recipes(a.recipes);
    } else {
        cfg.recipes = a.orientation ? orientation_recipes() : default_recipes();
    }
    std::vector<std::string> names;
    for (const auto& r : cfg.recipes) names.push_back(r.label);
    echo("synth", {{"out", a.out},
                   {"per_class", std::to_string(cfg.per_class)},
                   {"side", std::to_string(cfg.patch_side)},
                   {"seed", std::to_string(cfg.seed)},
                   {"recipes", a.recipes.empty() ? (a.orientation ? "orientation" : "default") : a.recipes},
                   {"classes", textio::join(names, '|')}});
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    auto m = gen_corpus(cfg, a.out);
    std::cout << "wrote " << m.entries.size() << " patches and " << (std::filesystem::path(a.out) / "manifest.csv").string()
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FeatureArgs {
    std::string method = "stddev";
    std::string bank;
    std::string windows = "3,5,7";
    int grid = 8;
};

FeatureConfig make_feature_config(const FeatureArgs& a) {
    FeatureConfig cfg;
    cfg.method = parse_method(a.method);
    if (!a.bank.empty()) cfg.bank = load_bank_config(a.bank);
    cfg.stddev.windows.clear();
    for (int w : parse_int_list(a.windows, "window")) cfg.stddev.windows.push_back({w});
    cfg.stddev.grid = a.grid;
    if (cfg.method == Method::stddev) {
        if (cfg.stddev.windows.empty()) throw UsageError("--windows must list at least one size");
        for (auto w : cfg.stddev.windows) {
            try {
                w.validate();
            } catch (const InvalidArgument& e) {
                throw UsageError(e.what());
            }
        }
    }
    return cfg;
}

struct ExtractArgs {
    std::string manifest;
    std::string out;
    FeatureArgs features;
    unsigned threads = 0;
};

int run_extract(const ExtractArgs& a) {
    auto cfg = make_feature_config(a.features);
    echo("extract", {{"manifest", a.manifest}, {"out", a.out}, {"features", cfg.describe()},
                     {"threads", std::to_string(a.threads)}});
    auto manifest = load_manifest(a.manifest);
    FeatureExtractor extractor(cfg);
    auto samples = extract_all(manifest, extractor, a.threads);
    auto set = make_feature_set(std::move(samples), cfg.method, manifest.classes);
    write_features(a.out, set);
    std::cout << "wrote " << set.items.size() << " feature vectors of dim " << set.dim << " to " << a.out
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    std::string train;
    std::string test;
    std::string out;
    int k = 1;
    unsigned threads = 0;
};

int run_classify(const ClassifyArgs& a) {
    echo("classify", {{"train", a.train}, {"test", a.test}, {"out", a.out}, {"k", std::to_string(a.k)},
                      {"threads", std::to_string(a.threads)}});
    auto train = read_features(a.train);
    auto test = read_features(a.test);
    if (train.method != test.method || train.dim != test.dim) {
        throw DataError("train features (" + std::string(to_string(train.method)) + ", dim " +
                        std::to_string(train.dim) + ") and test features (" +
                        std::string(to_string(test.method)) + ", dim " + std::to_string(test.dim) +
                        ") are not comparable");
    }
    if (train.items.empty()) throw DataError("training feature file is empty");
    if (a.k > static_cast<int>(train.items.size())) {
        throw UsageError("--k " + std::to_string(a.k) + " exceeds training size " +
                         std::to_string(train.items.size()));
    }
    KnnModel model(train.items, a.k);
    std::vector<FeatureVector> queries;
    for (const auto& t : test.items) queries.push_back(t.feature);
    auto preds = model.classify_batch(queries, a.threads);

    std::string out = "source_id,label,predicted,neighbor_ids,distances\n";
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::vector<std::string> d;
        for (double v : preds[i].distances) d.push_back(textio::format_double(v));
        out += test.items[i].source + "," + test.items[i].label + "," + preds[i].label + "," +
               textio::join(preds[i].neighbor_ids, '|') + "," + textio::join(d, '|') + "\n";
        if (preds[i].label == test.items[i].label) ++correct;
    }
    textio::atomic_write(a.out, out);
    std::cout << "accuracy " << correct << "/" << preds.size() << " = "
              << (preds.empty() ? 0.0 : static_cast<double>(correct) / preds.size()) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string manifest;
    std::string out;
    FeatureArgs features;
    int trials = 10;
    std::string train_sizes = "5,10,20,40,60";
    std::optional<double> train_fraction;
    int k = 1;
    std::uint64_t seed = 0;
    bool pooled = false;
    bool minmax = false;
    unsigned threads = 0;
};

int run_evaluate(const EvaluateArgs& a) {
    auto cfg = make_feature_config(a.features);
    SplitSpec spec;
    spec.trials = a.trials;
    spec.seed = a.seed;
    spec.stratified = !a.pooled;
    std::vector<int> sizes;
    if (a.train_fraction) {
        spec.train_fraction = *a.train_fraction;
    } else {
        sizes = parse_int_list(a.train_sizes, "train size");
        if (sizes.empty()) throw UsageError("--train-sizes must list at least one size");
    }
    try {
        spec.validate();
        for (int s : sizes)
            if (s < 1) throw InvalidArgument("train sizes must be >= 1");
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    echo("evaluate", {{"manifest", a.manifest}, {"out", a.out}, {"features", cfg.describe()},
                      {"trials", std::to_string(spec.trials)},
                      {"train_sizes", a.train_fraction ? std::string("-") : a.train_sizes},
                      {"train_fraction", a.train_fraction ? textio::format_double(*a.train_fraction) : "-"},
                      {"split", spec.stratified ? "stratified" : "pooled"},
                      {"k", std::to_string(a.k)}, {"seed", std::to_string(spec.seed)},
                      {"minmax", a.minmax ? "on" : "off"}, {"threads", std::to_string(a.threads)}});
    auto manifest = load_manifest(a.manifest);
    EvalOptions opts{a.k, a.minmax, a.threads};
    auto report = evaluate(manifest, cfg, spec, sizes, opts);
    write_report(a.out, report);
    for (const auto& p : report.points) {
        std::cout << "train/class=" << (p.train_per_class ? std::to_string(*p.train_per_class) : "-")
                  << " train=" << p.train_total << " test=" << p.test_total << " mean=" << p.mean
                  << " std=" << p.std << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct KernelArgs {
    double theta = 0.0;
    double freq = 0.0;
    std::optional<double> sigma_x;
    std::optional<double> sigma_y;
    std::optional<int> half_size;
    std::string out;
};

int run_kernel(const KernelArgs& a) {
    GaborParams p;
    p.theta = a.theta;
    p.freq = a.freq;
    p.sigma_x = a.sigma_x.value_or(0.56 / a.freq);
    p.sigma_y = a.sigma_y.value_or(p.sigma_x);
    p.half_size = a.half_size.value_or(
        std::max(1, static_cast<int>(std::ceil(3.0 * std::max(p.sigma_x, p.sigma_y)))));
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    echo("kernel", {{"theta", textio::format_double(p.theta)}, {"freq", textio::format_double(p.freq)},
                    {"sigma_x", textio::format_double(p.sigma_x)},
                    {"sigma_y", textio::format_double(p.sigma_y)},
                    {"half_size", std::to_string(p.half_size)}, {"out", a.out}});
    auto k = make_gabor_kernel(p);
    std::filesystem::path out(a.out);
    if (out.extension() == ".pgm") {
        write_pgm(out, kernel_to_image(k));
    } else {
        textio::atomic_write(out, kernel_to_text(k));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surface texture classification: Gabor and std-dev features with L1 k-NN"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a labelled synthetic texture corpus");
    c_synth->add_option("--out", synth.out, "Output directory")->required();
    c_synth->add_option("--per-class", synth.per_class, "Patches per class")->capture_default_str();
    c_synth->add_option("--side", synth.side, "Patch side in pixels")->capture_default_str();
    c_synth->add_option("--seed", synth.seed, "Master seed")->capture_default_str();
    auto* recipes_opt = c_synth->add_option("--recipes", synth.recipes, "Recipe file")->check(CLI::ExistingFile);
    c_synth->add_flag("--orientation", synth.orientation, "Use the three-orientation grating recipes")
        ->excludes(recipes_opt);

    auto add_feature_opts = [](CLI::App* cmd, FeatureArgs& f) {
        cmd->add_option("--method", f.method, "gabor or stddev")
            ->check(CLI::IsMember({"gabor", "stddev"}))
            ->capture_default_str();
        cmd->add_option("--bank", f.bank, "Gabor bank config file")->check(CLI::ExistingFile);
        cmd->add_option("--windows", f.windows, "Std-dev window sides")->capture_default_str();
        cmd->add_option("--grid", f.grid, "Std-dev pooling blocks per side")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    ExtractArgs extract;
    auto* c_extract = app.add_subcommand("extract", "Extract a feature file from a manifest");
    c_extract->add_option("--manifest", extract.manifest, "Manifest CSV")->required();
    c_extract->add_option("--out", extract.out, "Feature file to write")->required();
    add_feature_opts(c_extract, extract.features);
    c_extract->add_option("--threads", extract.threads, "Worker cap (0 = all cores)");

    ClassifyArgs classify;
    auto* c_classify = app.add_subcommand("classify", "Classify test features against train features");
    c_classify->add_option("--train", classify.train, "Training feature file")->required();
    c_classify->add_option("--test", classify.test, "Test feature file")->required();
    c_classify->add_option("--out", classify.out, "Predictions CSV")->required();
    c_classify->add_option("--k", classify.k, "Neighbour count")->check(CLI::PositiveNumber)->capture_default_str();
    c_classify->add_option("--threads", classify.threads, "Worker cap (0 = all cores)");

    EvaluateArgs evaluate;
    auto* c_eval = app.add_subcommand("evaluate", "Repeated random-split evaluation");
    c_eval->add_option("--manifest", evaluate.manifest, "Manifest CSV")->required();
    c_eval->add_option("--out", evaluate.out, "Report CSV")->required();
    add_feature_opts(c_eval, evaluate.features);
    c_eval->add_option("--trials", evaluate.trials, "Trials per point")->check(CLI::PositiveNumber)->capture_default_str();
    auto* sizes_opt =
        c_eval->add_option("--train-sizes", evaluate.train_sizes, "Train samples per class")->capture_default_str();
    c_eval->add_option("--train-fraction", evaluate.train_fraction, "Single point at this train fraction")
        ->check(CLI::Range(0.0, 1.0))
        ->excludes(sizes_opt);
    c_eval->add_option("--k", evaluate.k, "Neighbour count")->check(CLI::PositiveNumber)->capture_default_str();
    c_eval->add_option("--seed", evaluate.seed, "Split seed")->capture_default_str();
    c_eval->add_flag("--pooled", evaluate.pooled, "Split without stratifying by class");
    c_eval->add_flag("--minmax", evaluate.minmax, "Min-max scale features, fitted per train set");
    c_eval->add_option("--threads", evaluate.threads, "Worker cap (0 = all cores)");

    KernelArgs kernel;
    auto* c_kernel = app.add_subcommand("kernel", "Dump a Gabor kernel as text or PGM");
    c_kernel->add_option("--theta", kernel.theta, "Orientation in radians, [0, pi)")->capture_default_str();
    c_kernel->add_option("--freq", kernel.freq, "Frequency in cycles per pixel")
        ->required()
        ->check(CLI::PositiveNumber);
    c_kernel->add_option("--sigma-x", kernel.sigma_x, "Envelope sigma along the carrier")->check(CLI::PositiveNumber);
    c_kernel->add_option("--sigma-y", kernel.sigma_y, "Envelope sigma across the carrier")->check(CLI::PositiveNumber);
    c_kernel->add_option("--half-size", kernel.half_size, "Kernel half width")->check(CLI::PositiveNumber);
    c_kernel->add_option("--out", kernel.out, "Output .txt or .pgm")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (c_synth->parsed()) return run_synth(synth);
        if (c_extract->parsed()) return run_extract(extract);
        if (c_classify->parsed()) return run_classify(classify);
        if (c_eval->parsed()) return run_evaluate(evaluate);
        if (c_kernel->parsed()) return run_kernel(kernel);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
