#include "surftex/eval.hpp"

#include "surftex/classify.hpp"
#include "surftex/error.hpp"
#include "surftex/parallel.hpp"
#include "surftex/prng.hpp"
#include "surftex/textio.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace surftex {

// ---------------------------------------------------------------------------
// Manifest

std::filesystem::path Manifest::resolve(const ManifestEntry& e) const {
    std::filesystem::path p(e.path);
    return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> Manifest::labels() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.label);
    return out;
}

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                        const std::string& origin, bool check_files) {
    Manifest m;
    m.base_dir = base_dir;
    auto all = textio::lines(text);
    std::size_t ln = 0;
    bool declared = false;
    if (ln < all.size() && all[ln].rfind("#classes=", 0) == 0) {
        auto list = all[ln].substr(9);
        if (!list.empty()) m.classes = textio::split(list, '|');
        declared = true;
        ++ln;
    }
    if (ln >= all.size()) throw DataError(origin + ": missing header row");
    auto header = textio::split(all[ln], ',');
    for (auto& h : header) h = std::string(textio::trim(h));
    const bool with_crop = header.size() == 6;
    if (!(header.size() == 3 || with_crop) || header[0] != "sample_id" || header[1] != "path" ||
        header[2] != "label" ||
        (with_crop && (header[3] != "x0" || header[4] != "y0" || header[5] != "side"))) {
        throw DataError(origin + ": header must be 'sample_id,path,label[,x0,y0,side]'");
    }
    ++ln;

    std::vector<std::string> problems;
    std::set<std::string> seen;
    for (; ln < all.size(); ++ln) {
        if (textio::trim(all[ln]).empty()) continue;
        const std::string where = origin + ":" + std::to_string(ln + 1);
        auto cols = textio::split(all[ln], ',');
        if (cols.size() != header.size()) {
            problems.push_back(where + ": expected " + std::to_string(header.size()) + " columns");
            continue;
        }
        ManifestEntry e{cols[0], cols[1], cols[2], std::nullopt};
        if (e.id.empty() || e.path.empty() || e.label.empty()) {
            problems.push_back(where + ": empty sample_id, path or label");
            continue;
        }
        if (!seen.insert(e.id).second) problems.push_back(where + ": duplicate sample_id '" + e.id + "'");
        if (std::find(m.classes.begin(), m.classes.end(), e.label) == m.classes.end()) {
            if (declared) {
                problems.push_back(where + ": unknown class '" + e.label + "' for '" + e.id + "'");
            } else {
                m.classes.push_back(e.label);
            }
        }
        if (with_crop && !(cols[3].empty() && cols[4].empty() && cols[5].empty())) {
            try {
                CropRect c{static_cast<int>(textio::parse_int(cols[3], "x0")),
                           static_cast<int>(textio::parse_int(cols[4], "y0")),
                           static_cast<int>(textio::parse_int(cols[5], "side"))};
                if (c.x0 < 0 || c.y0 < 0 || c.side < 1) throw DataError("invalid crop rectangle");
                e.crop = c;
            } catch (const DataError& ex) {
                problems.push_back(where + ": " + ex.what());
            }
        }
        if (check_files && !std::filesystem::exists(m.resolve(e))) {
            problems.push_back(where + ": missing image file '" + m.resolve(e).string() + "' for '" +
                               e.id + "'");
        }
        m.entries.push_back(std::move(e));
    }
    if (!problems.empty()) {
        std::string msg = origin + ": invalid manifest";
        for (const auto& p : problems) msg += "\n  " + p;
        throw DataError(msg);
    }
    return m;
}

Manifest load_manifest(const std::filesystem::path& path, bool check_files) {
    auto text = textio::read_file(path);
    return parse_manifest(text, path.parent_path(), path.string(), check_files);
}

std::string format_manifest(const Manifest& m) {
    const bool any_crop =
        std::any_of(m.entries.begin(), m.entries.end(), [](const auto& e) { return e.crop.has_value(); });
    std::string out = "#classes=" + textio::join(m.classes, '|') + "\n";
    out += any_crop ? "sample_id,path,label,x0,y0,side\n" : "sample_id,path,label\n";
    for (const auto& e : m.entries) {
        out += e.id + "," + e.path + "," + e.label;
        if (any_crop) {
            if (e.crop) {
                out += "," + std::to_string(e.crop->x0) + "," + std::to_string(e.crop->y0) + "," +
                       std::to_string(e.crop->side);
            } else {
                out += ",,,";
            }
        }
        out += "\n";
    }
    return out;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    textio::atomic_write(path, format_manifest(m));
}

GrayImage load_sample(const Manifest& m, const ManifestEntry& e) {
    auto img = load_gray(m.resolve(e));
    if (!e.crop) return img;
    try {
        return crop_patch(img, e.crop->x0, e.crop->y0, e.crop->side);
    } catch (const InvalidArgument& ex) {
        throw DataError("sample '" + e.id + "': " + ex.what());
    }
}

// ---------------------------------------------------------------------------
// Splitting

void SplitSpec::validate() const {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (train_per_class) {
        if (*train_per_class < 1) throw InvalidArgument("train count per class must be >= 1");
    } else if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("train fraction must lie in (0, 1)");
    }
}

namespace {

std::size_t fraction_count(double fraction, std::size_t n) {
    auto c = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(c, 1, n - 1);
}

}  // namespace

Split split(std::span<const std::string> labels, std::span<const std::string> classes,
            const SplitSpec& spec, int trial) {
    spec.validate();
    if (trial < 0 || trial >= spec.trials) {
        throw InvalidArgument("trial " + std::to_string(trial) + " outside [0, " +
                              std::to_string(spec.trials) + ")");
    }
    SplitMix64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(trial)));
    Split out;

    auto take = [&](std::vector<std::size_t>& idx, std::size_t n) {
        rng.shuffle(std::span<std::size_t>(idx));
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + n);
        out.test.insert(out.test.end(), idx.begin() + n, idx.end());
    };

    if (spec.stratified) {
        for (const auto& cls : classes) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == cls) idx.push_back(i);
            if (idx.empty()) continue;
            std::size_t n;
            if (spec.train_per_class) {
                n = static_cast<std::size_t>(*spec.train_per_class);
                if (n >= idx.size()) {
                    throw DataError("class '" + cls + "' has " + std::to_string(idx.size()) +
                                    " samples, cannot train on " + std::to_string(n) +
                                    " and keep a test sample");
                }
            } else {
                if (idx.size() < 2) {
                    throw DataError("class '" + cls + "' has fewer than 2 samples");
                }
                n = fraction_count(spec.train_fraction, idx.size());
            }
            take(idx, n);
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (std::find(classes.begin(), classes.end(), labels[i]) == classes.end()) {
                throw DataError("label '" + labels[i] + "' is not a declared class");
            }
        }
    } else {
        std::vector<std::size_t> idx(labels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::size_t n;
        if (spec.train_per_class) {
            n = static_cast<std::size_t>(*spec.train_per_class) * classes.size();
            if (n >= idx.size()) throw DataError("requested train size leaves no test samples");
        } else {
            if (idx.size() < 2) throw DataError("need at least 2 samples to split");
            n = fraction_count(spec.train_fraction, idx.size());
        }
        take(idx, n);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Classifier knn_classifier(int k, unsigned threads, bool minmax) {
    return [k, threads, minmax](const std::vector<LabeledFeature>& train,
                                const std::vector<LabeledFeature>& test) {
        std::vector<LabeledFeature> fit = train;
        std::vector<FeatureVector> queries;
        queries.reserve(test.size());
        if (minmax) {
            auto scaler = MinMaxScaler::fit(train);
            for (auto& t : fit) t.feature = scaler.transform(t.feature);
            for (const auto& t : test) queries.push_back(scaler.transform(t.feature));
        } else {
            for (const auto& t : test) queries.push_back(t.feature);
        }
        KnnModel model(std::move(fit), k);
        auto preds = model.classify_batch(queries, threads);
        std::vector<std::string> labels;
        labels.reserve(preds.size());
        for (auto& p : preds) labels.push_back(std::move(p.label));
        return labels;
    };
}

EvalReport evaluate_features(const std::vector<LabeledFeature>& samples,
                             const std::vector<std::string>& classes, const SplitSpec& spec,
                             const std::vector<int>& train_sizes, const Classifier& classifier,
                             const std::string& config) {
    spec.validate();
    if (samples.empty()) throw DataError("no samples to evaluate");
    std::vector<std::string> labels;
    labels.reserve(samples.size());
    for (const auto& s : samples) labels.push_back(s.label);

    auto class_index = [&](const std::string& label) -> std::size_t {
        auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end()) throw DataError("label '" + label + "' is not a declared class");
        return static_cast<std::size_t>(it - classes.begin());
    };

    std::vector<SplitSpec> points;
    if (train_sizes.empty()) {
        points.push_back(spec);
    } else {
        for (int n : train_sizes) {
            SplitSpec s = spec;
            s.train_per_class = n;
            points.push_back(s);
        }
    }

    EvalReport report;
    report.config = config + ";split=" + (spec.stratified ? "stratified" : "pooled") +
                    (train_sizes.empty() && !spec.train_per_class
                         ? ";train_fraction=" + textio::format_double(spec.train_fraction)
                         : std::string()) +
                    ";trials=" + std::to_string(spec.trials) + ";seed=" + std::to_string(spec.seed) +
                    ";std=population;classes=" + textio::join(classes, '|');
    report.classes = classes;

    for (const auto& ps : points) {
        EvalPoint point;
        point.train_per_class = ps.train_per_class;
        std::vector<double> accuracies;
        for (int t = 0; t < ps.trials; ++t) {
            auto parts = split(labels, classes, ps, t);
            std::vector<LabeledFeature> train, test;
            train.reserve(parts.train.size());
            test.reserve(parts.test.size());
            for (auto i : parts.train) train.push_back(samples[i]);
            for (auto i : parts.test) test.push_back(samples[i]);
            auto predicted = classifier(train, test);
            if (predicted.size() != test.size()) {
                throw Error("classifier returned " + std::to_string(predicted.size()) +
                            " predictions for " + std::to_string(test.size()) + " test samples");
            }
            TrialResult tr;
            tr.total = test.size();
            tr.confusion.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
            for (std::size_t i = 0; i < test.size(); ++i) {
                const auto truth = class_index(test[i].label);
                const auto guess = class_index(predicted[i]);
                ++tr.confusion[truth][guess];
                if (truth == guess) ++tr.correct;
            }
            tr.accuracy = static_cast<double>(tr.correct) / static_cast<double>(tr.total);
            accuracies.push_back(tr.accuracy);
            point.train_total = train.size();
            point.test_total = test.size();
            point.trials.push_back(std::move(tr));
        }
        point.mean = mean_of(accuracies);
        point.std = population_std(accuracies);
        report.points.push_back(std::move(point));
    }
    return report;
}

std::vector<LabeledFeature> extract_all(const Manifest& manifest, const FeatureExtractor& extractor,
                                        unsigned threads) {
    std::vector<LabeledFeature> out(manifest.entries.size());
    parallel_for(manifest.entries.size(), threads, [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        try {
            out[i] = {extractor(load_sample(manifest, e)), e.label, e.id};
        } catch (const IoError& ex) {
            throw IoError("sample '" + e.id + "': " + ex.what());
        } catch (const Error& ex) {
            throw DataError("sample '" + e.id + "': " + ex.what());
        }
    });
    return out;
}

EvalReport evaluate(const Manifest& manifest, const FeatureConfig& features, const SplitSpec& spec,
                    const std::vector<int>& train_sizes, const EvalOptions& opts) {
    FeatureExtractor extractor(features);
    auto samples = extract_all(manifest, extractor, opts.threads);
    const std::string config = features.describe() + ";k=" + std::to_string(opts.k) +
                               ";minmax=" + (opts.minmax ? "on" : "off");
    return evaluate_features(samples, manifest.classes, spec, train_sizes,
                             knn_classifier(opts.k, opts.threads, opts.minmax), config);
}

// ---------------------------------------------------------------------------
// Report

std::string format_report(const EvalReport& report) {
    using textio::format_double;
    auto per_class = [](const EvalPoint& p) {
        return p.train_per_class ? std::to_string(*p.train_per_class) : std::string();
    };
    std::string out = "#config=" + report.config + "\n";
    out += "kind,train_per_class,train_total,test_total,trial,accuracy,mean,std\n";
    for (const auto& p : report.points) {
        const std::string prefix = per_class(p) + "," + std::to_string(p.train_total) + "," +
                                   std::to_string(p.test_total) + ",";
        for (std::size_t t = 0; t < p.trials.size(); ++t) {
            out += "trial," + prefix + std::to_string(t) + "," +
                   format_double(p.trials[t].accuracy) + ",,\n";
        }
        out += "aggregate," + prefix + ",," + format_double(p.mean) + "," + format_double(p.std) + "\n";
    }
    out += "\nkind,train_per_class,trial,true_label";
    for (const auto& c : report.classes) out += ",pred_" + c;
    out += "\n";
    for (const auto& p : report.points) {
        for (std::size_t t = 0; t < p.trials.size(); ++t) {
            for (std::size_t r = 0; r < report.classes.size(); ++r) {
                out += "confusion," + per_class(p) + "," + std::to_string(t) + "," + report.classes[r];
                for (auto n : p.trials[t].confusion[r]) out += "," + std::to_string(n);
                out += "\n";
            }
        }
    }
    return out;
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
    textio::atomic_write(path, format_report(report));
}

}  // namespace surftex
