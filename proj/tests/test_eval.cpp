#include "surftex/error.hpp"
#include "surftex/eval.hpp"
#include "surftex/prng.hpp"
#include "surftex/synth.hpp"
#include "surftex/textio.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace surftex;

namespace {

std::string manifest_text(int n, const std::vector<std::string>& classes) {
    std::string s = "sample_id,path,label\n";
    for (int i = 0; i < n; ++i) {
        s += "s" + std::to_string(i) + ",img/" + std::to_string(i) + ".pgm," + classes[i % classes.size()] + "\n";
    }
    return s;
}

std::vector<std::string> labels_of(int per_class, const std::vector<std::string>& classes) {
    std::vector<std::string> out;
    for (const auto& c : classes)
        for (int i = 0; i < per_class; ++i) out.push_back(c);
    return out;
}

std::vector<LabeledFeature> features_with_labels(const std::vector<std::string>& labels, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<LabeledFeature> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.push_back({{Method::stddev, {u(rng), u(rng), u(rng), u(rng)}}, labels[i], "x" + std::to_string(i)});
    }
    return out;
}

Classifier passthrough() {
    return [](const std::vector<LabeledFeature>&, const std::vector<LabeledFeature>& test) {
        std::vector<std::string> out;
        for (const auto& t : test) out.push_back(t.label);
        return out;
    };
}

}  // namespace

TEST(SplitMix64, ReferenceSequence) {
    SplitMix64 rng(0);
    EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(rng.next(), 0x06C45D188009454FULL);
}

TEST(SplitMix64, UniformAndGaussianAreSane) {
    SplitMix64 rng(42);
    std::vector<int> counts(5, 0);
    double s = 0.0, sq = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        ++counts[rng.uniform_below(5)];
        double g = rng.gaussian();
        s += g;
        sq += g * g;
    }
    for (int c : counts) EXPECT_NEAR(c, n / 5, 500);
    EXPECT_NEAR(s / n, 0.0, 0.03);
    EXPECT_NEAR(sq / n, 1.0, 0.03);
}

TEST(Manifest, PaperSizedManifest) {
    auto m = parse_manifest(manifest_text(377, {"snow", "ice", "water"}), "/data");
    EXPECT_EQ(m.entries.size(), 377u);
    EXPECT_EQ(m.classes, (std::vector<std::string>{"snow", "ice", "water"}));
    EXPECT_EQ(m.resolve(m.entries[3]), std::filesystem::path("/data/img/3.pgm"));
}

TEST(Manifest, Singleton) {
    auto m = parse_manifest("sample_id,path,label\na,a.pgm,snow\n", ".");
    ASSERT_EQ(m.entries.size(), 1u);
    EXPECT_EQ(m.entries[0].id, "a");
}

TEST(Manifest, DuplicateIdIsListed) {
    try {
        parse_manifest("sample_id,path,label\ndup7,a.pgm,snow\ndup7,b.pgm,ice\n", ".");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate sample_id 'dup7'"), std::string::npos) << e.what();
    }
}

TEST(Manifest, UnknownClassAndMissingFiles) {
    EXPECT_THROW(parse_manifest("#classes=snow|ice\nsample_id,path,label\na,a.pgm,mud\n", "."), DataError);
    test::TempDir dir("man");
    try {
        parse_manifest("sample_id,path,label\na,a.pgm,snow\nb,b.pgm,ice\n", dir.path(), "m.csv", true);
        FAIL();
    } catch (const DataError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("'a'"), std::string::npos);
        EXPECT_NE(msg.find("'b'"), std::string::npos);
    }
    EXPECT_THROW(parse_manifest("id,file,class\n", "."), DataError);
    EXPECT_THROW(load_manifest(dir / "nope.csv"), IoError);
}

TEST(Manifest, CropColumnsApplyOnLoad) {
    test::TempDir dir("man");
    std::vector<double> px(100);
    for (int i = 0; i < 100; ++i) px[i] = i;
    write_pgm(dir / "big.pgm", GrayImage(10, 10, px));
    textio::atomic_write(dir / "m.csv", "sample_id,path,label,x0,y0,side\nc,big.pgm,snow,2,3,4\nf,big.pgm,ice,,,\n");
    auto m = load_manifest(dir / "m.csv");
    ASSERT_TRUE(m.entries[0].crop.has_value());
    EXPECT_FALSE(m.entries[1].crop.has_value());
    auto patch = load_sample(m, m.entries[0]);
    EXPECT_EQ(patch.width(), 4);
    EXPECT_EQ(patch.at(0, 0), 32.0);
    EXPECT_EQ(load_sample(m, m.entries[1]).width(), 10);

    auto again = parse_manifest(format_manifest(m), dir.path());
    EXPECT_EQ(again.entries, m.entries);
}

TEST(Split, StratifiedHalf) {
    std::vector<std::string> classes = {"a", "b"};
    auto labels = labels_of(5, classes);
    SplitSpec spec;
    spec.train_fraction = 0.5;
    spec.seed = 9;
    auto s = split(labels, classes, spec, 0);
    // round(2.5) = 3 per class.
    EXPECT_EQ(s.train.size() + s.test.size(), 10u);
    std::map<std::string, int> per_class;
    for (auto i : s.train) ++per_class[labels[i]];
    EXPECT_EQ(per_class["a"], per_class["b"]);

    spec.train_per_class = 2;
    auto t = split(labels_of(4, classes), classes, spec, 0);
    EXPECT_EQ(t.train.size(), 4u);
    EXPECT_EQ(t.test.size(), 4u);
}

TEST(Split, TenSamplesFiveFive) {
    std::vector<std::string> classes = {"a", "b"};
    auto labels = labels_of(5, classes);
    SplitSpec spec;
    spec.train_fraction = 0.5;
    spec.stratified = false;
    auto s = split(labels, classes, spec, 0);
    EXPECT_EQ(s.train.size(), 5u);
    EXPECT_EQ(s.test.size(), 5u);
}

TEST(Split, DeterministicAndTrialDependent) {
    std::vector<std::string> classes = {"snow", "ice", "water"};
    std::vector<std::string> labels;
    for (int i = 0; i < 377; ++i) labels.push_back(classes[i % 3]);
    SplitSpec spec;
    spec.seed = 1234;
    auto a = split(labels, classes, spec, 3);
    auto b = split(labels, classes, spec, 3);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    std::set<std::vector<std::size_t>> distinct;
    for (int t = 0; t < 10; ++t) distinct.insert(split(labels, classes, spec, t).train);
    EXPECT_EQ(distinct.size(), 10u);
}

TEST(Split, DisjointExhaustiveAndProportional) {
    std::mt19937_64 rng(5);
    std::vector<std::string> classes = {"a", "b", "c"};
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::string> labels;
        const int n = 20 + static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i) labels.push_back(classes[rng() % 3]);
        std::map<std::string, int> total;
        for (const auto& l : labels) ++total[l];
        if (std::any_of(total.begin(), total.end(), [](auto& kv) { return kv.second < 2; }) || total.size() < 3) continue;
        SplitSpec spec;
        spec.seed = rng();
        spec.train_fraction = 0.1 + 0.8 * (rng() % 100) / 100.0;
        auto s = split(labels, classes, spec, static_cast<int>(rng() % 10));
        std::vector<std::size_t> all = s.train;
        all.insert(all.end(), s.test.begin(), s.test.end());
        std::sort(all.begin(), all.end());
        for (int i = 0; i < n; ++i) ASSERT_EQ(all[i], static_cast<std::size_t>(i));
        std::map<std::string, int> tr;
        for (auto i : s.train) ++tr[labels[i]];
        for (const auto& [c, cnt] : total) {
            EXPECT_LE(std::abs(tr[c] - spec.train_fraction * cnt), 1.0);
        }
    }
}

TEST(Split, Errors) {
    std::vector<std::string> classes = {"a", "b"};
    auto labels = labels_of(3, classes);
    SplitSpec spec;
    spec.train_per_class = 3;
    EXPECT_THROW(split(labels, classes, spec, 0), DataError);
    spec.train_per_class.reset();
    EXPECT_THROW(split(labels, classes, spec, 10), InvalidArgument);
    spec.train_fraction = 1.0;
    EXPECT_THROW(split(labels, classes, spec, 0), InvalidArgument);
}

TEST(Evaluate, PerfectClassifierGivesOne) {
    std::mt19937_64 rng(1);
    std::vector<std::string> classes = {"a", "b", "c"};
    auto samples = features_with_labels(labels_of(20, classes), rng);
    SplitSpec spec;
    spec.trials = 5;
    auto r = evaluate_features(samples, classes, spec, {2, 5, 10}, passthrough(), "stub");
    ASSERT_EQ(r.points.size(), 3u);
    for (const auto& p : r.points) {
        EXPECT_EQ(p.mean, 1.0);
        EXPECT_EQ(p.std, 0.0);
        EXPECT_EQ(p.trials.size(), 5u);
    }
    EXPECT_EQ(r.points[1].train_total, 15u);
    EXPECT_EQ(r.points[1].test_total, 45u);
}

TEST(Evaluate, RandomLabelsGiveChanceAccuracy) {
    std::mt19937_64 rng(2);
    std::vector<std::string> classes = {"a", "b", "c"};
    std::vector<std::string> labels;
    for (int i = 0; i < 120; ++i) labels.push_back(classes[rng() % 3]);
    auto samples = features_with_labels(labels, rng);
    SplitSpec spec;
    spec.trials = 30;
    spec.train_fraction = 0.5;
    spec.seed = 77;
    auto r = evaluate_features(samples, classes, spec, {}, knn_classifier(1), "random");
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_NEAR(r.points[0].mean, 1.0 / 3.0, 0.1);
}

TEST(Evaluate, ConfusionMatrixInvariants) {
    std::mt19937_64 rng(3);
    std::vector<std::string> classes = {"a", "b", "c"};
    auto samples = features_with_labels(labels_of(15, classes), rng);
    SplitSpec spec;
    spec.trials = 4;
    auto r = evaluate_features(samples, classes, spec, {3, 7}, knn_classifier(3), "cm");
    for (const auto& p : r.points) {
        for (const auto& t : p.trials) {
            std::size_t trace = 0, total = 0;
            for (std::size_t i = 0; i < 3; ++i) {
                std::size_t row = 0;
                for (auto v : t.confusion[i]) row += v;
                EXPECT_EQ(row, 15u - static_cast<std::size_t>(*p.train_per_class));
                trace += t.confusion[i][i];
                total += row;
            }
            EXPECT_EQ(total, t.total);
            EXPECT_EQ(static_cast<double>(trace) / total, t.accuracy);
            EXPECT_GE(t.accuracy, 0.0);
            EXPECT_LE(t.accuracy, 1.0);
        }
    }
}

TEST(Report, MinimalShape) {
    EvalReport r;
    r.config = "x";
    r.classes = {"a", "b"};
    EvalPoint p;
    p.train_per_class = 1;
    p.train_total = 2;
    p.test_total = 2;
    p.trials.push_back({2, 2, 1.0, {{1, 0}, {0, 1}}});
    p.mean = 1.0;
    r.points.push_back(p);
    auto text = format_report(r);
    auto rows = textio::lines(text);
    EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](auto& l) { return l.rfind("trial,", 0) == 0; }), 1);
    EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](auto& l) { return l.rfind("aggregate,", 0) == 0; }), 1);
    EXPECT_EQ(text,
              "#config=x\n"
              "kind,train_per_class,train_total,test_total,trial,accuracy,mean,std\n"
              "trial,1,2,2,0,1,,\n"
              "aggregate,1,2,2,,,1,0\n"
              "\n"
              "kind,train_per_class,trial,true_label,pred_a,pred_b\n"
              "confusion,1,0,a,1,0\n"
              "confusion,1,0,b,0,1\n");
}

TEST(Report, AggregatesAndDeterminism) {
    // 10 samples per class, 5 train -> 5 test per class; pick classifiers
    // that get exactly 8/10 and 9/10 of the two-class test sets.
    std::vector<std::string> classes = {"a", "b"};
    std::mt19937_64 rng(4);
    auto samples = features_with_labels(labels_of(10, classes), rng);
    int call = 0;
    Classifier scripted = [&call](const std::vector<LabeledFeature>&, const std::vector<LabeledFeature>& test) {
        std::vector<std::string> out;
        const std::size_t wrong = call++ == 0 ? 2 : 1;
        for (std::size_t i = 0; i < test.size(); ++i) {
            out.push_back(i < wrong ? (test[i].label == "a" ? "b" : "a") : test[i].label);
        }
        return out;
    };
    SplitSpec spec;
    spec.trials = 2;
    auto r = evaluate_features(samples, classes, spec, {5}, scripted, "scripted");
    EXPECT_EQ(r.points[0].trials[0].accuracy, 0.8);
    EXPECT_EQ(r.points[0].trials[1].accuracy, 0.9);
    EXPECT_NEAR(r.points[0].mean, 0.85, 1e-12);
    EXPECT_NEAR(r.points[0].std, 0.05, 1e-12);

    test::TempDir dir("rep");
    write_report(dir / "a.csv", r);
    write_report(dir / "b.csv", r);
    EXPECT_EQ(textio::read_file(dir / "a.csv"), textio::read_file(dir / "b.csv"));
    EXPECT_FALSE(std::filesystem::exists(dir / "a.csv.tmp"));
}

TEST(Evaluate, EndToEndDeterministicOnDisk) {
    test::TempDir dir("e2e");
    SynthConfig cfg;
    cfg.recipes = default_recipes();
    cfg.per_class = 12;
    cfg.patch_side = 32;
    cfg.seed = 5;
    auto m = gen_corpus(cfg, dir.path());
    auto loaded = load_manifest(dir / "manifest.csv");
    EXPECT_EQ(loaded.entries, m.entries);
    FeatureConfig fc;
    fc.stddev.grid = 4;
    SplitSpec spec;
    spec.trials = 3;
    spec.seed = 11;
    auto r1 = evaluate(loaded, fc, spec, {2, 6});
    auto r2 = evaluate(loaded, fc, spec, {2, 6}, {1, false, 1});
    EXPECT_EQ(format_report(r1), format_report(r2));
    EXPECT_NE(r1.config.find("method=stddev"), std::string::npos);
    EXPECT_NE(r1.config.find("seed=11"), std::string::npos);
}
