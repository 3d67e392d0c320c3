#include "surftex/classify.hpp"
#include "surftex/error.hpp"
#include "surftex/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace surftex;

namespace {

FeatureVector fv(std::vector<double> v) { return {Method::stddev, std::move(v)}; }

std::vector<LabeledFeature> random_train(std::mt19937_64& rng, int n, int dim) {
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const char* labels[] = {"ice", "snow", "water"};
    std::vector<LabeledFeature> out;
    for (int i = 0; i < n; ++i) {
        FeatureVector v{Method::stddev, {}};
        for (int d = 0; d < dim; ++d) v.values.push_back(u(rng));
        out.push_back({v, labels[rng() % 3], "t" + std::to_string(i)});
    }
    return out;
}

}  // namespace

TEST(L1Distance, Examples) {
    EXPECT_EQ(l1_distance(fv({1, 2, 5}), fv({1, 2, 5})), 0.0);
    EXPECT_EQ(l1_distance(fv({1, 2, 5}), fv({4, 2, 3})), 5.0);
    EXPECT_EQ(l1_distance(fv({4, 2, 3}), fv({1, 2, 5})), 5.0);
}

TEST(L1Distance, RejectsIncomparable) {
    EXPECT_THROW(l1_distance(fv({1, 2}), fv({1, 2, 3})), DataError);
    EXPECT_THROW(l1_distance(fv({1, 2}), FeatureVector{Method::gabor, {1, 2}}), DataError);
}

TEST(L1Distance, MetricProperties) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const int dim = 1 + static_cast<int>(rng() % 64);
        FeatureVector a{Method::gabor, {}}, b{Method::gabor, {}}, c{Method::gabor, {}};
        for (int d = 0; d < dim; ++d) {
            a.values.push_back(n(rng));
            b.values.push_back(n(rng));
            c.values.push_back(n(rng));
        }
        const double ab = l1_distance(a, b), ba = l1_distance(b, a);
        EXPECT_GE(ab, 0.0);
        EXPECT_EQ(ab, ba);
        EXPECT_EQ(l1_distance(a, a), 0.0);
        EXPECT_GT(ab, 0.0);
        EXPECT_GE(l1_distance(a, c) + l1_distance(c, b) - ab, -1e-9);
    }
}

TEST(Knn, ExactMatchWinsAtZeroDistance) {
    KnnModel m({{fv({1, 1}), "A", "a"}, {fv({4, 4}), "B", "b"}}, 1);
    auto p = m.classify(fv({4, 4}));
    EXPECT_EQ(p.label, "B");
    EXPECT_EQ(p.distances, std::vector<double>{0.0});
    EXPECT_EQ(p.neighbor_ids, std::vector<std::string>{"b"});
}

TEST(Knn, HandTwoPointExample) {
    KnnModel m({{fv({0, 0}), "A", "a"}, {fv({10, 10}), "B", "b"}}, 1);
    auto p = m.classify(fv({1, 2}));
    EXPECT_EQ(p.label, "A");
    EXPECT_EQ(p.distances[0], 3.0);
    EXPECT_EQ(l1_distance(fv({1, 2}), fv({10, 10})), 17.0);
}

TEST(Knn, MajorityVote) {
    KnnModel m({{fv({1}), "A", "a"}, {fv({2}), "B", "b1"}, {fv({3}), "B", "b2"}}, 3);
    auto p = m.classify(fv({0}));
    EXPECT_EQ(p.label, "B");
    EXPECT_EQ(p.distances, (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(p.neighbor_ids, (std::vector<std::string>{"a", "b1", "b2"}));
}

TEST(Knn, VoteTieGoesToSmallerSummedDistance) {
    // A at 1 and 4 (sum 5), B at 2 and 2 (sum 4): B wins.
    KnnModel m({{fv({1}), "A", "a1"}, {fv({4}), "A", "a2"}, {fv({-2}), "B", "b1"}, {fv({2}), "B", "b2"}}, 4);
    EXPECT_EQ(m.classify(fv({0})).label, "B");
}

TEST(Knn, FullTieGoesToSmallerClassTag) {
    KnnModel m({{fv({1}), "zeta", "z"}, {fv({-1}), "alpha", "a"}}, 2);
    EXPECT_EQ(m.classify(fv({0})).label, "alpha");
}

TEST(Knn, BoundaryDistanceTieOrderedBySourceId) {
    KnnModel m({{fv({1}), "B", "s2"}, {fv({-1}), "A", "s1"}}, 1);
    auto p = m.classify(fv({0}));
    EXPECT_EQ(p.neighbor_ids[0], "s1");
    EXPECT_EQ(p.label, "A");
}

TEST(Knn, Errors) {
    EXPECT_THROW(KnnModel({}, 1), InvalidArgument);
    EXPECT_THROW(KnnModel({{fv({1}), "A", "a"}}, 2), InvalidArgument);
    EXPECT_THROW(KnnModel({{fv({1}), "A", "a"}}, 0), InvalidArgument);
    EXPECT_THROW(KnnModel({{fv({1}), "A", "a"}, {fv({1, 2}), "A", "b"}}, 1), DataError);
    KnnModel m({{fv({1, 2}), "A", "a"}}, 1);
    EXPECT_THROW(m.classify(fv({1})), DataError);
}

TEST(Knn, LeaveInAccuracyIsPerfect) {
    std::mt19937_64 rng(2);
    auto train = random_train(rng, 150, 12);
    KnnModel m(train, 1);
    for (const auto& t : train) EXPECT_EQ(m.classify(t.feature).label, t.label);
}

TEST(Knn, DuplicateTrainingSampleKeepsK1Label) {
    std::mt19937_64 rng(3);
    auto train = random_train(rng, 60, 6);
    auto queries = random_train(rng, 40, 6);
    KnnModel base(train, 1);
    for (int rep = 0; rep < 5; ++rep) {
        auto dup = train;
        dup.push_back(train[rng() % train.size()]);
        KnnModel m(dup, 1);
        for (const auto& q : queries) EXPECT_EQ(m.classify(q.feature).label, base.classify(q.feature).label);
    }
}

TEST(Knn, PermutationInvariant) {
    std::mt19937_64 rng(4);
    // Coarse integer values force plenty of distance ties.
    std::vector<LabeledFeature> train;
    const char* labels[] = {"A", "B", "C"};
    for (int i = 0; i < 80; ++i) {
        train.push_back({fv({double(rng() % 4), double(rng() % 4)}), labels[rng() % 3], "s" + std::to_string(i)});
    }
    for (int k : {1, 3, 5}) {
        KnnModel a(train, k);
        auto shuffled = train;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        KnnModel b(shuffled, k);
        for (int q = 0; q < 50; ++q) {
            auto query = fv({double(rng() % 5), double(rng() % 5)});
            EXPECT_EQ(a.classify(query), b.classify(query));
        }
    }
}

TEST(Knn, BatchEqualsSingleCalls) {
    std::mt19937_64 rng(5);
    auto train = random_train(rng, 100, 8);
    KnnModel m(train, 3);
    std::vector<FeatureVector> queries;
    for (auto& q : random_train(rng, 10, 8)) queries.push_back(q.feature);
    auto batch = m.classify_batch(queries, 4);
    ASSERT_EQ(batch.size(), 10u);
    for (std::size_t i = 0; i < queries.size(); ++i) EXPECT_EQ(batch[i], m.classify(queries[i]));
    EXPECT_TRUE(m.classify_batch({}).empty());
}

TEST(Knn, BatchReportsQueryIndex) {
    KnnModel m({{fv({1, 2}), "A", "a"}}, 1);
    std::vector<FeatureVector> queries = {fv({0, 0}), fv({0})};
    try {
        m.classify_batch(queries, 2);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("query 1"), std::string::npos);
    }
}

TEST(Knn, MatchesOracleOnRandomQueries) {
    std::mt19937_64 rng(6);
    for (int k : {1, 3, 7}) {
        auto train = random_train(rng, 300, 48);
        KnnModel m(train, k);
        std::vector<FeatureVector> queries;
        for (auto& q : random_train(rng, 200, 48)) queries.push_back(q.feature);
        auto got = m.classify_batch(queries);
        for (std::size_t i = 0; i < queries.size(); ++i) {
            EXPECT_EQ(got[i], oracle::nearest(train, queries[i], k));
        }
    }
}

TEST(Oracle, NearestHandExample) {
    std::vector<LabeledFeature> train = {{fv({0, 0}), "A", "a"}, {fv({10, 10}), "B", "b"}};
    auto p = oracle::nearest(train, fv({1, 2}), 1);
    EXPECT_EQ(p.label, "A");
    EXPECT_EQ(p.distances[0], 3.0);
    EXPECT_EQ(oracle::nearest(train, fv({1, 2}), 2).distances, (std::vector<double>{3.0, 17.0}));
}
