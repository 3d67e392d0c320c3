#include "surftex/oracles.hpp"

#include "surftex/error.hpp"

#include <algorithm>
#include <cmath>

namespace surftex::oracle {

namespace {

double read(const GrayImage& img, int x, int y, Padding padding) {
    if (x >= 0 && x < img.width() && y >= 0 && y < img.height()) return img.at(x, y);
    if (padding == Padding::zero) return 0.0;
    x = x < 0 ? 0 : (x >= img.width() ? img.width() - 1 : x);
    y = y < 0 ? 0 : (y >= img.height() ? img.height() - 1 : y);
    return img.at(x, y);
}

}  // namespace

ResponseMap convolve(const GrayImage& img, const Kernel& k, Padding padding) {
    const int h = k.side() / 2;
    ResponseMap out{img.width(), img.height(), {}};
    out.values.reserve(static_cast<std::size_t>(img.width()) * img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double sum = 0.0;
            for (int dy = -h; dy <= h; ++dy) {
                for (int dx = -h; dx <= h; ++dx) {
                    const double tap = k.taps()[static_cast<std::size_t>(dy + h) * k.side() + (dx + h)];
                    sum += tap * read(img, x - dx, y - dy, padding);
                }
            }
            out.values.push_back(sum);
        }
    }
    return out;
}

ResponseMap stddev(const GrayImage& img, int side, Padding padding) {
    const int h = side / 2;
    ResponseMap out{img.width(), img.height(), {}};
    std::vector<double> window;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            window.clear();
            for (int dy = -h; dy <= h; ++dy)
                for (int dx = -h; dx <= h; ++dx) window.push_back(read(img, x + dx, y + dy, padding));
            double mu = 0.0;
            for (double v : window) mu += v;
            mu /= static_cast<double>(window.size());
            double var = 0.0;
            for (double v : window) var += (v - mu) * (v - mu);
            var /= static_cast<double>(window.size());
            out.values.push_back(std::sqrt(var));
        }
    }
    return out;
}

Prediction nearest(const std::vector<LabeledFeature>& train, const FeatureVector& query, int k) {
    if (train.empty() || k < 1 || static_cast<std::size_t>(k) > train.size()) {
        throw InvalidArgument("oracle::nearest: invalid k or empty training set");
    }
    struct Candidate {
        double distance;
        const LabeledFeature* sample;
    };
    std::vector<Candidate> all;
    for (const auto& t : train) {
        if (t.feature.method != query.method || t.feature.values.size() != query.values.size()) {
            throw DataError("oracle::nearest: incomparable vectors");
        }
        double d = 0.0;
        for (std::size_t i = 0; i < query.values.size(); ++i) {
            d += std::fabs(t.feature.values[i] - query.values[i]);
        }
        all.push_back({d, &t});
    }
    std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        if (a.distance < b.distance) return true;
        if (b.distance < a.distance) return false;
        if (a.sample->source < b.sample->source) return true;
        if (b.sample->source < a.sample->source) return false;
        return a.sample->label < b.sample->label;
    });

    Prediction p;
    std::vector<std::string> labels;
    std::vector<int> votes;
    std::vector<double> sums;
    for (int i = 0; i < k; ++i) {
        p.neighbor_ids.push_back(all[i].sample->source);
        p.distances.push_back(all[i].distance);
        const auto& lab = all[i].sample->label;
        std::size_t j = 0;
        while (j < labels.size() && labels[j] != lab) ++j;
        if (j == labels.size()) {
            labels.push_back(lab);
            votes.push_back(0);
            sums.push_back(0.0);
        }
        votes[j] += 1;
        sums[j] += all[i].distance;
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < labels.size(); ++j) {
        bool better = votes[j] > votes[best] ||
                      (votes[j] == votes[best] &&
                       (sums[j] < sums[best] || (sums[j] == sums[best] && labels[j] < labels[best])));
        if (better) best = j;
    }
    p.label = labels[best];
    return p;
}

}  // namespace surftex::oracle
