#pragma once

// Brute-force reference implementations. They share no code with the fast
// paths in filters.cpp and classify.cpp and exist only to check them.

#include "surftex/classify.hpp"
#include "surftex/filters.hpp"
#include "surftex/image.hpp"

#include <vector>

namespace surftex::oracle {

/// Quadruple loop. For each output pixel, sum = 0 and then, for dy from
/// -half to half and within it dx from -half to half,
/// sum += k(dx, dy) * read(x - dx, y - dy), where read clamps (replicate) or
/// returns 0 (zero) outside the image.
ResponseMap convolve(const GrayImage& img, const Kernel& k, Padding padding);

/// Copies each window into a buffer (row-major) and computes its mean and
/// population deviation from scratch.
ResponseMap stddev(const GrayImage& img, int side, Padding padding);

/// Computes every L1 distance, fully sorts by (distance, source, label) and
/// tallies votes; ties broken by summed distance then class tag.
Prediction nearest(const std::vector<LabeledFeature>& train, const FeatureVector& query, int k);

}  // namespace surftex::oracle
