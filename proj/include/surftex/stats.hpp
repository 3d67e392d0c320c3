#pragma once

#include <span>

namespace surftex {

/// Arithmetic mean, summed in index order. Empty input gives NaN.
double mean_of(std::span<const double> v);

/// Population (divide-by-N) standard deviation, two-pass.
double population_std(std::span<const double> v);

}  // namespace surftex
