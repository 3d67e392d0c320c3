#include "surftex/stats.hpp"

#include <cmath>
#include <limits>

namespace surftex {

double mean_of(std::span<const double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
    const double m = mean_of(v);
    double sq = 0.0;
    for (double x : v) {
        const double d = x - m;
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(v.size()));
}

}  // namespace surftex
