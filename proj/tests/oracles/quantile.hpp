#pragma once

// Quantile by sorting and interpolating between order statistics
// (position p (n - 1), zero based).

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double quantile(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double pos = p * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

} // namespace oracle
