#include "sboa/quantile.hpp"

#include "sboa/error.hpp"
#include "sboa/series.hpp"

#include <algorithm>
#include <cmath>

namespace sboa {

namespace {

double interpolate_sorted(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> sorted_finite(std::span<const double> x) {
    std::vector<double> s;
    s.reserve(x.size());
    for (double v : x) {
        if (!is_missing(v)) {
            s.push_back(v);
        }
    }
    if (s.empty()) {
        throw DataError("quantile of an empty sample");
    }
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

double quantile(std::span<const double> x, double p) { return interpolate_sorted(sorted_finite(x), p); }

std::vector<double> quantiles(std::span<const double> x, std::span<const double> probs) {
    const auto s = sorted_finite(x);
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        out.push_back(interpolate_sorted(s, p));
    }
    return out;
}

} // namespace sboa
