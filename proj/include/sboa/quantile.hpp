#pragma once

#include <span>
#include <vector>

namespace sboa {

// Sample quantile by linear interpolation of order statistics:
// h = (n-1) p, q = x_(floor h) + (h - floor h) (x_(floor h + 1) - x_(floor h)).
// Missing values are ignored. Throws DataError on an empty sample.
double quantile(std::span<const double> x, double p);
std::vector<double> quantiles(std::span<const double> x, std::span<const double> probs);

} // namespace sboa
