#pragma once

#include "sboa/experts/expert_input.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sboa {

struct StlOptions {
    int period = 168;
    int seasonal_span = 11; // points of each cycle-subseries
    int seasonal_degree = 1;
    int trend_span = 253;
    int lowpass_span = 169;
    int inner_iterations = 2;
};

struct StlDecomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
};

// Seasonal-trend decomposition by iterated loess (no robustness iterations).
StlDecomposition stl(std::span<const double> y, const StlOptions& options = {});

// Local polynomial (degree 0 or 1) fit with tricube weights over the `span`
// nearest of the points (1, y[0]), ..., (n, y[n-1]), evaluated at x.
double loess_at(std::span<const double> y, double x, int span, int degree);

struct SesFit {
    double alpha = 0.0;
    double level = 0.0;
    double sse = 0.0;
};

// Simple exponential smoothing with the smoothing constant minimizing the
// one-step-ahead squared error (golden section search on [1e-4, 1]).
SesFit fit_ses(std::span<const double> x);

// Trend extrapolated with the last seasonal cycle's slope, plus the last
// seasonal cycle, plus the smoothed remainder level. nullopt if y covers
// fewer than two periods.
std::optional<DayForecast> forecast_stl_es(std::span<const double> y, int first_horizon,
                                           const StlOptions& options = {});

} // namespace sboa
