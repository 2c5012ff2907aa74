#pragma once

#include "sboa/experts/expert_input.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sboa {

inline constexpr int kArMaxOrder = 24 * 22;

struct ArFit {
    double mean = 0.0;
    int order = 0;
    std::vector<double> phi; // phi[i] multiplies x[t-1-i]
    double sigma2 = 0.0;
    std::vector<double> aic; // aic[p] for every order reached
};

// Yule-Walker estimates for all orders 0..p_max by the Levinson-Durbin
// recursion on the biased autocovariance; the order minimizes
// n log(sigma2_p) + 2p. Stops early (with a warning) when the recursion
// loses positive definiteness.
ArFit fit_ar(std::span<const double> y, int p_max = kArMaxOrder);

// Recursive forecasts of x[n-1+h] for h = 1..h_max.
std::vector<double> ar_forecast_path(const ArFit& fit, std::span<const double> y, int h_max);

// nullopt unless y has at least 2 * p_max observations.
std::optional<DayForecast> forecast_ar(std::span<const double> y, int first_horizon, int p_max = kArMaxOrder);

} // namespace sboa
