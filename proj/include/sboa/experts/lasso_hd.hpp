#pragma once

#include "sboa/experts/expert_input.hpp"
#include "sboa/lasso.hpp"

#include <optional>
#include <vector>

namespace sboa {

// 2^L for L equally spaced from 6 down to -1, 20 values.
std::vector<double> lasso_hd_alpha_grid();

struct LassoHdOptions {
    std::vector<double> alphas = lasso_hd_alpha_grid();
    std::vector<double> relu_probs{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    // The response is multiplied by this before fitting (100 turns log load
    // into log-percent units) and forecasts are divided by it.
    double response_scale = 1.0;
    // The path stops at the first alpha that does not converge or whose
    // active set reaches the row count less two (unless max_active is set);
    // BIC picks among the fits before it.
    lasso::Options lasso{.truncate_on_failure = true};
};

// Lags of the model for horizon h: h..h+39, 24*{21,...,56} and 24*{350,...,371}.
std::vector<int> lasso_hd_lags(int h);

// Direct per-target-hour lasso forecasts, alpha chosen by BIC. Lags longer
// than half the window are dropped.
std::optional<DayForecast> forecast_lasso_hd(const ExpertInput& input, const LassoHdOptions& options = {});

} // namespace sboa
