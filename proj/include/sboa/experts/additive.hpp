#pragma once

#include "sboa/experts/expert_input.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace sboa {

struct AdditiveOptions {
    int n_basis = 8;
    int weekday_basis = 5;
    int tensor_basis = 4;
    int reduced_basis = 5;
    // Ridge values relative to the mean eigenvalue of the penalized Gram.
    std::vector<double> ridge_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    std::vector<int> short_lags{48, 72, 192, 336, 504, 672, 840, 1008};
    std::vector<int> long_lags{8400, 8568, 8736, 8904, 9072, 9240};
};

/// Ridge regression with penalized columns S and unpenalized columns U,
/// penalty chosen by generalized cross-validation.
struct PenalizedFit {
    Eigen::VectorXd beta_s;
    Eigen::VectorXd beta_u;
    double lambda = 0.0;
    double gcv = 0.0;
    double df = 0.0;

    double predict(const Eigen::VectorXd& s, const Eigen::VectorXd& u) const { return s.dot(beta_s) + u.dot(beta_u); }
};

PenalizedFit fit_penalized(const Eigen::MatrixXd& S, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                           std::span<const double> relative_grid);

// Direct per-target-hour forecasts. Horizon position i is fitted on the
// window rows that share its hour of day.
std::optional<DayForecast> forecast_additive(const ExpertInput& input, const AdditiveOptions& options = {});

} // namespace sboa
