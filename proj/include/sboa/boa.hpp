#pragma once

#include "sboa/execution.hpp"
#include "sboa/panel.hpp"
#include "sboa/smoothing.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace sboa {

enum class EtaVariant { half_range, inverse_range };

std::string_view eta_variant_name(EtaVariant v);
EtaVariant parse_eta_variant(std::string_view s);

struct BoaOptions {
    EtaVariant eta_variant = EtaVariant::half_range;
    double weight_floor = 1e-12;
    // Multiplies the cumulative regret before each update; 0 keeps it all.
    double regret_forget = 0.0;
    bool simplex_repair = true;
    // The update with the actuals of day i is applied before combining day
    // i + feedback_delay.
    int feedback_delay = 1;
};

inline double ad_loss(double x, double y) { return std::abs(y - x); }
inline double ad_subgradient(double x, double y) { return x > y ? 1.0 : (x < y ? -1.0 : 0.0); }

struct Combination {
    Eigen::VectorXd forecast;   // NaN where no expert is available
    Eigen::MatrixXd weights;    // weights actually used, renormalized over available experts
};

// Convex combination per horizon of the available (non-NaN) forecasts.
Combination combine(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& forecasts);

/// Per (horizon, expert) BOA state. All matrices are horizons x experts.
class BoaState {
public:
    BoaState(std::size_t n_experts, std::size_t n_horizons = kHorizonCount);

    std::size_t n_experts() const { return static_cast<std::size_t>(w_.cols()); }
    const Eigen::MatrixXd& weights() const { return w_; }
    const Eigen::MatrixXd& range() const { return E_; }
    const Eigen::MatrixXd& eta() const { return eta_; }
    const Eigen::MatrixXd& regret() const { return R_; }
    const Eigen::MatrixXd& sq_regret() const { return S_; }
    std::size_t updates() const { return updates_; }

    // Gradient-trick update with one day's data. `used` are the weights the
    // combination was formed with; experts with NaN forecasts and horizons
    // with NaN actuals are skipped. Returns max_h |sum_k used r| for the day.
    double update(const Eigen::MatrixXd& forecasts, const Combination& combination, const Eigen::VectorXd& actual,
                  const BoaOptions& options);

private:
    Eigen::MatrixXd w_, E_, eta_, R_, S_;
    std::size_t updates_ = 0;
};

// Mean absolute error over the finite entries; NaN if none.
double day_mae(const Eigen::VectorXd& forecast, const Eigen::VectorXd& actual);

/// Output of one smoothed BOA over a panel.
struct BoaRun {
    Eigen::MatrixXd forecasts; // days x horizons
    std::vector<double> mae;   // per day, NaN without actuals
    double max_identity_residual = 0.0;
    // Filled on request: raw and smoothed weights in force on each day.
    std::vector<Eigen::MatrixXd> raw_weights;
    std::vector<Eigen::MatrixXd> smoothed_weights;
};

// `actuals` is days x horizons (target-day load per issue day), NaN if unknown.
BoaRun run_boa(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, const Smoother& smoother,
               const BoaOptions& options, bool keep_weights = false);

struct AggregationResult {
    std::vector<double> lambdas;
    std::vector<BoaRun> runs;              // one per lambda
    Eigen::MatrixXd forecasts;             // days x horizons, from the selected lambda
    std::vector<std::size_t> selected;     // lambda index used on each day
    Eigen::MatrixXd discounted_mae;        // days x lambdas, as known when day d is combined
    std::vector<double> mae;               // per day of the reported forecast
    double max_identity_residual = 0.0;
};

// Runs one replicate per lambda and reports, on each day, the forecast of
// the replicate with the lowest discounted MAE over the days whose actuals
// are known by then (ties to the lowest index).
AggregationResult aggregate(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, std::span<const double> lambdas,
                            const BoaOptions& options, double rho, Execution execution = Execution::parallel,
                            bool keep_weights = false);

// 0, 2^-4, ..., 2^12, infinity.
std::vector<double> default_lambda_grid();

} // namespace sboa
