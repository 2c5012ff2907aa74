#pragma once

#include "sboa/design_matrix.hpp"
#include "sboa/execution.hpp"
#include "sboa/lasso.hpp"
#include "sboa/series.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sboa {

struct HolidayConfig {
    std::vector<MonthDay> candidates;
    int lag_min = 168;
    int lag_max = 510;
    std::vector<double> relu_probs{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int alpha_count = 40;
    double alpha_ratio = 1e-4;
    // Keep the observed residuals: adjusted = log load - holiday contribution.
    bool preserve_residuals = false;
    lasso::Options lasso;
};

/// Design of the log-load model. Lag column "lag+k" holds log load at t+k,
/// so the positive lags look ahead and the negative ones look back.
struct HolidayDesign {
    DesignMatrix design;
    std::vector<double> log_load;
    std::vector<std::size_t> lead_columns; // +lag_min..+lag_max
    std::vector<std::size_t> lag_columns;  // -lag_min..-lag_max
    std::vector<std::size_t> holiday_columns;
};

// Requires at least 2 * lag_max + 1 hours and a positive "load" channel.
HolidayDesign build_holiday_design(const HourlySeries& series, const HolidayConfig& config);

struct SegmentModel {
    std::vector<std::size_t> columns; // design columns the fit refers to
    lasso::Fit fit;
    std::size_t train_rows = 0;
    std::size_t begin = 0; // rows [begin, end) of the output that use this model
    std::size_t end = 0;
};

struct HolidayModel {
    SegmentModel head;     // no look-back lags
    SegmentModel interior; // all columns
    SegmentModel tail;     // no look-ahead lags
    // Holiday coefficients of the tail model by column name.
    std::vector<std::pair<std::string, double>> holiday_effects;
};

struct HolidayAdjustment {
    std::vector<double> log_load;
    std::vector<double> load;
    HolidayModel model;
};

HolidayAdjustment adjust(const HourlySeries& series, const HolidayConfig& config,
                         Execution execution = Execution::parallel);

// Fits on rows [0, fit_end) and extends causally: after fit_end, the output is
// log load minus the tail model's holiday contribution, which only needs the
// calendar and the previous week of load.
HolidayAdjustment adjust_rolling(const HourlySeries& series, const HolidayConfig& config, std::size_t fit_end,
                                 Execution execution = Execution::parallel);

} // namespace sboa
