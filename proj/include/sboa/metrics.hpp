#pragma once

#include "sboa/series.hpp"

#include <map>
#include <vector>

namespace sboa {

struct MaeReport {
    std::vector<Date> days;
    std::vector<double> daily; // MAE over the 24 hours of each day
    double overall = 0.0;      // mean of the daily values
};

// Forecasts keyed by timestamp; every forecast hour needs a finite actual.
// Days are grouped by calendar date of the target hour.
MaeReport evaluate_mae(const std::map<Timestamp, double>& forecasts, const HourlySeries& actuals,
                       const std::string& channel = "load");

} // namespace sboa
