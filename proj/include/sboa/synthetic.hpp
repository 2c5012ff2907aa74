#pragma once

#include "sboa/series.hpp"

#include <cstdint>
#include <vector>

namespace sboa {

struct SyntheticOptions {
    Timestamp start = parse_timestamp("2018-01-01 00:00");
    std::size_t days = 730;
    double level = 1000.0;
    double daily_amplitude = 0.12;
    double weekend_dip = 0.10;
    double annual_amplitude = 0.10;
    double temperature_effect = 0.006; // log load per degree away from 16C
    double noise_sd = 0.012;           // innovation sd of the AR(1) log noise
    double noise_phi = 0.95;
    std::vector<MonthDay> holidays;
    double holiday_effect = -0.20; // multiplicative change on holiday dates
    bool weather = true;
    double forecast_error_sd = 0.4; // relative to each channel's own noise scale
    std::uint64_t seed = 1;
};

struct SyntheticData {
    HourlySeries series;               // load, weather actuals and *_fc forecasts
    std::vector<double> clean_log_load; // log load without the holiday effect
    std::vector<std::uint8_t> holiday;  // 1 on hours of configured holiday dates
};

SyntheticData simulate(const SyntheticOptions& options);

} // namespace sboa
