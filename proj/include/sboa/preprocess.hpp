#pragma once

#include "sboa/series.hpp"

#include <string>
#include <vector>

namespace sboa {

// Linear interpolation of interior gaps. Leading or trailing gaps and
// all-missing channels throw DataError.
HourlySeries interpolate_gaps(const HourlySeries& series, const std::string& channel);
std::vector<double> interpolate_gaps(std::span<const double> values);

// Adds <prefix>NS = cos(dir) and <prefix>EW = sin(dir) from a wind direction
// channel in degrees, e.g. "wind_dir_deg" -> "wind_NS", "wind_EW" and
// "wind_dir_deg_fc" -> "wind_NS_fc", "wind_EW_fc".
HourlySeries wind_components(const HourlySeries& series, const std::string& direction_channel = "wind_dir_deg");

// Adds <channel>_rm24: trailing mean over t-23..t, expanding over the
// available prefix for the first 23 hours. Missing values are skipped.
HourlySeries rolling_daily_mean(const HourlySeries& series, const std::string& channel);
std::vector<double> rolling_daily_mean(std::span<const double> values);

/// Weather channels (actuals) present in the raw data, in canonical order.
inline const std::vector<std::string>& raw_weather_channels() {
    static const std::vector<std::string> names{"humidity", "pressure", "cloud_cover", "temperature", "wind_speed",
                                                "wind_dir_deg"};
    return names;
}

/// Weather channels with day-ahead forecasts (no humidity forecasts).
inline const std::vector<std::string>& forecast_weather_channels() {
    static const std::vector<std::string> names{"pressure", "cloud_cover", "temperature", "wind_speed", "wind_NS",
                                                "wind_EW"};
    return names;
}

inline std::string forecast_channel(const std::string& name) { return name + "_fc"; }
inline std::string rolling_channel(const std::string& name) { return name + "_rm24"; }

// Standard cleaning flow: interpolate every channel present among load,
// weather actuals and weather forecasts; add wind components for actuals and
// forecasts; add rolling daily means of all actual weather inputs.
HourlySeries preprocess(const HourlySeries& raw);

// Actual weather channels after preprocess() that enter in-sample models,
// including rolling means.
std::vector<std::string> actual_weather_features(const HourlySeries& prepared);

} // namespace sboa
