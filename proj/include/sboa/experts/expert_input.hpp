#pragma once

#include "sboa/panel.hpp"
#include "sboa/series.hpp"
#include "sboa/time.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sboa {

using DayForecast = std::array<double, kHorizonCount>;

struct WeatherTrack {
    std::string name;
    // Actual values up to the anchor, day-ahead forecast values after it.
    std::vector<double> values;
    // Trailing 24 h mean of `values` (computed over the full history).
    std::vector<double> rm24;
};

/// Everything an expert may see when forecasting one issue day: the target
/// series on the expert's scale, trimmed to its calibration window and
/// ending at the anchor, and weather tracks that extend to the last target.
struct ExpertInput {
    Timestamp start{};
    std::vector<double> y; // y.back() is the anchor observation
    int first_horizon = 17;
    std::vector<WeatherTrack> weather; // each of length y.size() + last_horizon()

    std::size_t n() const { return y.size(); }
    int last_horizon() const { return first_horizon + kHorizonCount - 1; }
    Timestamp time_at(std::size_t i) const { return start + std::chrono::hours{static_cast<long>(i)}; }
    // Index (relative to start) of horizon position i.
    std::size_t target_index(int i) const { return y.size() - 1 + static_cast<std::size_t>(first_horizon + i); }
};

// Hours in a calibration window of `days` days ending at an anchor at
// `anchor_hour`: the partial last day only counts up to the anchor.
std::size_t window_hours(int days, int anchor_hour);

/// Builds expert inputs from a prepared series and the (holiday adjusted)
/// level target. Weather tracks use channels that have both actuals and a
/// "_fc" forecast column.
class ExpertInputFactory {
public:
    ExpertInputFactory(const HourlySeries& prepared, std::vector<double> target_level, int anchor_hour);

    int anchor_hour() const { return anchor_hour_; }
    std::span<const double> target_level() const { return level_; }
    std::span<const std::string> weather_names() const { return weather_names_; }

    // nullopt if the window starts before the data or the targets run past it.
    std::optional<ExpertInput> make(Date issue_day, int window_days, Scale scale) const;

private:
    const HourlySeries* prepared_;
    std::vector<double> level_;
    std::vector<double> log_;
    int anchor_hour_;
    std::vector<std::string> weather_names_;
};

} // namespace sboa
