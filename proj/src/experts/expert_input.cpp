#include "sboa/experts/expert_input.hpp"

#include "sboa/error.hpp"
#include "sboa/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sboa {

std::size_t window_hours(int days, int anchor_hour) {
    return static_cast<std::size_t>(days * kHoursPerDay - (kHoursPerDay - anchor_hour - 1));
}

ExpertInputFactory::ExpertInputFactory(const HourlySeries& prepared, std::vector<double> target_level, int anchor_hour)
    : prepared_(&prepared), level_(std::move(target_level)), anchor_hour_(anchor_hour) {
    validate_anchor_hour(anchor_hour);
    if (level_.size() != prepared.size()) {
        throw DataError(fmt::format("target has {} values, series has {}", level_.size(), prepared.size()));
    }
    log_.resize(level_.size());
    for (std::size_t t = 0; t < level_.size(); ++t) {
        if (!(level_[t] > 0.0)) {
            throw DataError(fmt::format("target load must be positive, got {} at {}", level_[t],
                                        format_timestamp(prepared.time_at(t))));
        }
        log_[t] = std::log(level_[t]);
    }
    for (const auto& w : forecast_weather_channels()) {
        if (prepared.has(w) && prepared.has(forecast_channel(w))) {
            weather_names_.push_back(w);
        }
    }
}

std::optional<ExpertInput> ExpertInputFactory::make(Date issue_day, int window_days, Scale scale) const {
    const ForecastTask task{issue_day, anchor_hour_};
    const auto anchor_pos = prepared_->index_of(task.anchor());
    if (!anchor_pos) {
        return std::nullopt;
    }
    const std::size_t a = *anchor_pos;
    const std::size_t w = window_hours(window_days, anchor_hour_);
    const auto last_h = static_cast<std::size_t>(task.first_horizon() + kHorizonCount - 1);
    if (a + 1 < w || a + last_h >= prepared_->size()) {
        return std::nullopt;
    }
    const std::size_t s = a + 1 - w;
    ExpertInput in;
    in.start = prepared_->time_at(s);
    in.first_horizon = task.first_horizon();
    const auto& src = scale == Scale::log ? log_ : level_;
    in.y.assign(src.begin() + static_cast<long>(s), src.begin() + static_cast<long>(a + 1));

    const std::size_t lead = s >= 23 ? 23 : s; // history needed by the first rolling means
    const std::size_t from = s - lead;
    const std::size_t to = a + last_h + 1;
    for (const auto& name : weather_names_) {
        const auto actual = prepared_->channel(name);
        const auto fc = prepared_->channel(forecast_channel(name));
        std::vector<double> joined(to - from);
        for (std::size_t t = from; t < to; ++t) {
            joined[t - from] = t <= a ? actual[t] : fc[t];
        }
        const auto rm = rolling_daily_mean(joined);
        WeatherTrack track;
        track.name = name;
        track.values.assign(joined.begin() + static_cast<long>(lead), joined.end());
        track.rm24.assign(rm.begin() + static_cast<long>(lead), rm.end());
        in.weather.push_back(std::move(track));
    }
    return in;
}

} // namespace sboa
