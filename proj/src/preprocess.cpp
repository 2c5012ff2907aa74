#include "sboa/preprocess.hpp"

#include "sboa/error.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace sboa {

std::vector<double> interpolate_gaps(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    const std::size_t n = out.size();
    std::size_t first = 0;
    while (first < n && is_missing(out[first])) {
        ++first;
    }
    if (first == n) {
        throw DataError("channel is entirely missing");
    }
    if (first > 0) {
        throw DataError(fmt::format("leading gap of {} values (indices 0..{})", first, first - 1));
    }
    std::size_t last = n - 1;
    while (is_missing(out[last])) {
        --last;
    }
    if (last + 1 < n) {
        throw DataError(fmt::format("trailing gap of {} values (indices {}..{})", n - 1 - last, last + 1, n - 1));
    }
    std::size_t prev = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (is_missing(out[i])) {
            continue;
        }
        if (i > prev + 1) {
            const double a = out[prev];
            const double b = out[i];
            const double span = static_cast<double>(i - prev);
            for (std::size_t j = prev + 1; j < i; ++j) {
                out[j] = a + (b - a) * static_cast<double>(j - prev) / span;
            }
        }
        prev = i;
    }
    return out;
}

HourlySeries interpolate_gaps(const HourlySeries& series, const std::string& channel) {
    try {
        return series.with_channel(channel, interpolate_gaps(series.channel(channel)));
    } catch (const DataError& e) {
        throw DataError(fmt::format("channel '{}': {}", channel, e.what()));
    }
}

HourlySeries wind_components(const HourlySeries& series, const std::string& direction_channel) {
    const auto dir = series.channel(direction_channel);
    std::vector<double> ns(dir.size()), ew(dir.size());
    for (std::size_t i = 0; i < dir.size(); ++i) {
        const double rad = std::fmod(dir[i], 360.0) * std::numbers::pi / 180.0;
        ns[i] = std::cos(rad);
        ew[i] = std::sin(rad);
    }
    std::string suffix;
    if (direction_channel.size() > 3 && direction_channel.ends_with("_fc")) {
        suffix = "_fc";
    }
    auto out = series.with_channel("wind_NS" + suffix, std::move(ns));
    out.set_channel("wind_EW" + suffix, std::move(ew));
    return out;
}

std::vector<double> rolling_daily_mean(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<double> out(n, kMissing);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t begin = i + 1 >= static_cast<std::size_t>(kHoursPerDay) ? i + 1 - kHoursPerDay : 0;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = begin; j <= i; ++j) {
            if (!is_missing(values[j])) {
                sum += values[j];
                ++count;
            }
        }
        if (count > 0) {
            out[i] = sum / static_cast<double>(count);
        }
    }
    return out;
}

HourlySeries rolling_daily_mean(const HourlySeries& series, const std::string& channel) {
    return series.with_channel(rolling_channel(channel), rolling_daily_mean(series.channel(channel)));
}

HourlySeries preprocess(const HourlySeries& raw) {
    HourlySeries out = raw;
    std::vector<std::string> to_clean{"load"};
    for (const auto& w : raw_weather_channels()) {
        to_clean.push_back(w);
        to_clean.push_back(forecast_channel(w));
    }
    for (const auto& c : to_clean) {
        if (out.has(c)) {
            out = interpolate_gaps(out, c);
        }
    }
    if (out.has("wind_dir_deg")) {
        out = wind_components(out, "wind_dir_deg");
    }
    if (out.has("wind_dir_deg_fc")) {
        out = wind_components(out, "wind_dir_deg_fc");
    }
    for (const auto& w : {"humidity", "pressure", "cloud_cover", "temperature", "wind_speed", "wind_NS", "wind_EW"}) {
        if (out.has(w)) {
            out = rolling_daily_mean(out, w);
        }
    }
    return out;
}

std::vector<std::string> actual_weather_features(const HourlySeries& prepared) {
    std::vector<std::string> out;
    for (const auto& w : {"humidity", "pressure", "cloud_cover", "temperature", "wind_speed", "wind_NS", "wind_EW"}) {
        if (prepared.has(w)) {
            out.emplace_back(w);
        }
    }
    const std::size_t base = out.size();
    for (std::size_t i = 0; i < base; ++i) {
        if (prepared.has(rolling_channel(out[i]))) {
            out.push_back(rolling_channel(out[i]));
        }
    }
    return out;
}

} // namespace sboa
