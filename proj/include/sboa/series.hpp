#pragma once

#include "sboa/time.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sboa {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Consecutive hourly observations starting at `start`, stored per named
/// channel. Missing values are NaN. Channel order is insertion order and is
/// the column order used when writing CSV.
class HourlySeries {
public:
    HourlySeries() = default;
    HourlySeries(Timestamp start, std::size_t length) : start_(start), length_(length) {}

    Timestamp start() const { return start_; }
    std::size_t size() const { return length_; }
    Timestamp time_at(std::size_t i) const { return start_ + std::chrono::hours{static_cast<long>(i)}; }
    Timestamp end() const { return time_at(length_); }
    std::optional<std::size_t> index_of(Timestamp t) const;

    bool has(std::string_view name) const;
    std::span<const double> channel(std::string_view name) const;
    std::vector<std::string> channel_names() const;

    // Adds or replaces a channel; the length must match size().
    void set_channel(std::string name, std::vector<double> values);
    HourlySeries with_channel(std::string name, std::vector<double> values) const;

    // Rows [begin, end) as a new series.
    HourlySeries slice(std::size_t begin, std::size_t end) const;

private:
    Timestamp start_{};
    std::size_t length_ = 0;
    std::vector<std::pair<std::string, std::vector<double>>> channels_;
};

// One row per hour: a `timestamp` column (ISO-8601) followed by named
// numeric columns. Empty fields are missing values. Rows must be
// consecutive hours without duplicates.
HourlySeries read_series_csv(const std::string& path);
HourlySeries parse_series_csv(std::string_view text);
void write_series_csv(const HourlySeries& series, const std::string& path);
std::string format_series_csv(const HourlySeries& series);

} // namespace sboa
