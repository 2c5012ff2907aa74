#pragma once

#include <array>
#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace sboa {

// Naive local clock time at hour resolution. No time zones, no DST.
using Timestamp = std::chrono::sys_time<std::chrono::hours>;
using Date = std::chrono::sys_days;

inline constexpr int kHoursPerDay = 24;
inline constexpr int kHoursPerWeek = 168;
inline constexpr int kHorizonCount = 24;
inline constexpr int kDefaultAnchorHour = 7;

// Accepts "YYYY-MM-DD HH:MM[:SS]" and "YYYY-MM-DDTHH:MM[:SS]". Minutes and
// seconds must be zero.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

Date parse_date(std::string_view text);
std::string format_date(Date d);

inline Date date_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }
inline Timestamp at_hour(Date d, int hour) { return Timestamp{d} + std::chrono::hours{hour}; }

// 1..24, 00:00 maps to 1.
int hour_of_day(Timestamp t);
// 1..168, Monday 00:00 maps to 1.
int hour_of_week(Timestamp t);
// 1..7, Monday maps to 1.
int day_of_week(Timestamp t);

struct MonthDay {
    unsigned month = 1;
    unsigned day = 1;
    friend bool operator==(const MonthDay&, const MonthDay&) = default;
};

MonthDay month_day_of(Timestamp t);
// Parses "MM-DD".
MonthDay parse_month_day(std::string_view text);
std::string format_month_day(MonthDay md);

/// One day-ahead forecasting task. The last available observation is at
/// `anchor_hour` on the issue day; the 24 targets are 00:00..23:00 of the
/// following day, i.e. horizons 24-anchor_hour .. 47-anchor_hour.
struct ForecastTask {
    Date issue_day;
    int anchor_hour = kDefaultAnchorHour;

    Timestamp anchor() const;
    Date target_day() const { return issue_day + std::chrono::days{1}; }
    int first_horizon() const { return kHoursPerDay - anchor_hour; }
    std::array<int, kHorizonCount> horizons() const;
};

// Throws ConfigError unless the anchor hour is 07 or 08.
void validate_anchor_hour(int anchor_hour);

std::array<Timestamp, kHorizonCount> target_timestamps(const ForecastTask& task);

} // namespace sboa
