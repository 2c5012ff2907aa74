#include "sboa/time.hpp"

#include "sboa/error.hpp"

#include <charconv>

#include <fmt/format.h>

namespace sboa {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) {
        throw DataError(fmt::format("truncated timestamp '{}'", whole));
    }
    int value = 0;
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw DataError(fmt::format("malformed timestamp '{}'", whole));
    }
    return value;
}

Date make_date(int y, int m, int d, std::string_view whole) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw DataError(fmt::format("invalid calendar date '{}'", whole));
    }
    return sys_days{ymd};
}

} // namespace

Date parse_date(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
        throw DataError(fmt::format("malformed date '{}'", text));
    }
    return make_date(parse_int(text, 0, 4, text), parse_int(text, 5, 2, text), parse_int(text, 8, 2, text), text);
}

Timestamp parse_timestamp(std::string_view text) {
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == 'Z')) {
        text.remove_suffix(1);
    }
    const Date d = parse_date(text);
    if (text.size() == 10) {
        return Timestamp{d};
    }
    if (text.size() < 16 || (text[10] != ' ' && text[10] != 'T') || text[13] != ':') {
        throw DataError(fmt::format("malformed timestamp '{}'", text));
    }
    const int hour = parse_int(text, 11, 2, text);
    const int minute = parse_int(text, 14, 2, text);
    int second = 0;
    if (text.size() >= 19 && text[16] == ':') {
        second = parse_int(text, 17, 2, text);
    }
    if (hour > 23 || minute != 0 || second != 0) {
        throw DataError(fmt::format("timestamp '{}' is not on a full hour", text));
    }
    return at_hour(d, hour);
}

std::string format_date(Date d) {
    using namespace std::chrono;
    const year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

std::string format_timestamp(Timestamp t) {
    const Date d = date_of(t);
    return fmt::format("{} {:02d}:00", format_date(d), (t - Timestamp{d}).count());
}

int hour_of_day(Timestamp t) {
    return static_cast<int>((t - Timestamp{date_of(t)}).count()) + 1;
}

int day_of_week(Timestamp t) {
    return static_cast<int>(std::chrono::weekday{date_of(t)}.iso_encoding());
}

int hour_of_week(Timestamp t) {
    return (day_of_week(t) - 1) * kHoursPerDay + hour_of_day(t);
}

MonthDay month_day_of(Timestamp t) {
    const std::chrono::year_month_day ymd{date_of(t)};
    return {static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day())};
}

MonthDay parse_month_day(std::string_view text) {
    if (text.size() != 5 || text[2] != '-') {
        throw ConfigError(fmt::format("holiday candidate '{}' is not MM-DD", text));
    }
    MonthDay md{static_cast<unsigned>(parse_int(text, 0, 2, text)), static_cast<unsigned>(parse_int(text, 3, 2, text))};
    const std::chrono::month_day check{std::chrono::month{md.month}, std::chrono::day{md.day}};
    if (!check.ok()) {
        throw ConfigError(fmt::format("holiday candidate '{}' is not a calendar day", text));
    }
    return md;
}

std::string format_month_day(MonthDay md) { return fmt::format("{:02d}-{:02d}", md.month, md.day); }

void validate_anchor_hour(int anchor_hour) {
    if (anchor_hour != 7 && anchor_hour != 8) {
        throw ConfigError(fmt::format("anchor hour must be 07 or 08, got {:02d}", anchor_hour));
    }
}

Timestamp ForecastTask::anchor() const { return at_hour(issue_day, anchor_hour); }

std::array<int, kHorizonCount> ForecastTask::horizons() const {
    std::array<int, kHorizonCount> out{};
    for (int i = 0; i < kHorizonCount; ++i) {
        out[i] = first_horizon() + i;
    }
    return out;
}

std::array<Timestamp, kHorizonCount> target_timestamps(const ForecastTask& task) {
    validate_anchor_hour(task.anchor_hour);
    std::array<Timestamp, kHorizonCount> out{};
    const auto hs = task.horizons();
    for (int i = 0; i < kHorizonCount; ++i) {
        out[i] = task.anchor() + std::chrono::hours{hs[i]};
    }
    return out;
}

} // namespace sboa
