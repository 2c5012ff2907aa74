#include "doctest.h"

#include "sboa/error.hpp"
#include "sboa/time.hpp"

using namespace sboa;

TEST_CASE("target timestamps cover the next calendar day") {
    const ForecastTask task{parse_date("2021-01-17"), 7};
    CHECK(format_timestamp(task.anchor()) == "2021-01-17 07:00");
    const auto ts = target_timestamps(task);
    REQUIRE(ts.size() == 24);
    CHECK(format_timestamp(ts.front()) == "2021-01-18 00:00");
    CHECK(format_timestamp(ts.back()) == "2021-01-18 23:00");
    CHECK(task.horizons().front() == 17);
    CHECK(task.horizons().back() == 40);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        CHECK(ts[i] - ts[i - 1] == std::chrono::hours{1});
    }
}

TEST_CASE("anchor at 08:00 shifts horizons by one") {
    const ForecastTask task{parse_date("2021-01-17"), 8};
    CHECK(task.horizons().front() == 16);
    CHECK(format_timestamp(target_timestamps(task).front()) == "2021-01-18 00:00");
}

TEST_CASE("anchors other than 07 and 08 are rejected") {
    CHECK_THROWS_AS(validate_anchor_hour(6), ConfigError);
    CHECK_THROWS_AS(target_timestamps(ForecastTask{parse_date("2021-01-17"), 9}), ConfigError);
    CHECK_NOTHROW(validate_anchor_hour(7));
}

TEST_CASE("hour of day and hour of week") {
    const auto monday = parse_timestamp("2021-01-18 00:00");
    CHECK(hour_of_week(monday) == 1);
    CHECK(hour_of_day(monday) == 1);
    CHECK(day_of_week(monday) == 1);
    CHECK(hour_of_week(parse_timestamp("2021-01-24 23:00")) == 168);
    CHECK(hour_of_day(parse_timestamp("2021-01-24 23:00")) == 24);
    for (int i = 0; i < 400; i += 7) {
        const auto t = monday + std::chrono::hours{i};
        CHECK(hour_of_week(t) == hour_of_week(t + std::chrono::hours{168}));
        CHECK(hour_of_day(t) == hour_of_day(t + std::chrono::hours{24}));
        CHECK(hour_of_week(t) % 24 == hour_of_day(t) % 24);
    }
}

TEST_CASE("timestamp parsing") {
    CHECK(parse_timestamp("2020-06-01T13:00") == parse_timestamp("2020-06-01 13:00:00"));
    CHECK_THROWS_AS(parse_timestamp("2020-06-01 13:30"), DataError);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), DataError);
    CHECK(format_date(parse_date("2020-02-29")) == "2020-02-29");
    const auto md = parse_month_day("12-18");
    CHECK(md.month == 12);
    CHECK(md.day == 18);
    CHECK(format_month_day(md) == "12-18");
    CHECK(month_day_of(parse_timestamp("2020-12-18 05:00")) == md);
}
