#include "doctest.h"

#include "sboa/error.hpp"
#include "sboa/holiday.hpp"
#include "sboa/preprocess.hpp"
#include "sboa/synthetic.hpp"

#include <algorithm>
#include <cmath>

using namespace sboa;

namespace {

HourlySeries prepared(std::size_t days, std::vector<MonthDay> holidays = {}) {
    SyntheticOptions o;
    o.days = days;
    o.holidays = std::move(holidays);
    return preprocess(simulate(o).series);
}

} // namespace

TEST_CASE("holiday design layout") {
    const std::vector<MonthDay> candidates{{1, 1}, {1, 6}, {7, 4}};
    HolidayConfig cfg;
    cfg.candidates = candidates;
    const auto s = prepared(50, {{1, 6}});
    const auto hd = build_holiday_design(s, cfg);
    CHECK(hd.lead_columns.size() == 343);
    CHECK(hd.lag_columns.size() == 343);
    CHECK(hd.design.columns_of(ColumnGroup::lags).size() == 686);
    CHECK(hd.design.columns_of(ColumnGroup::week_dummies).size() == 168);
    CHECK(hd.design.columns_of(ColumnGroup::cweek_dummies).size() == 168);
    CHECK(hd.design.columns_of(ColumnGroup::annual_splines).size() == 12);
    // Jan 1 and Jan 6 occur in 50 days from Jan 1, Jul 4 does not.
    CHECK(hd.holiday_columns.size() == 48);
    for (auto g : kAllColumnGroups) {
        CHECK(hd.design.has_group(g));
    }
    CHECK(hd.design.rows() == s.size());
    CHECK(hd.log_load[10] == doctest::Approx(std::log(s.channel("load")[10])));
    // lead +168 at row 0 is log load at hour 168; lag -168 at row 0 is unavailable
    const std::vector<std::size_t> lead{hd.lead_columns.front()};
    CHECK(hd.design.available_rows(lead)[0] == 1);
    const std::vector<std::size_t> lag{hd.lag_columns.front()};
    CHECK(hd.design.available_rows(lag)[0] == 0);
    CHECK(hd.design.available_rows(lag)[168] == 1);

    CHECK_THROWS_AS(build_holiday_design(prepared(40), cfg), DataError);
    HolidayConfig bad;
    bad.lag_min = 0;
    CHECK_THROWS_AS(build_holiday_design(s, bad), ConfigError);
}

TEST_CASE("adjustment segments cover the series and residuals can be preserved") {
    HolidayConfig cfg;
    cfg.alpha_count = 6;
    cfg.alpha_ratio = 1e-2;
    cfg.preserve_residuals = true;
    const auto s = prepared(50);
    const auto out = adjust(s, cfg, Execution::serial);
    const std::size_t T = s.size();
    CHECK(out.model.head.begin == 0);
    CHECK(out.model.head.end == out.model.interior.begin);
    CHECK(out.model.interior.end == out.model.tail.begin);
    CHECK(out.model.tail.end == T);
    CHECK(out.model.holiday_effects.empty());
    // With no holiday columns there is nothing to remove.
    const auto load = s.channel("load");
    REQUIRE(out.load.size() == T);
    for (std::size_t t = 0; t < T; ++t) {
        CHECK(out.log_load[t] == std::log(load[t]));
    }
    // head has no look-back lags, tail no look-ahead lags
    const auto hd = build_holiday_design(s, cfg);
    auto contains = [](const std::vector<std::size_t>& v, std::size_t c) {
        return std::find(v.begin(), v.end(), c) != v.end();
    };
    for (auto c : hd.lag_columns) {
        CHECK_FALSE(contains(out.model.head.columns, c));
        CHECK(contains(out.model.tail.columns, c));
    }
    for (auto c : hd.lead_columns) {
        CHECK_FALSE(contains(out.model.tail.columns, c));
        CHECK(contains(out.model.interior.columns, c));
    }

    const auto parallel = adjust(s, cfg, Execution::parallel);
    CHECK(parallel.log_load == out.log_load);
}
