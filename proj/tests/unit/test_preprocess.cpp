#include "doctest.h"

#include "oracles/quantile.hpp"

#include "sboa/error.hpp"
#include "sboa/preprocess.hpp"
#include "sboa/quantile.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sboa;

namespace {
const double kNaN = std::nan("");
}

TEST_CASE("interpolation fills interior gaps linearly") {
    CHECK(interpolate_gaps(std::vector<double>{1, kNaN, 3}) == std::vector<double>{1, 2, 3});
    CHECK(interpolate_gaps(std::vector<double>{0, kNaN, kNaN, 3}) == std::vector<double>{0, 1, 2, 3});
    CHECK(interpolate_gaps(std::vector<double>{4, 5, 6}) == std::vector<double>{4, 5, 6});
    const auto once = interpolate_gaps(std::vector<double>{1, kNaN, kNaN, 7, kNaN, 2});
    CHECK(interpolate_gaps(once) == once);
}

TEST_CASE("interpolation rejects edge and all-missing gaps") {
    CHECK_THROWS_AS(interpolate_gaps(std::vector<double>{kNaN, 1, 2}), DataError);
    CHECK_THROWS_AS(interpolate_gaps(std::vector<double>{1, 2, kNaN}), DataError);
    CHECK_THROWS_AS(interpolate_gaps(std::vector<double>{kNaN, kNaN}), DataError);
}

TEST_CASE("wind components") {
    HourlySeries s(parse_timestamp("2020-01-01 00:00"), 5);
    s.set_channel("wind_dir_deg", {0, 90, 360, 225, -90});
    const auto w = wind_components(s);
    const auto ns = w.channel("wind_NS");
    const auto ew = w.channel("wind_EW");
    CHECK(ns[0] == doctest::Approx(1.0));
    CHECK(ew[0] == doctest::Approx(0.0));
    CHECK(ns[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ew[1] == doctest::Approx(1.0));
    CHECK(ns[2] == doctest::Approx(1.0));
    CHECK(std::abs(ew[2]) < 1e-12);
    CHECK(ew[4] == doctest::Approx(-1.0));
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(ns[i] * ns[i] + ew[i] * ew[i] - 1.0) < 1e-12);
    }
}

TEST_CASE("rolling daily mean") {
    std::vector<double> ramp(48);
    for (std::size_t i = 0; i < 48; ++i) {
        ramp[i] = static_cast<double>(i + 1);
    }
    const auto rm = rolling_daily_mean(ramp);
    CHECK(rm[23] == doctest::Approx(12.5));
    CHECK(rm[47] == doctest::Approx(36.5));
    CHECK(rm[0] == 1.0);
    CHECK(rm[1] == doctest::Approx(1.5));
    const auto flat = rolling_daily_mean(std::vector<double>(60, 3.25));
    for (double v : flat) {
        CHECK(v == doctest::Approx(3.25).epsilon(1e-14));
    }
}

TEST_CASE("preprocess derives wind and rolling channels") {
    HourlySeries raw(parse_timestamp("2020-01-01 00:00"), 30);
    std::vector<double> load(30, 100.0), temp(30, 5.0), dir(30, 45.0);
    load[4] = kNaN;
    temp[10] = kNaN;
    raw.set_channel("load", load);
    raw.set_channel("temperature", temp);
    raw.set_channel("wind_dir_deg", dir);
    raw.set_channel("temperature_fc", temp);
    raw.set_channel("wind_dir_deg_fc", dir);
    const auto p = preprocess(raw);
    CHECK(p.channel("load")[4] == 100.0);
    CHECK(p.has("wind_NS"));
    CHECK(p.has("wind_EW_fc"));
    CHECK(p.has("temperature_rm24"));
    CHECK(p.channel("temperature_rm24")[29] == doctest::Approx(5.0));
}

TEST_CASE("quantile matches the sort-based estimator") {
    std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(quantile(x, 0.5) == doctest::Approx(5.5));
    CHECK(quantile(x, 0.0) == 1.0);
    CHECK(quantile(x, 1.0) == 10.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> v(17 + rep * 5);
        for (auto& e : v) {
            e = z(rng);
        }
        for (double p : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
            CHECK(quantile(v, p) == doctest::Approx(oracle::quantile(v, p)).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), DataError);
}
