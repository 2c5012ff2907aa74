#pragma once

#include "oracles/dense.hpp"

#include "sboa/panel.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

namespace fixture {

struct Panel {
    sboa::ExpertPanel panel;
    Eigen::MatrixXd actuals;            // days x 24
    std::vector<oracle::Matrix> values; // [d][h][k], the same numbers for the oracle
    oracle::Matrix truth;               // [d][h]
};

inline std::vector<sboa::Date> issue_days(std::size_t n) {
    std::vector<sboa::Date> out(n);
    for (std::size_t d = 0; d < n; ++d) {
        out[d] = sboa::parse_date("2020-01-01") + std::chrono::days{static_cast<int>(d)};
    }
    return out;
}

inline std::vector<sboa::ExpertSpec> specs(std::size_t k) {
    std::vector<sboa::ExpertSpec> out;
    for (std::size_t j = 0; j < k; ++j) {
        out.push_back({sboa::Family::lasso_hd, static_cast<int>(28 + j), sboa::Scale::level});
    }
    return out;
}

// value(d, h, k) gives expert forecasts, truth(d, h) the actuals.
template <class Truth, class Value>
Panel build(std::size_t days, std::size_t k, Truth&& truth, Value&& value) {
    Panel p{sboa::ExpertPanel(issue_days(days), specs(k)), Eigen::MatrixXd(days, 24),
            std::vector<oracle::Matrix>(days, oracle::zeros(24, k)), oracle::zeros(days, 24)};
    for (std::size_t d = 0; d < days; ++d) {
        for (std::size_t h = 0; h < 24; ++h) {
            const double y = truth(d, h);
            p.actuals(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(h)) = y;
            p.truth[d][h] = y;
            for (std::size_t j = 0; j < k; ++j) {
                const double v = value(d, h, j, y);
                if (!std::isnan(v)) {
                    p.panel.set(d, h, j, v);
                }
                p.values[d][h][j] = v;
            }
        }
    }
    return p;
}

// Smooth daily profile with noise; expert j has its own bias and noise level.
inline Panel random(std::uint64_t seed, std::size_t days, std::size_t k, double gap_rate = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    std::vector<double> bias(k), sd(k);
    for (std::size_t j = 0; j < k; ++j) {
        bias[j] = 10.0 * (u(rng) - 0.5);
        sd[j] = 2.0 + 8.0 * u(rng);
    }
    return build(
        days, k,
        [&](std::size_t d, std::size_t h) {
            return 200.0 + 40.0 * std::sin(static_cast<double>(h) / 3.8) + 5.0 * std::sin(d * 0.1) + 4.0 * z(rng);
        },
        [&](std::size_t, std::size_t, std::size_t j, double y) {
            if (gap_rate > 0.0 && u(rng) < gap_rate) {
                return std::nan("");
            }
            return y + bias[j] + sd[j] * z(rng);
        });
}

} // namespace fixture
