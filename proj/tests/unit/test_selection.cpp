#include "doctest.h"

#include "support/fixtures.hpp"

#include "sboa/boa.hpp"
#include "sboa/selection.hpp"

#include <algorithm>
#include <random>

using namespace sboa;

TEST_CASE("forward selection") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z;
    const std::vector<double> sd{8.0, 1.0, 6.0, 3.0, 9.0};
    const auto p = fixture::build(
        40, 5, [&](std::size_t, std::size_t h) { return 300.0 + 20.0 * std::cos(h / 5.0); },
        [&](std::size_t d, std::size_t, std::size_t k, double y) {
            // expert 4 misses a validation day and cannot be a candidate
            if (k == 4 && d == 25) {
                return std::nan("");
            }
            return y + sd[k] * z(rng);
        });
    const std::vector<double> grid{0.0, 4.0, kInfiniteLambda};
    const SelectionOptions opts{10, 20, 3};
    BoaOptions o;
    const auto sel = forward_select(p.panel, p.actuals, grid, o, 0.01, opts, Execution::serial);
    CHECK(sel.candidates == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(sel.order.size() == 3);
    CHECK(sel.order[0] == 1);
    CHECK(sel.mae_curve.size() == 3);
    const std::vector<std::size_t> first{sel.order[0]};
    CHECK(sel.mae_curve[0] == validation_mae(p.panel, p.actuals, first, grid, o, 0.01, opts));
    const auto best = std::min_element(sel.mae_curve.begin(), sel.mae_curve.end()) - sel.mae_curve.begin();
    CHECK(sel.best_size == static_cast<std::size_t>(best) + 1);
    CHECK(sel.chosen == std::vector<std::size_t>(sel.order.begin(), sel.order.begin() + static_cast<long>(sel.best_size)));

    // validation MAE is the mean daily MAE of the aggregation on the validation days
    const auto sub = p.panel.subset(first, 0, 30);
    const auto agg = aggregate(sub, p.actuals.topRows(30), grid, o, 0.01, Execution::serial);
    double m = 0.0;
    for (std::size_t d = 10; d < 30; ++d) {
        m += agg.mae[d] / 20.0;
    }
    CHECK(sel.mae_curve[0] == doctest::Approx(m).epsilon(1e-12));

    const auto par = forward_select(p.panel, p.actuals, grid, o, 0.01, opts, Execution::parallel);
    CHECK(par.order == sel.order);
    CHECK(par.mae_curve == sel.mae_curve);
}
