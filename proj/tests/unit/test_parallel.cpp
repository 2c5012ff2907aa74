#include "doctest.h"

#include "sboa/experts/pool.hpp"
#include "sboa/preprocess.hpp"
#include "sboa/synthetic.hpp"

using namespace sboa;

TEST_CASE("panel training is identical serial and parallel") {
    SyntheticOptions o;
    o.days = 70;
    const auto s = preprocess(simulate(o).series);
    const auto load = s.channel("load");
    const ExpertInputFactory factory(s, {load.begin(), load.end()}, kDefaultAnchorHour);
    PoolConfig cfg;
    cfg.families = {Family::stl_es, Family::ar_p, Family::lasso_hd, Family::additive};
    cfg.windows = {28, 56};
    cfg.ar_max_order = 48;
    const auto specs = expert_grid(cfg);
    CHECK(specs.size() == 16);
    std::vector<Date> days;
    for (int d = 0; d < 3; ++d) {
        days.push_back(parse_date("2018-02-28") + std::chrono::days{d});
    }
    const auto a = build_panel(factory, specs, days, cfg, Execution::serial);
    const auto b = build_panel(factory, specs, days, cfg, Execution::parallel);
    CHECK(a == b);
    std::size_t filled = 0;
    for (std::size_t d = 0; d < days.size(); ++d) {
        for (std::size_t k = 0; k < specs.size(); ++k) {
            filled += a.complete(d, k) ? 1 : 0;
        }
    }
    CHECK(filled >= 3 * 12);
}
