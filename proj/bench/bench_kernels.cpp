#include "sboa/boa.hpp"
#include "sboa/holiday.hpp"
#include "sboa/pipeline.hpp"
#include "sboa/preprocess.hpp"
#include "sboa/selection.hpp"
#include "sboa/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace sboa;

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

const HourlySeries& prepared() {
    static const HourlySeries s = [] {
        SyntheticOptions o;
        o.days = 420;
        o.holidays = default_holiday_candidates();
        return preprocess(simulate(o).series);
    }();
    return s;
}

struct PanelFixture {
    ExpertPanel panel;
    Eigen::MatrixXd actuals;
};

// Random-walk experts around a smooth daily profile.
const PanelFixture& panel_fixture() {
    static const PanelFixture f = [] {
        const std::size_t days = 160;
        const std::size_t k = 24;
        std::vector<Date> issue(days);
        for (std::size_t d = 0; d < days; ++d) {
            issue[d] = parse_date("2019-01-01") + std::chrono::days{static_cast<int>(d)};
        }
        std::vector<ExpertSpec> specs;
        for (std::size_t j = 0; j < k; ++j) {
            specs.push_back({Family::lasso_hd, static_cast<int>(28 + j), Scale::log});
        }
        PanelFixture out{ExpertPanel(issue, specs), Eigen::MatrixXd(days, kHorizonCount)};
        std::mt19937_64 rng(7);
        std::normal_distribution<double> z;
        for (std::size_t d = 0; d < days; ++d) {
            for (std::size_t h = 0; h < kHorizonCount; ++h) {
                const double truth = 1000.0 + 150.0 * std::sin(static_cast<double>(h) / 3.8) + 20.0 * z(rng);
                out.actuals(d, h) = truth;
                for (std::size_t j = 0; j < k; ++j) {
                    out.panel.set(d, h, j, truth + (5.0 + static_cast<double>(j)) * z(rng));
                }
            }
        }
        return out;
    }();
    return f;
}

void BM_BuildPanel(benchmark::State& state) {
    const auto& p = prepared();
    const auto load = p.channel("load");
    const ExpertInputFactory factory(p, {load.begin(), load.end()}, kDefaultAnchorHour);
    PoolConfig cfg;
    cfg.families = {Family::stl_es, Family::ar_p, Family::lasso_hd};
    cfg.windows = {28, 56};
    cfg.ar_max_order = 168;
    const auto specs = expert_grid(cfg);
    std::vector<Date> days;
    for (int d = 0; d < 4; ++d) {
        days.push_back(parse_date("2018-12-01") + std::chrono::days{d});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_panel(factory, specs, days, cfg, mode(state)));
    }
}

void BM_Aggregate(benchmark::State& state) {
    const auto& f = panel_fixture();
    const auto lambdas = default_lambda_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(aggregate(f.panel, f.actuals, lambdas, BoaOptions{}, 0.01, mode(state)));
    }
}

void BM_ForwardSelect(benchmark::State& state) {
    const auto& f = panel_fixture();
    const std::vector<double> lambdas{0.0, 1.0, 16.0, kInfiniteLambda};
    const SelectionOptions opts{30, 60, 6};
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward_select(f.panel, f.actuals, lambdas, BoaOptions{}, 0.01, opts, mode(state)));
    }
}

void BM_HolidayAdjust(benchmark::State& state) {
    const auto& p = prepared();
    HolidayConfig cfg;
    cfg.candidates = default_holiday_candidates();
    cfg.alpha_count = 12;
    for (auto _ : state) {
        benchmark::DoNotOptimize(adjust(p, cfg, mode(state)));
    }
}

} // namespace

BENCHMARK(BM_BuildPanel)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Aggregate)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardSelect)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HolidayAdjust)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
