// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include "oracles/boa.hpp"
#include "oracles/dense.hpp"
#include "oracles/lasso_kkt.hpp"
#include "support/fixtures.hpp"
#include "support/pipeline.hpp"

#include "sboa/boa.hpp"
#include "sboa/config.hpp"
#include "sboa/experts/ar.hpp"
#include "sboa/holiday.hpp"
#include "sboa/lasso.hpp"
#include "sboa/pipeline.hpp"
#include "sboa/preprocess.hpp"
#include "sboa/smoothing.hpp"
#include "sboa/synthetic.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace sboa;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Largest identity residual seen by any aggregation below.
double g_identity = 0.0;
std::size_t g_identity_runs = 0;

void record_identity(double r) {
    g_identity = std::max(g_identity, r);
    ++g_identity_runs;
}

double max_diff(const Eigen::MatrixXd& a, const oracle::Matrix& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            worst = std::max(worst, std::abs(a(i, j) - b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
        }
    }
    return worst;
}

bool same_bits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t row) {
    for (Eigen::Index h = 0; h < a.cols(); ++h) {
        const auto i = static_cast<Eigen::Index>(row);
        if (std::bit_cast<std::uint64_t>(a(i, h)) != std::bit_cast<std::uint64_t>(b(i, h))) {
            return false;
        }
    }
    return true;
}

// 1. BOA weights agree with the independent transcription.
Outcome oracle_agreement() {
    constexpr double kTol = 1e-10;
    constexpr double kBudget = 10.0;
    const auto grid = default_lambda_grid();
    BoaOptions o;
    o.feedback_delay = PipelineConfig{}.boa.feedback_delay;
    double worst = 0.0, engine_seconds = 0.0;
    for (std::uint64_t seed : {101u, 202u, 303u}) {
        const auto p = fixture::random(seed, 100, 5, 0.02);
        Stopwatch sw;
        const auto agg = aggregate(p.panel, p.actuals, grid, o, 0.01, Execution::parallel, true);
        engine_seconds += sw.seconds();
        record_identity(agg.max_identity_residual);
        std::vector<oracle::Trajectory> refs;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            refs.push_back(oracle::run(p.values, p.truth, grid[j], oracle::Settings{.delay = o.feedback_delay}));
            for (std::size_t d = 0; d < 100; ++d) {
                worst = std::max(worst, max_diff(agg.runs[j].raw_weights[d], refs[j].raw[d]));
                worst = std::max(worst, max_diff(agg.runs[j].smoothed_weights[d], refs[j].smoothed[d]));
            }
        }
        if (oracle::select_lambda(refs, 0.01, o.feedback_delay) != agg.selected) {
            worst = INFINITY;
        }
    }
    return {worst <= kTol && engine_seconds < kBudget,
            fmt::format("max weight difference {:.2e} (tol {:.0e}), engine {:.2f} s (budget {:.0f} s)", worst, kTol,
                        engine_seconds, kBudget)};
}

// 2. Weight concentrates on the expert with the smallest errors.
Outcome concentration() {
    constexpr double kMinWeight = 0.8;
    constexpr double kBudget = 30.0;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    const std::size_t days = 300;
    const auto p = fixture::build(
        days, 10, [&](std::size_t d, std::size_t h) { return 500.0 + 50.0 * std::sin(h / 3.0) + 10.0 * std::sin(d / 9.0); },
        [&](std::size_t, std::size_t, std::size_t k, double y) { return y + (k == 0 ? 1.0 : 2.0) * std::abs(z(rng)); });
    BoaOptions o;
    o.feedback_delay = PipelineConfig{}.boa.feedback_delay;
    Stopwatch sw;
    const auto agg = aggregate(p.panel, p.actuals, default_lambda_grid(), o, 0.01, Execution::parallel, true);
    const double secs = sw.seconds();
    record_identity(agg.max_identity_residual);
    const auto& run = agg.runs[agg.selected[days - 1]];
    const double w = run.smoothed_weights[days - 1].col(0).mean();
    return {w > kMinWeight && secs < kBudget,
            fmt::format("mean weight of the best expert on day {} is {:.4f} (needs > {}), {:.2f} s (budget {:.0f} s)",
                        days, w, kMinWeight, secs, kBudget)};
}

// 3. Two experts biased in opposite directions: the combination beats both.
Outcome combination_gain() {
    constexpr double kRatio = 0.9;
    constexpr int kSeeds = 10, kNeeded = 9;
    int good = 0;
    double worst_ratio = 0.0;
    for (int seed = 1; seed <= kSeeds; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 7919);
        std::normal_distribution<double> z;
        const double level = 1000.0, b = 0.05 * level, sd = 0.01 * level;
        const auto p = fixture::build(
            200, 2,
            [&](std::size_t d, std::size_t h) { return level + 100.0 * std::sin(h / 4.0) + 30.0 * std::sin(d / 11.0); },
            [&](std::size_t, std::size_t, std::size_t k, double y) { return y + (k == 0 ? b : -b) + sd * z(rng); });
        BoaOptions o;
        o.feedback_delay = PipelineConfig{}.boa.feedback_delay;
        const auto agg = aggregate(p.panel, p.actuals, default_lambda_grid(), o, 0.01);
        record_identity(agg.max_identity_residual);
        double combined = 0.0, e0 = 0.0, e1 = 0.0;
        for (std::size_t d = 0; d < 200; ++d) {
            combined += agg.mae[d];
            for (int h = 0; h < 24; ++h) {
                e0 += std::abs(p.values[d][h][0] - p.truth[d][h]) / 24.0;
                e1 += std::abs(p.values[d][h][1] - p.truth[d][h]) / 24.0;
            }
        }
        const double ratio = combined / std::min(e0, e1);
        worst_ratio = std::max(worst_ratio, ratio);
        good += ratio <= kRatio ? 1 : 0;
    }
    return {good >= kNeeded, fmt::format("MAE ratio <= {} in {}/{} seeds (needs {}), worst ratio {:.3f}", kRatio, good,
                                         kSeeds, kNeeded, worst_ratio)};
}

// 4. Smoother invariants.
Outcome smoother_invariants() {
    double sym = 0.0, rows = 0.0;
    for (double l : default_lambda_grid()) {
        const auto s = Smoother::build(l);
        sym = std::max(sym, (s.hat() - s.hat().transpose()).cwiseAbs().maxCoeff());
        rows = std::max(rows, (s.hat().rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
    const double ident = (Smoother::build(0.0).hat() - Eigen::MatrixXd::Identity(24, 24)).cwiseAbs().maxCoeff();
    std::vector<Smoother> smoothers;
    for (double l : default_lambda_grid()) {
        smoothers.push_back(Smoother::build(l));
    }
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u;
    int monotone = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::MatrixXd w(24, 1);
        for (int h = 0; h < 24; ++h) {
            w(h, 0) = u(rng);
        }
        bool ok = true;
        double previous = INFINITY;
        for (const auto& s : smoothers) {
            const double r = roughness(s.hat() * w);
            ok = ok && r <= previous + 1e-12;
            previous = r;
        }
        monotone += ok ? 1 : 0;
    }
    return {sym <= 1e-10 && rows <= 1e-10 && ident <= 1e-8 && monotone == 100,
            fmt::format("asymmetry {:.1e}, |H1 - 1| {:.1e} (tol 1e-10), |H(0) - I| {:.1e} (tol 1e-8), roughness "
                        "monotone for {}/100 vectors",
                        sym, rows, ident, monotone)};
}

// 5. Gradient-trick identity in every aggregation run here.
Outcome identity_residual() {
    constexpr double kTol = 1e-10;
    return {g_identity_runs > 0 && g_identity <= kTol,
            fmt::format("max |sum_k w_k r_k| = {:.2e} over {} aggregations (tol {:.0e})", g_identity, g_identity_runs, kTol)};
}

// 6. Lasso solver against closed forms and optimality conditions.
Outcome lasso_solver() {
    // orthonormal design (Hadamard columns)
    const int n = 32;
    Eigen::MatrixXd x(n, n - 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
            x(i, j - 1) = (__builtin_popcount(static_cast<unsigned>(i & j)) % 2) ? -1.0 : 1.0;
        }
    }
    std::mt19937_64 rng(66);
    std::normal_distribution<double> z;
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = 1.0 + 2.0 * x(i, 3) - x(i, 17) + 0.5 * z(rng);
    }
    const auto as_vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    const auto prob = lasso::Problem::from_dense(x, as_vec(y));
    const Eigen::VectorXd xy = x.transpose() * (y.array() - y.mean()).matrix() / n;
    double closed = 0.0;
    for (const auto& fit : prob.fit_path(lasso::log_grid(prob.alpha_max(), 1e-3, 20))) {
        for (int j = 0; j < n - 1; ++j) {
            closed = std::max(closed, std::abs(fit.coefficients[j] - oracle::soft_threshold(xy[j], fit.alpha)));
        }
    }

    // vanishing penalty versus least squares
    Eigen::MatrixXd xl(300, 8);
    oracle::Matrix xm(300, oracle::Vector(8));
    Eigen::VectorXd yl(300);
    for (int i = 0; i < 300; ++i) {
        for (int j = 0; j < 8; ++j) {
            xl(i, j) = xm[i][j] = z(rng);
        }
        yl[i] = 3.0 + xl(i, 0) - 2.0 * xl(i, 5) + z(rng);
    }
    const auto [b0, b] = oracle::least_squares(xm, as_vec(yl));
    const auto pl = lasso::Problem::from_dense(xl, as_vec(yl));
    const std::vector<double> tiny{pl.alpha_max() * 1e-10};
    const auto fl = pl.fit_path(tiny, lasso::Options{.tol = 1e-12}).front();
    double ls = std::abs(fl.intercept - b0);
    for (int j = 0; j < 8; ++j) {
        ls = std::max(ls, std::abs(fl.coefficients[j] - b[static_cast<std::size_t>(j)]));
    }

    // optimality conditions along paths of sparse high-dimensional problems
    constexpr double kKkt = 1e-5;
    double kkt = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd xh(200, 500);
        for (Eigen::Index j = 0; j < 500; ++j) {
            for (Eigen::Index i = 0; i < 200; ++i) {
                xh(i, j) = z(rng);
            }
        }
        Eigen::VectorXd yh(200);
        for (Eigen::Index i = 0; i < 200; ++i) {
            yh[i] = 2.0 * xh(i, rep) - 1.5 * xh(i, 100 + rep) + xh(i, 300) + 0.5 * xh(i, 499 - rep) + z(rng);
        }
        const auto ph = lasso::Problem::from_dense(xh, as_vec(yh));
        for (const auto& fit : ph.fit_path(lasso::log_grid(ph.alpha_max(), 0.01, 30))) {
            kkt = std::max(kkt, oracle::kkt_violation(xh, yh, fit.coefficients, fit.alpha));
        }
    }
    return {closed <= 1e-8 && ls <= 1e-6 && kkt <= kKkt,
            fmt::format("closed form {:.1e} (tol 1e-8), least squares {:.1e} (tol 1e-6), KKT {:.1e} x alpha on 20 "
                        "problems (tol {:.0e})",
                        closed, ls, kkt, kKkt)};
}

// 7. AR order and coefficients on simulated AR(2).
Outcome ar_recovery() {
    constexpr double kTol = 0.05;
    int order_ok = 0, coef_ok = 0;
    std::string orders;
    for (int seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 31 + 5);
        std::normal_distribution<double> z;
        std::vector<double> y(4000 + 500, 0.0);
        for (std::size_t t = 2; t < y.size(); ++t) {
            y[t] = 0.5 * y[t - 1] + 0.3 * y[t - 2] + z(rng);
        }
        y.erase(y.begin(), y.begin() + 500);
        const auto fit = fit_ar(y);
        orders += (orders.empty() ? "" : ",") + std::to_string(fit.order);
        order_ok += (fit.order >= 2 && fit.order <= 4) ? 1 : 0;
        coef_ok += (fit.order >= 2 && std::abs(fit.phi[0] - 0.5) <= kTol && std::abs(fit.phi[1] - 0.3) <= kTol) ? 1 : 0;
    }
    return {order_ok >= 8 && coef_ok == 10,
            fmt::format("order in 2..4 for {}/10 seeds (needs 8), coefficients within {} for {}/10, orders {}", order_ok,
                        kTol, coef_ok, orders)};
}

// 8. Holiday adjustment removes an injected effect.
Outcome holiday_removal() {
    constexpr double kRemoved = 0.9, kOffRatio = 1.5;
    SyntheticOptions o;
    o.days = 3 * 365;
    const auto& candidates = default_holiday_candidates();
    o.holidays.assign(candidates.begin(), candidates.begin() + 6);
    o.holiday_effect = -0.20;
    HolidayConfig cfg;
    cfg.candidates = candidates;

    const auto with = simulate(o);
    const auto adj = adjust(preprocess(with.series), cfg);
    auto plain_options = o;
    plain_options.holidays.clear();
    const auto without = simulate(plain_options);
    const auto adj0 = adjust(preprocess(without.series), cfg);

    const auto observed = with.series.channel("load");
    double hol_before = 0.0, hol_after = 0.0, off = 0.0, off0 = 0.0;
    std::size_t nh = 0, no = 0;
    for (std::size_t t = 0; t < observed.size(); ++t) {
        const double clean = with.clean_log_load[t];
        if (with.holiday[t]) {
            hol_before += std::log(observed[t]) - clean;
            hol_after += adj.log_load[t] - clean;
            ++nh;
        } else {
            off += std::abs(adj.log_load[t] - clean);
            off0 += std::abs(adj0.log_load[t] - without.clean_log_load[t]);
            ++no;
        }
    }
    const double removed = 1.0 - std::abs(hol_after / nh) / std::abs(hol_before / nh);
    const double ratio = (off / no) / (off0 / no);
    return {removed >= kRemoved && ratio <= kOffRatio,
            fmt::format("{:.1f}% of the log effect removed (needs {:.0f}%), off-date error {:.4f} vs {:.4f} without "
                        "holidays, ratio {:.3f} (max {})",
                        100.0 * removed, 100.0 * kRemoved, off / no, off0 / no, ratio, kOffRatio)};
}

// 9. Forecasts do not depend on data after their anchor.
Outcome no_lookahead() {
    const auto dir = fixture::scratch("lookahead");
    auto cfg = fixture::small_config(dir, 75);
    cfg.pool.families = {Family::stl_es, Family::ar_p, Family::additive, Family::lasso_hd};
    cfg.pool.ar_max_order = 48;
    cfg.test_days = 8;
    const auto base_series = read_series_csv(cfg.input);
    const auto base = run_all(cfg);
    const auto plan = plan_run(cfg, preprocess(base_series));
    if (static_cast<std::size_t>(base.aggregation.forecasts.rows()) != plan.issue_days.size()) {
        return {false, "forecast rows do not match the issue days"};
    }

    // random points after the first test anchor
    const std::size_t anchor =
        *base_series.index_of(ForecastTask{plan.issue_days[plan.first_test], cfg.anchor_hour}.anchor());
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<std::size_t> pick(anchor + 1, base_series.size() - 1);
    std::vector<std::size_t> points;
    for (int i = 0; i < 10; ++i) {
        points.push_back(pick(rng));
    }
    int unchanged = 0, checked_days = 0, changed_after = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const std::size_t t = points[k];
        auto mutated = base_series;
        for (const auto& name : base_series.channel_names()) {
            if (name.ends_with("_fc")) {
                continue;
            }
            auto v = std::vector<double>(mutated.channel(name).begin(), mutated.channel(name).end());
            v[t] = name == "load" ? 1.5 * v[t] : v[t] + 7.0;
            mutated.set_channel(name, std::move(v));
        }
        auto mcfg = cfg;
        mcfg.input = (dir / fmt::format("mutated_{}.csv", k)).string();
        mcfg.output_dir = (dir / fmt::format("out_{}", k)).string();
        write_series_csv(mutated, mcfg.input);
        const auto out = run_all(mcfg);
        bool same = true;
        for (std::size_t d = 0; d < plan.issue_days.size(); ++d) {
            const auto a = *base_series.index_of(ForecastTask{plan.issue_days[d], cfg.anchor_hour}.anchor());
            const bool equal = same_bits(base.aggregation.forecasts, out.aggregation.forecasts, d);
            if (a < t) {
                ++checked_days;
                same = same && equal;
            } else if (!equal) {
                ++changed_after;
            }
        }
        unchanged += same ? 1 : 0;
    }
    return {unchanged == 10, fmt::format("{}/10 mutation points leave all earlier forecasts bitwise unchanged ({} "
                                         "day checks; {} later forecasts did change)",
                                         unchanged, checked_days, changed_after)};
}

// 10. Full default grid on two years of data within the time budget.
Outcome full_run() {
    constexpr double kBudget = 600.0, kRerun = 15.0;
    const auto dir = fixture::scratch("full");
    SyntheticOptions o;
    o.days = 730;
    o.holidays = default_holiday_candidates();
    PipelineConfig cfg;
    cfg.input = (dir / "data.csv").string();
    cfg.output_dir = (dir / "out").string();
    write_series_csv(simulate(o).series, cfg.input);
    Stopwatch sw;
    const auto out = run_all(cfg);
    const double total = sw.seconds();
    record_identity(out.aggregation.max_identity_residual);

    const auto plan = plan_run(cfg, read_series_csv(output_path(cfg, "prepared.csv")));
    const auto adjusted = read_series_csv(output_path(cfg, "adjusted.csv"));
    Stopwatch rerun;
    const auto panel = train_stage(adjusted, cfg, plan);
    const auto again = aggregate_stage(panel, target_actuals(adjusted, plan.issue_days, cfg.anchor_hour), cfg, plan);
    const double rerun_s = rerun.seconds();
    const bool same = (again.aggregation.forecasts.array() == out.aggregation.forecasts.array()).all();
    return {total < kBudget && rerun_s < kRerun && same && std::isfinite(out.test_mae),
            fmt::format("{} experts, {} test days, run {:.1f} s (budget {:.0f} s), cached aggregate rerun {:.1f} s "
                        "(budget {:.0f} s), rerun identical: {}, test MAE {:.2f}",
                        panel.n_experts(), plan.test_count(), total, kBudget, rerun_s, kRerun, same, out.test_mae)};
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    const std::vector<std::pair<int, std::function<Outcome()>>> checks{
        {1, oracle_agreement}, {2, concentration},  {3, combination_gain}, {4, smoother_invariants},
        {6, lasso_solver},     {7, ar_recovery},    {8, holiday_removal},  {9, no_lookahead},
        {10, full_run},        {5, identity_residual},
    };
    std::map<int, std::pair<Outcome, double>> results;
    for (const auto& [id, check] : checks) {
        Stopwatch sw;
        Outcome r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = {false, fmt::format("threw: {}", e.what())};
        }
        results[id] = {r, sw.seconds()};
        std::fprintf(stderr, "criterion %d done in %.1f s\n", id, sw.seconds());
    }
    int failed = 0;
    for (const auto& [id, res] : results) {
        std::printf("[%s] criterion %d: %s\n", res.first.pass ? "PASS" : "FAIL", id, res.first.detail.c_str());
        failed += res.first.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}
