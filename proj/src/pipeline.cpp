#include "sboa/pipeline.hpp"

#include "sboa/error.hpp"
#include "sboa/experts/pool.hpp"
#include "sboa/holiday.hpp"
#include "sboa/preprocess.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace sboa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_text(const std::string& path, const std::string& text) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        fs::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path));
    }
    out << text;
    if (!out) {
        throw DataError(fmt::format("failed writing '{}'", path));
    }
}

std::string num(double v) { return std::isnan(v) ? std::string() : fmt::format("{}", v); }

json json_num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

} // namespace

std::string output_path(const PipelineConfig& config, const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
}

std::string panel_cache_path(const PipelineConfig& config, std::uint64_t key) {
    return (fs::path(config.resolved_cache_dir()) / fmt::format("panel_{:016x}.bin", key)).string();
}

RunPlan plan_run(const PipelineConfig& config, const HourlySeries& series) {
    validate(config);
    if (series.size() < 2 * kHoursPerDay) {
        throw DataError("series is shorter than two days");
    }
    const Timestamp last = series.time_at(series.size() - 1);
    Date last_target = date_of(last);
    if (hour_of_day(last) != kHoursPerDay) {
        last_target -= std::chrono::days{1};
    }
    const Date last_issue = last_target - std::chrono::days{1};
    Date first_test = config.first_issue_day.value_or(last_issue - std::chrono::days{std::max(config.test_days, 1) - 1});
    Date last_test = config.test_days > 0 ? first_test + std::chrono::days{config.test_days - 1} : last_issue;
    if (last_test > last_issue) {
        throw DataError(fmt::format("test period ends {} but the data only covers targets up to {}",
                                    format_date(last_test + std::chrono::days{1}), format_date(last_target)));
    }
    const auto lead = static_cast<long>(config.lead_days());
    const Date first_panel = first_test - std::chrono::days{lead};
    RunPlan plan;
    for (Date d = first_panel; d <= last_test; d += std::chrono::days{1}) {
        plan.issue_days.push_back(d);
    }
    plan.first_test = static_cast<std::size_t>(lead);
    const auto anchor = series.index_of(ForecastTask{first_panel, config.anchor_hour}.anchor());
    if (!anchor) {
        throw DataError(fmt::format("first panel day {} is before the data start", format_date(first_panel)));
    }
    plan.holiday_fit_end = *anchor + 1;
    const auto needed = 2 * static_cast<std::size_t>(config.holiday.lag_max) + 1;
    if (plan.holiday_fit_end < needed) {
        throw DataError(fmt::format("holiday model needs {} hours before the first panel anchor, only {} available",
                                    needed, plan.holiday_fit_end));
    }
    return plan;
}

HourlySeries adjust_stage(const HourlySeries& prepared, const PipelineConfig& config, const RunPlan& plan,
                          Execution execution) {
    auto adj = adjust_rolling(prepared, config.holiday, plan.holiday_fit_end, execution);
    std::size_t nonzero = 0;
    for (const auto& [name, b] : adj.model.holiday_effects) {
        nonzero += b != 0.0 ? 1 : 0;
    }
    spdlog::info("holiday model: {} of {} holiday columns active", nonzero, adj.model.holiday_effects.size());
    return prepared.with_channel(kAdjustedChannel, std::move(adj.load));
}

ExpertPanel train_stage(const HourlySeries& adjusted, const PipelineConfig& config, const RunPlan& plan,
                        Execution execution, bool use_cache) {
    const auto key = panel_cache_key(config, hash_series(adjusted));
    const auto path = panel_cache_path(config, key);
    ExpertPanel panel;
    if (use_cache && read_panel_cache(path, key, panel)) {
        spdlog::info("expert panel loaded from cache {}", path);
        return panel;
    }
    const auto level = adjusted.channel(kAdjustedChannel);
    const ExpertInputFactory factory(adjusted, {level.begin(), level.end()}, config.anchor_hour);
    const auto specs = expert_grid(config.pool);
    spdlog::info("training {} experts on {} issue days", specs.size(), plan.issue_days.size());
    panel = build_panel(factory, specs, plan.issue_days, config.pool, execution);
    if (use_cache) {
        fs::create_directories(config.resolved_cache_dir());
        write_panel_cache(panel, key, path);
    }
    return panel;
}

Eigen::MatrixXd target_actuals(const HourlySeries& series, std::span<const Date> issue_days, int anchor_hour) {
    const auto load = series.channel("load");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(issue_days.size()), kHorizonCount);
    for (std::size_t d = 0; d < issue_days.size(); ++d) {
        const auto targets = target_timestamps(ForecastTask{issue_days[d], anchor_hour});
        for (int h = 0; h < kHorizonCount; ++h) {
            const auto idx = series.index_of(targets[static_cast<std::size_t>(h)]);
            out(static_cast<Eigen::Index>(d), h) = idx ? load[*idx] : kNaN;
        }
    }
    return out;
}

AggregateOutput aggregate_stage(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, const PipelineConfig& config,
                                const RunPlan& plan, Execution execution) {
    if (panel.n_days() != plan.issue_days.size()) {
        throw DataError(fmt::format("panel has {} days, plan expects {}", panel.n_days(), plan.issue_days.size()));
    }
    AggregateOutput out;
    out.selection = forward_select(panel, actuals, config.lambda_grid, config.boa, config.rho, config.selection, execution);
    std::string names;
    for (auto k : out.selection.chosen) {
        names += (names.empty() ? "" : ", ") + panel.experts()[k].name();
    }
    spdlog::info("forward selection kept M={} of {} candidates: {}", out.selection.best_size,
                 out.selection.candidates.size(), names);
    out.chosen = panel.subset(out.selection.chosen);
    out.aggregation = aggregate(out.chosen, actuals, config.lambda_grid, config.boa, config.rho, execution, true);

    const std::size_t D = panel.n_days();
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t d = plan.first_test; d < D; ++d) {
        if (!std::isnan(out.aggregation.mae[d])) {
            total += out.aggregation.mae[d];
            ++n;
        }
    }
    out.test_mae = n > 0 ? total / static_cast<double>(n) : kNaN;
    out.expert_test_mae.assign(panel.n_experts(), kNaN);
    for (std::size_t k = 0; k < panel.n_experts(); ++k) {
        double s = 0.0;
        std::size_t m = 0;
        for (std::size_t d = plan.first_test; d < D; ++d) {
            if (!panel.complete(d, k)) {
                continue;
            }
            Eigen::VectorXd f(kHorizonCount);
            for (int h = 0; h < kHorizonCount; ++h) {
                f[h] = panel.at(d, static_cast<std::size_t>(h), k);
            }
            const double v = day_mae(f, actuals.row(static_cast<Eigen::Index>(d)).transpose());
            if (!std::isnan(v)) {
                s += v;
                ++m;
            }
        }
        if (m > 0) {
            out.expert_test_mae[k] = s / static_cast<double>(m);
        }
    }
    return out;
}

void write_aggregate_artifacts(const AggregateOutput& out, const ExpertPanel& panel, const PipelineConfig& config,
                               const RunPlan& plan) {
    const auto& agg = out.aggregation;
    const std::size_t D = panel.n_days();
    const int anchor = config.anchor_hour;

    std::string forecasts = "timestamp,forecast\n";
    for (std::size_t d = plan.first_test; d < D; ++d) {
        const auto ts = target_timestamps(ForecastTask{plan.issue_days[d], anchor});
        for (int h = 0; h < kHorizonCount; ++h) {
            forecasts += fmt::format("{},{}\n", format_timestamp(ts[static_cast<std::size_t>(h)]),
                                     num(agg.forecasts(static_cast<Eigen::Index>(d), h)));
        }
    }
    write_text(output_path(config, "forecasts.csv"), forecasts);

    std::string weights = "issue_day,horizon,expert,w,w_smoothed,lambda\n";
    const auto chosen = out.chosen.experts();
    for (std::size_t d = 0; d < D; ++d) {
        const auto j = agg.selected[d];
        const auto& run = agg.runs[j];
        const std::string day = format_date(plan.issue_days[d]);
        const std::string lam = fmt::format("{}", agg.lambdas[j]);
        for (int h = 0; h < kHorizonCount; ++h) {
            for (std::size_t k = 0; k < chosen.size(); ++k) {
                weights += fmt::format("{},{},{},{},{},{}\n", day, panel.first_horizon() + h, chosen[k].name(),
                                       run.raw_weights[d](h, static_cast<Eigen::Index>(k)),
                                       run.smoothed_weights[d](h, static_cast<Eigen::Index>(k)), lam);
            }
        }
    }
    write_text(output_path(config, "weights.csv"), weights);

    std::string trace = "issue_day,selected_lambda";
    for (double l : agg.lambdas) {
        trace += fmt::format(",dmae_{}", l);
    }
    trace += "\n";
    for (std::size_t d = 0; d < D; ++d) {
        trace += fmt::format("{},{}", format_date(plan.issue_days[d]), agg.lambdas[agg.selected[d]]);
        for (std::size_t j = 0; j < agg.lambdas.size(); ++j) {
            trace += "," + num(agg.discounted_mae(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)));
        }
        trace += "\n";
    }
    write_text(output_path(config, "lambda_trace.csv"), trace);

    std::string daily = "issue_day,target_day,period,mae\n";
    for (std::size_t d = 0; d < D; ++d) {
        const char* period = d < config.selection.burn_in ? "burn_in" : (d < plan.first_test ? "validation" : "test");
        daily += fmt::format("{},{},{},{}\n", format_date(plan.issue_days[d]),
                             format_date(plan.issue_days[d] + std::chrono::days{1}), period, num(agg.mae[d]));
    }
    write_text(output_path(config, "daily_mae.csv"), daily);

    std::string curve = "m,expert,validation_mae\n";
    for (std::size_t m = 0; m < out.selection.order.size(); ++m) {
        curve += fmt::format("{},{},{}\n", m + 1, panel.experts()[out.selection.order[m]].name(),
                             out.selection.mae_curve[m]);
    }
    write_text(output_path(config, "selection_curve.csv"), curve);

    json experts = json::object();
    double best = std::numeric_limits<double>::infinity();
    std::string best_name;
    for (std::size_t k = 0; k < panel.n_experts(); ++k) {
        const auto name = panel.experts()[k].name();
        experts[name] = json_num(out.expert_test_mae[k]);
        if (out.expert_test_mae[k] < best) {
            best = out.expert_test_mae[k];
            best_name = name;
        }
    }
    json selected = json::array();
    for (const auto& e : chosen) {
        selected.push_back(e.name());
    }
    std::size_t gaps = 0;
    for (std::size_t d = 0; d < panel.n_days(); ++d) {
        for (std::size_t k = 0; k < panel.n_experts(); ++k) {
            gaps += panel.complete(d, k) ? 0 : 1;
        }
    }
    json summary = {
        {"complete", true},
        {"overall_mae", json_num(out.test_mae)},
        {"best_expert", best_name},
        {"best_expert_mae", json_num(best)},
        {"per_expert_mae", experts},
        {"selected_experts", selected},
        {"selected_size", out.selection.best_size},
        {"candidates", out.selection.candidates.size()},
        {"first_test_issue_day", format_date(plan.issue_days[plan.first_test])},
        {"last_test_issue_day", format_date(plan.issue_days.back())},
        {"test_days", plan.test_count()},
        {"panel_gaps", gaps},
        {"max_identity_residual", agg.max_identity_residual},
        {"config_hash", fmt::format("{:016x}", fnv1a64(canonical_text(config)))},
    };
    write_text(output_path(config, "summary.json"), summary.dump(2) + "\n");
}

void write_failure_summary(const PipelineConfig& config, const StageError& error) {
    json summary = {{"complete", false}, {"failed_stage", error.stage()}, {"error", error.what()}};
    try {
        write_text(output_path(config, "summary.json"), summary.dump(2) + "\n");
    } catch (const std::exception& e) {
        spdlog::error("could not record the failure: {}", e.what());
    }
}

AggregateOutput run_all(const PipelineConfig& config, Execution execution) {
    in_stage("config", [&] {
        validate(config);
        fs::create_directories(config.output_dir);
        return 0;
    });
    const auto prepared = in_stage("preprocess", [&] {
        auto p = preprocess(read_series_csv(config.input));
        write_series_csv(p, output_path(config, "prepared.csv"));
        return p;
    });
    const auto plan = in_stage("adjust-holidays", [&] { return plan_run(config, prepared); });
    const auto adjusted = in_stage("adjust-holidays", [&] {
        auto a = adjust_stage(prepared, config, plan, execution);
        write_series_csv(a, output_path(config, "adjusted.csv"));
        return a;
    });
    const auto panel = in_stage("train-experts", [&] {
        auto p = train_stage(adjusted, config, plan, execution);
        write_panel_csv(p, output_path(config, "panel.csv"), output_path(config, "experts.csv"));
        return p;
    });
    return in_stage("aggregate", [&] {
        const auto actuals = target_actuals(adjusted, plan.issue_days, config.anchor_hour);
        auto out = aggregate_stage(panel, actuals, config, plan, execution);
        write_aggregate_artifacts(out, panel, config, plan);
        return out;
    });
}

} // namespace sboa
