#include "sboa/config.hpp"
#include "sboa/error.hpp"
#include "sboa/pipeline.hpp"
#include "sboa/preprocess.hpp"
#include "sboa/synthetic.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <fmt/format.h>
#include <omp.h>
#include <spdlog/spdlog.h>

namespace {

using namespace sboa;
namespace fs = std::filesystem;

struct Flags {
    std::optional<std::string> config_file, input, output_dir, cache_dir, eta_variant, first_issue_day;
    std::optional<int> anchor_hour, feedback_delay, test_days, threads, ar_max_order;
    std::optional<double> rho, weight_floor;
    std::optional<std::size_t> burn_in, validation, max_experts;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> lambda_grid, families, scales, holidays;
    std::vector<int> windows;
    bool no_simplex_repair = false;
    bool preserve_residuals = false;
    std::string log_level = "info";
};

void add_flags(CLI::App& app, Flags& f) {
    app.add_option("-c,--config", f.config_file, "JSON config file; its entries override flags");
    app.add_option("--input", f.input, "raw hourly CSV");
    app.add_option("--output-dir", f.output_dir, "directory for artifacts");
    app.add_option("--cache-dir", f.cache_dir, "expert panel cache directory");
    app.add_option("--anchor-hour", f.anchor_hour, "hour of the last observation on the issue day (7 or 8)");
    app.add_option("--rho", f.rho, "forgetting parameter of the discounted MAE");
    app.add_option("--burn-in", f.burn_in, "burn-in days of the selection window");
    app.add_option("--validation", f.validation, "validation days of the selection window");
    app.add_option("--max-experts", f.max_experts, "largest subset considered by forward selection");
    app.add_option("--eta-variant", f.eta_variant, "half_range | inverse_range");
    app.add_option("--weight-floor", f.weight_floor, "lower bound on BOA weights before renormalizing");
    app.add_option("--feedback-delay", f.feedback_delay, "days until a forecast's actuals feed the update");
    app.add_option("--first-issue-day", f.first_issue_day, "issue day (YYYY-MM-DD) of the first test forecast");
    app.add_option("--test-days", f.test_days, "number of test days (0: to the end of the data)");
    app.add_option("--seed", f.seed, "seed for synthetic data");
    app.add_option("--threads", f.threads, "worker threads (0: OpenMP default)");
    app.add_option("--ar-max-order", f.ar_max_order, "largest autoregressive order");
    app.add_option("--lambda-grid", f.lambda_grid, "smoothing lambdas, 'inf' allowed")->delimiter(',');
    app.add_option("--windows", f.windows, "calibration windows in days")->delimiter(',');
    app.add_option("--families", f.families, "stl_es, ar_p, additive, lasso_hd")->delimiter(',');
    app.add_option("--scales", f.scales, "log, level")->delimiter(',');
    app.add_option("--holidays", f.holidays, "holiday candidates as MM-DD")->delimiter(',');
    app.add_flag("--no-simplex-repair", f.no_simplex_repair, "keep smoothed weights as they are");
    app.add_flag("--preserve-residuals", f.preserve_residuals, "holiday adjustment keeps the observed residuals");
    app.add_option("--log-level", f.log_level, "trace, debug, info, warn, error");
}

double parse_lambda(const std::string& s) {
    if (s == "inf" || s == "Inf") {
        return kInfiniteLambda;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("bad lambda value '{}'", s));
    }
}

PipelineConfig resolve(const Flags& f) {
    PipelineConfig c;
    if (f.input) c.input = *f.input;
    if (f.output_dir) c.output_dir = *f.output_dir;
    if (f.cache_dir) c.cache_dir = *f.cache_dir;
    if (f.anchor_hour) c.anchor_hour = *f.anchor_hour;
    if (f.rho) c.rho = *f.rho;
    if (f.burn_in) c.selection.burn_in = *f.burn_in;
    if (f.validation) c.selection.validation = *f.validation;
    if (f.max_experts) c.selection.max_experts = *f.max_experts;
    if (f.eta_variant) c.boa.eta_variant = parse_eta_variant(*f.eta_variant);
    if (f.weight_floor) c.boa.weight_floor = *f.weight_floor;
    if (f.feedback_delay) c.boa.feedback_delay = *f.feedback_delay;
    if (f.first_issue_day) c.first_issue_day = parse_date(*f.first_issue_day);
    if (f.test_days) c.test_days = *f.test_days;
    if (f.seed) c.seed = *f.seed;
    if (f.threads) c.threads = *f.threads;
    if (f.ar_max_order) c.pool.ar_max_order = *f.ar_max_order;
    if (!f.lambda_grid.empty()) {
        c.lambda_grid.clear();
        for (const auto& s : f.lambda_grid) {
            c.lambda_grid.push_back(parse_lambda(s));
        }
    }
    if (!f.windows.empty()) c.pool.windows = f.windows;
    if (!f.families.empty()) {
        c.pool.families.clear();
        for (const auto& s : f.families) {
            c.pool.families.push_back(parse_family(s));
        }
    }
    if (!f.scales.empty()) {
        c.pool.scales.clear();
        for (const auto& s : f.scales) {
            c.pool.scales.push_back(parse_scale(s));
        }
    }
    if (!f.holidays.empty()) {
        c.holiday.candidates.clear();
        for (const auto& s : f.holidays) {
            c.holiday.candidates.push_back(parse_month_day(s));
        }
    }
    if (f.no_simplex_repair) c.boa.simplex_repair = false;
    if (f.preserve_residuals) c.holiday.preserve_residuals = true;
    if (f.config_file) {
        c = load_config(*f.config_file, c);
    }
    validate(c);
    fs::create_directories(c.output_dir);
    if (c.threads > 0) {
        omp_set_num_threads(c.threads);
    }
    return c;
}

int guarded(const PipelineConfig& c, const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const StageError& e) {
        spdlog::error("{}", e.what());
        write_failure_summary(c, e);
        return 1;
    }
}

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

HourlySeries load_adjusted(const PipelineConfig& c) {
    const auto path = output_path(c, "adjusted.csv");
    if (!fs::exists(path)) {
        throw DataError(fmt::format("'{}' not found; run adjust-holidays first", path));
    }
    auto s = read_series_csv(path);
    if (!s.has(kAdjustedChannel)) {
        throw DataError(fmt::format("'{}' has no {} channel", path, kAdjustedChannel));
    }
    return s;
}

void print_report(const PipelineConfig& c) {
    const auto path = output_path(c, "summary.json");
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("'{}' not found; run aggregate or run-all first", path));
    }
    nlohmann::json s;
    in >> s;
    if (!s.value("complete", false)) {
        std::cout << fmt::format("run incomplete: failed in stage '{}': {}\n", s.value("failed_stage", "?"),
                                 s.value("error", ""));
        return;
    }
    auto val = [](const nlohmann::json& v) { return v.is_number() ? fmt::format("{:.4f}", v.get<double>()) : "n/a"; };
    std::cout << fmt::format("test period  {} .. {} ({} days)\n", s["first_test_issue_day"].get<std::string>(),
                             s["last_test_issue_day"].get<std::string>(), s["test_days"].get<int>());
    std::cout << fmt::format("combined MAE {}\n", val(s["overall_mae"]));
    std::cout << fmt::format("best expert  {} ({})\n", s["best_expert"].get<std::string>(), val(s["best_expert_mae"]));
    if (s["overall_mae"].is_number() && s["best_expert_mae"].is_number()) {
        std::cout << fmt::format("ratio        {:.4f}\n",
                                 s["overall_mae"].get<double>() / s["best_expert_mae"].get<double>());
    }
    std::cout << fmt::format("selected     M={} of {} candidates\n", s["selected_size"].get<int>(),
                             s["candidates"].get<int>());
    for (const auto& e : s["selected_experts"]) {
        std::cout << "  " << e.get<std::string>() << " " << val(s["per_expert_mae"][e.get<std::string>()]) << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smoothed Bernstein online aggregation of day-ahead load forecasts"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags flags;
    add_flags(app, flags);

    auto* pre = app.add_subcommand("preprocess", "clean the raw input and derive weather features");
    auto* hol = app.add_subcommand("adjust-holidays", "fit the holiday model and write the adjusted load");
    auto* train = app.add_subcommand("train-experts", "build the expert panel (cached)");
    bool no_cache = false;
    train->add_flag("--no-cache", no_cache, "ignore and do not write the panel cache");
    auto* agg = app.add_subcommand("aggregate", "forward selection and smoothed BOA over the panel");
    auto* all = app.add_subcommand("run-all", "all stages from the raw input");
    auto* rep = app.add_subcommand("report", "print the run summary");
    auto* sim = app.add_subcommand("simulate", "write a synthetic hourly data set");
    std::size_t sim_days = 730;
    std::string sim_out = "synthetic.csv";
    std::string sim_start = "2018-01-01";
    sim->add_option("--days", sim_days, "length in days");
    sim->add_option("--out", sim_out, "output CSV");
    sim->add_option("--start", sim_start, "first day (YYYY-MM-DD)");
    auto* show = app.add_subcommand("show-config", "print the resolved configuration as JSON");

    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(spdlog::level::from_str(flags.log_level));
    PipelineConfig config;
    try {
        config = resolve(flags);
    } catch (const std::exception& e) {
        spdlog::error("[config] {}", e.what());
        return 2;
    }

    if (*show) {
        std::cout << to_json(config).dump(2) << "\n";
        return 0;
    }
    if (*sim) {
        return guarded(config, [&] {
            stage("simulate", [&] {
                SyntheticOptions o;
                o.start = at_hour(parse_date(sim_start), 0);
                o.days = sim_days;
                o.seed = config.seed;
                o.holidays = config.holiday.candidates;
                write_series_csv(simulate(o).series, sim_out);
                spdlog::info("wrote {} days to {}", sim_days, sim_out);
                return 0;
            });
        });
    }
    if (*pre) {
        return guarded(config, [&] {
            stage("preprocess", [&] {
                const auto p = preprocess(read_series_csv(config.input));
                write_series_csv(p, output_path(config, "prepared.csv"));
                return 0;
            });
        });
    }
    if (*hol) {
        return guarded(config, [&] {
            stage("adjust-holidays", [&] {
                const auto prepared = read_series_csv(output_path(config, "prepared.csv"));
                const auto plan = plan_run(config, prepared);
                write_series_csv(adjust_stage(prepared, config, plan), output_path(config, "adjusted.csv"));
                return 0;
            });
        });
    }
    if (*train) {
        return guarded(config, [&] {
            stage("train-experts", [&] {
                const auto adjusted = load_adjusted(config);
                const auto plan = plan_run(config, adjusted);
                const auto panel = train_stage(adjusted, config, plan, Execution::parallel, !no_cache);
                write_panel_csv(panel, output_path(config, "panel.csv"), output_path(config, "experts.csv"));
                return 0;
            });
        });
    }
    if (*agg) {
        return guarded(config, [&] {
            stage("aggregate", [&] {
                const auto adjusted = load_adjusted(config);
                const auto plan = plan_run(config, adjusted);
                const auto key = panel_cache_key(config, hash_series(adjusted));
                ExpertPanel panel;
                if (!read_panel_cache(panel_cache_path(config, key), key, panel)) {
                    spdlog::info("no matching panel cache; reading panel.csv");
                    panel = read_panel_csv(output_path(config, "panel.csv"), output_path(config, "experts.csv"));
                }
                const auto actuals = target_actuals(adjusted, plan.issue_days, config.anchor_hour);
                const auto out = aggregate_stage(panel, actuals, config, plan);
                write_aggregate_artifacts(out, panel, config, plan);
                spdlog::info("test MAE {:.4f}", out.test_mae);
                return 0;
            });
        });
    }
    if (*all) {
        return guarded(config, [&] {
            const auto out = run_all(config);
            spdlog::info("test MAE {:.4f}", out.test_mae);
        });
    }
    if (*rep) {
        try {
            print_report(config);
        } catch (const std::exception& e) {
            spdlog::error("[report] {}", e.what());
            return 1;
        }
    }
    return 0;
}
