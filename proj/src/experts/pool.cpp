#include "sboa/experts/pool.hpp"

#include <cmath>
#include <exception>

#include <spdlog/spdlog.h>

namespace sboa {

std::vector<ExpertSpec> expert_grid(const PoolConfig& config) {
    std::vector<ExpertSpec> out;
    for (auto f : config.families) {
        for (int w : config.windows) {
            for (auto s : config.scales) {
                out.push_back({f, w, s});
            }
        }
    }
    return out;
}

std::optional<DayForecast> forecast_expert(const ExpertSpec& spec, const ExpertInput& input, const PoolConfig& config) {
    std::optional<DayForecast> raw;
    switch (spec.family) {
    case Family::stl_es:
        raw = forecast_stl_es(input.y, input.first_horizon, config.stl);
        break;
    case Family::ar_p:
        raw = forecast_ar(input.y, input.first_horizon, config.ar_max_order);
        break;
    case Family::additive:
        raw = forecast_additive(input, config.additive);
        break;
    case Family::lasso_hd: {
        auto opts = config.lasso_hd;
        opts.response_scale = spec.scale == Scale::log ? config.log_response_scale : 1.0;
        raw = forecast_lasso_hd(input, opts);
        break;
    }
    }
    if (!raw) {
        return std::nullopt;
    }
    for (auto& v : *raw) {
        if (spec.scale == Scale::log) {
            v = std::exp(v);
        }
        if (!std::isfinite(v) || !(v > 0.0)) {
            return std::nullopt;
        }
    }
    return raw;
}

ExpertPanel build_panel(const ExpertInputFactory& factory, std::span<const ExpertSpec> specs,
                        std::span<const Date> issue_days, const PoolConfig& config, Execution execution) {
    const ForecastTask probe{issue_days.empty() ? Date{} : issue_days.front(), factory.anchor_hour()};
    ExpertPanel panel({issue_days.begin(), issue_days.end()}, {specs.begin(), specs.end()}, probe.first_horizon());
    const std::size_t K = specs.size();
    const auto jobs = static_cast<long>(issue_days.size() * K);
    std::vector<std::optional<DayForecast>> results(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::parallel)
    for (long j = 0; j < jobs; ++j) {
        const auto d = static_cast<std::size_t>(j) / K;
        const auto k = static_cast<std::size_t>(j) % K;
        try {
            const auto input = factory.make(issue_days[d], specs[k].window_days, specs[k].scale);
            if (input) {
                results[static_cast<std::size_t>(j)] = forecast_expert(specs[k], *input, config);
            }
        } catch (const std::exception& e) {
            spdlog::warn("expert {} failed for {}: {}", specs[k].name(), format_date(issue_days[d]), e.what());
        }
    }
    std::size_t gaps = 0;
    for (std::size_t j = 0; j < results.size(); ++j) {
        if (results[j]) {
            panel.set_day(j / K, j % K, *results[j]);
        } else {
            ++gaps;
        }
    }
    if (gaps > 0) {
        spdlog::info("expert panel: {} of {} (day, expert) cells are gaps", gaps, results.size());
    }
    return panel;
}

} // namespace sboa
