#include "sboa/holiday.hpp"

#include "sboa/error.hpp"
#include "sboa/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace sboa {

namespace {

std::vector<double> log_of_load(const HourlySeries& series) {
    if (!series.has("load")) {
        throw DataError("holiday adjustment needs a 'load' channel");
    }
    const auto load = series.channel("load");
    std::vector<double> out(load.size());
    for (std::size_t t = 0; t < load.size(); ++t) {
        if (!(load[t] > 0.0) || !std::isfinite(load[t])) {
            throw DataError(fmt::format("load must be positive and finite, got {} at {}", load[t],
                                        format_timestamp(series.time_at(t))));
        }
        out[t] = std::log(load[t]);
    }
    return out;
}

FeatureBlock concat(ColumnGroup group, const std::vector<FeatureBlock>& parts, Eigen::Index rows) {
    Eigen::Index cols = 0;
    for (const auto& p : parts) {
        cols += p.cols();
    }
    FeatureBlock out{group, {}, Eigen::MatrixXd(rows, cols)};
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.values.middleCols(at, p.cols()) = p.values;
        out.names.insert(out.names.end(), p.names.begin(), p.names.end());
        at += p.cols();
    }
    return out;
}

SegmentModel fit_segment(const HolidayDesign& hd, std::vector<std::size_t> columns, const HolidayConfig& config) {
    SegmentModel m;
    m.columns = std::move(columns);
    const auto mask = hd.design.available_rows(m.columns);
    const auto problem = lasso::Problem::from_design(hd.design, hd.log_load, mask, m.columns);
    m.train_rows = problem.n();
    const double amax = problem.alpha_max();
    std::vector<double> alphas = amax > 0.0 ? lasso::log_grid(amax, config.alpha_ratio, config.alpha_count)
                                            : std::vector<double>{0.0};
    const auto path = problem.fit_path(alphas, config.lasso);
    m.fit = lasso::select_bic(path, problem.n());
    spdlog::debug("holiday segment: {} columns, {} rows, alpha {:.3g}, df {}", m.columns.size(), m.train_rows,
                  m.fit.alpha, m.fit.df);
    return m;
}

// Adds sum_j beta_j x_tj over the selected columns to out[t] for t in [begin, end).
void accumulate(const DesignMatrix& design, const SegmentModel& m, std::span<const std::uint8_t> holiday_flag,
                bool holidays, std::size_t begin, std::size_t end, std::vector<double>& out) {
    const auto X = design.matrix();
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
        const double b = m.fit.coefficients[static_cast<Eigen::Index>(j)];
        const auto c = m.columns[j];
        if (b == 0.0 || (holiday_flag[c] != 0) != holidays) {
            continue;
        }
        for (std::remove_cvref_t<decltype(X)>::InnerIterator it(X, static_cast<Eigen::Index>(c)); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            if (r >= begin && r < end) {
                out[r] += b * it.value();
            }
        }
    }
}

} // namespace

HolidayDesign build_holiday_design(const HourlySeries& series, const HolidayConfig& config) {
    const std::size_t T = series.size();
    if (config.lag_min <= 0 || config.lag_max < config.lag_min) {
        throw ConfigError("holiday lag range must satisfy 0 < lag_min <= lag_max");
    }
    if (T < 2 * static_cast<std::size_t>(config.lag_max) + 1) {
        throw DataError(fmt::format("holiday model needs at least {} hours, series has {}", 2 * config.lag_max + 1, T));
    }
    HolidayDesign hd;
    hd.log_load = log_of_load(series);
    hd.design = DesignMatrix(T);
    const auto rows = static_cast<Eigen::Index>(T);

    std::vector<int> leads, lags;
    for (int k = config.lag_min; k <= config.lag_max; ++k) {
        leads.push_back(k);
        lags.push_back(-k);
    }
    std::size_t col = 0;
    hd.design.append(lag_columns(hd.log_load, leads));
    for (std::size_t i = 0; i < leads.size(); ++i) {
        hd.lead_columns.push_back(col++);
    }
    hd.design.append(lag_columns(hd.log_load, lags));
    for (std::size_t i = 0; i < lags.size(); ++i) {
        hd.lag_columns.push_back(col++);
    }

    const auto weather = actual_weather_features(series);
    if (!weather.empty()) {
        std::vector<FeatureBlock> relu;
        std::vector<NamedChannel> channels;
        for (const auto& w : weather) {
            relu.push_back(quantile_relu(series.channel(w), config.relu_probs, w));
            channels.emplace_back(w, series.channel(w));
        }
        hd.design.append(concat(ColumnGroup::relu_weather, relu, rows));
        hd.design.append(pairwise_interactions(channels));
    }

    const auto stamps = hourly_timestamps(series.start(), T);
    const auto cal = calendar_dummies(stamps);
    hd.design.append(cal.day);
    hd.design.append(cal.cday);
    hd.design.append(cal.week);
    hd.design.append(cal.cweek);
    hd.design.append(periodic_annual_splines(stamps));
    if (!config.candidates.empty()) {
        const auto hol = holiday_dummies(stamps, config.candidates, series.channel("load"));
        if (hol.cols() > 0) {
            hd.design.append(hol);
        }
    }
    hd.holiday_columns = hd.design.columns_of(ColumnGroup::holiday_dummies);
    return hd;
}

HolidayAdjustment adjust(const HourlySeries& series, const HolidayConfig& config, Execution execution) {
    const auto hd = build_holiday_design(series, config);
    const std::size_t T = series.size();
    const auto L = static_cast<std::size_t>(config.lag_max);

    std::vector<std::vector<std::size_t>> column_sets{
        hd.design.columns_except(hd.lag_columns),
        hd.design.columns_except({}),
        hd.design.columns_except(hd.lead_columns),
    };
    std::vector<SegmentModel> models(3);
    LoopErrors errors;
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::parallel)
    for (int s = 0; s < 3; ++s) {
        errors.run(s, [&] {
            models[static_cast<std::size_t>(s)] = fit_segment(hd, column_sets[static_cast<std::size_t>(s)], config);
        });
    }
    errors.rethrow();
    HolidayAdjustment out;
    out.model.head = std::move(models[0]);
    out.model.interior = std::move(models[1]);
    out.model.tail = std::move(models[2]);
    out.model.head.begin = 0;
    out.model.head.end = L;
    out.model.interior.begin = L;
    out.model.interior.end = T - L;
    out.model.tail.begin = T - L;
    out.model.tail.end = T;

    std::vector<std::uint8_t> holiday_flag(hd.design.cols(), 0);
    for (auto c : hd.holiday_columns) {
        holiday_flag[c] = 1;
    }
    out.log_load.assign(T, 0.0);
    for (const SegmentModel* m : {&out.model.head, &out.model.interior, &out.model.tail}) {
        if (config.preserve_residuals) {
            std::vector<double> effect(T, 0.0);
            accumulate(hd.design, *m, holiday_flag, true, m->begin, m->end, effect);
            for (std::size_t t = m->begin; t < m->end; ++t) {
                out.log_load[t] = hd.log_load[t] - effect[t];
            }
        } else {
            for (std::size_t t = m->begin; t < m->end; ++t) {
                out.log_load[t] = m->fit.intercept;
            }
            accumulate(hd.design, *m, holiday_flag, false, m->begin, m->end, out.log_load);
        }
    }
    const auto names = hd.design.names();
    for (std::size_t j = 0; j < out.model.tail.columns.size(); ++j) {
        const auto c = out.model.tail.columns[j];
        if (holiday_flag[c]) {
            out.model.holiday_effects.emplace_back(names[c], out.model.tail.fit.coefficients[static_cast<Eigen::Index>(j)]);
        }
    }
    out.load.resize(T);
    std::transform(out.log_load.begin(), out.log_load.end(), out.load.begin(), [](double v) { return std::exp(v); });
    return out;
}

HolidayAdjustment adjust_rolling(const HourlySeries& series, const HolidayConfig& config, std::size_t fit_end,
                                 Execution execution) {
    const std::size_t T = series.size();
    if (fit_end > T) {
        throw ConfigError("holiday fit range exceeds the series");
    }
    auto out = adjust(series.slice(0, fit_end), config, execution);
    if (fit_end == T) {
        return out;
    }
    const auto log_load = log_of_load(series);
    out.log_load.resize(T);
    for (std::size_t t = fit_end; t < T; ++t) {
        out.log_load[t] = log_load[t];
    }
    if (!config.candidates.empty()) {
        std::map<std::string, double> effect_of(out.model.holiday_effects.begin(), out.model.holiday_effects.end());
        const auto stamps = hourly_timestamps(series.start(), T);
        const auto hol = holiday_dummies(std::span(stamps).subspan(fit_end), config.candidates,
                                         series.channel("load"), fit_end);
        for (Eigen::Index c = 0; c < hol.cols(); ++c) {
            const auto it = effect_of.find(hol.names[static_cast<std::size_t>(c)]);
            if (it == effect_of.end() || it->second == 0.0) {
                continue;
            }
            for (Eigen::Index r = 0; r < hol.values.rows(); ++r) {
                const double v = hol.values(r, c);
                if (v != 0.0) {
                    out.log_load[fit_end + static_cast<std::size_t>(r)] -= it->second * v;
                }
            }
        }
    }
    out.load.resize(T);
    std::transform(out.log_load.begin(), out.log_load.end(), out.load.begin(), [](double v) { return std::exp(v); });
    return out;
}

} // namespace sboa
