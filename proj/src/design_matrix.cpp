#include "sboa/design_matrix.hpp"

#include "sboa/bspline.hpp"
#include "sboa/error.hpp"
#include "sboa/quantile.hpp"
#include "sboa/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace sboa {

std::string_view group_name(ColumnGroup g) {
    switch (g) {
    case ColumnGroup::lags: return "lags";
    case ColumnGroup::relu_weather: return "relu_weather";
    case ColumnGroup::interactions: return "interactions";
    case ColumnGroup::day_dummies: return "day_dummies";
    case ColumnGroup::cday_dummies: return "cday_dummies";
    case ColumnGroup::week_dummies: return "week_dummies";
    case ColumnGroup::cweek_dummies: return "cweek_dummies";
    case ColumnGroup::annual_splines: return "annual_splines";
    case ColumnGroup::holiday_dummies: return "holiday_dummies";
    }
    return "?";
}

DesignMatrix::DesignMatrix(std::size_t rows) : rows_(rows) {}

void DesignMatrix::append(const FeatureBlock& block) {
    if (static_cast<std::size_t>(block.values.rows()) != rows_ && block.values.cols() > 0) {
        throw DataError(fmt::format("feature block '{}' has {} rows, design has {}", group_name(block.group),
                                    block.values.rows(), rows_));
    }
    if (static_cast<Eigen::Index>(block.names.size()) != block.values.cols()) {
        throw DataError("feature block names do not match its column count");
    }
    const std::size_t begin = names_.size();
    for (Eigen::Index c = 0; c < block.values.cols(); ++c) {
        std::vector<int> missing;
        for (Eigen::Index r = 0; r < block.values.rows(); ++r) {
            const double v = block.values(r, c);
            if (std::isnan(v)) {
                missing.push_back(static_cast<int>(r));
            } else if (!std::isfinite(v)) {
                throw DataError(fmt::format("column '{}' has a non-finite value", block.names[static_cast<std::size_t>(c)]));
            } else if (v != 0.0) {
                inner_.push_back(static_cast<int>(r));
                values_.push_back(v);
            }
        }
        outer_.push_back(static_cast<int>(values_.size()));
        missing_.push_back(std::move(missing));
        names_.push_back(block.names[static_cast<std::size_t>(c)]);
    }
    if (!groups_.empty() && groups_.back().group == block.group) {
        groups_.back().end = names_.size();
    } else {
        groups_.push_back({block.group, begin, names_.size()});
    }
}

SparseView DesignMatrix::matrix() const {
    return SparseView(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols()),
                      static_cast<Eigen::Index>(values_.size()), outer_.data(), inner_.data(), values_.data());
}

bool DesignMatrix::has_group(ColumnGroup g) const {
    return std::any_of(groups_.begin(), groups_.end(), [&](const GroupRange& r) { return r.group == g; });
}

std::vector<std::size_t> DesignMatrix::columns_of(ColumnGroup g) const {
    std::vector<std::size_t> out;
    for (const auto& r : groups_) {
        if (r.group == g) {
            for (auto c = r.begin; c < r.end; ++c) {
                out.push_back(c);
            }
        }
    }
    return out;
}

std::vector<std::size_t> DesignMatrix::columns_except(std::span<const std::size_t> excluded) const {
    std::vector<std::uint8_t> drop(cols(), 0);
    for (auto c : excluded) {
        drop.at(c) = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < cols(); ++c) {
        if (!drop[c]) {
            out.push_back(c);
        }
    }
    return out;
}

ColumnGroup DesignMatrix::group_of(std::size_t col) const {
    for (const auto& r : groups_) {
        if (col >= r.begin && col < r.end) {
            return r.group;
        }
    }
    throw DataError(fmt::format("column {} out of range", col));
}

std::vector<std::uint8_t> DesignMatrix::available_rows(std::span<const std::size_t> cols) const {
    std::vector<std::uint8_t> ok(rows_, 1);
    for (auto c : cols) {
        for (int r : missing_.at(c)) {
            ok[static_cast<std::size_t>(r)] = 0;
        }
    }
    return ok;
}

void DesignMatrix::dense_row(std::size_t row, std::span<const std::size_t> cols, std::span<double> out) const {
    const int r = static_cast<int>(row);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto c = cols[j];
        const auto first = inner_.begin() + outer_[c];
        const auto last = inner_.begin() + outer_[c + 1];
        const auto it = std::lower_bound(first, last, r);
        out[j] = (it != last && *it == r) ? values_[static_cast<std::size_t>(it - inner_.begin())] : 0.0;
    }
}

FeatureBlock lag_columns(std::span<const double> y, std::span<const int> lags, const std::string& prefix) {
    const auto n = static_cast<long>(y.size());
    FeatureBlock b{ColumnGroup::lags, {}, Eigen::MatrixXd(n, static_cast<Eigen::Index>(lags.size()))};
    for (std::size_t j = 0; j < lags.size(); ++j) {
        const long k = lags[j];
        b.names.push_back(fmt::format("{}{:+d}", prefix, k));
        for (long t = 0; t < n; ++t) {
            const long s = t + k;
            b.values(t, static_cast<Eigen::Index>(j)) = (s >= 0 && s < n) ? y[static_cast<std::size_t>(s)] : kMissing;
        }
    }
    return b;
}

std::vector<double> relu_thresholds(std::span<const double> x, std::span<const double> probs) {
    return quantiles(x, probs);
}

FeatureBlock quantile_relu_with(std::span<const double> x, std::span<const double> thresholds,
                                std::span<const double> probs, const std::string& name) {
    const auto n = static_cast<Eigen::Index>(x.size());
    FeatureBlock b{ColumnGroup::relu_weather, {}, Eigen::MatrixXd(n, static_cast<Eigen::Index>(thresholds.size()))};
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        b.names.push_back(fmt::format("{}_relu{:02d}", name, static_cast<int>(std::lround(probs[j] * 100.0))));
        for (Eigen::Index t = 0; t < n; ++t) {
            b.values(t, static_cast<Eigen::Index>(j)) = std::max(x[static_cast<std::size_t>(t)] - thresholds[j], 0.0);
        }
    }
    return b;
}

FeatureBlock quantile_relu(std::span<const double> x, std::span<const double> probs, const std::string& name) {
    const auto thr = relu_thresholds(x, probs);
    if (!thr.empty() && quantile(x, 0.0) == quantile(x, 1.0)) {
        spdlog::warn("quantile ReLU of constant input '{}' gives degenerate all-zero columns", name);
    }
    return quantile_relu_with(x, thr, probs, name);
}

FeatureBlock pairwise_interactions(std::span<const NamedChannel> channels) {
    if (channels.empty()) {
        return {ColumnGroup::interactions, {}, {}};
    }
    const auto n = static_cast<Eigen::Index>(channels.front().second.size());
    const std::size_t m = channels.size();
    FeatureBlock b{ColumnGroup::interactions, {}, Eigen::MatrixXd(n, static_cast<Eigen::Index>(m * (m + 1) / 2))};
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j, ++col) {
            b.names.push_back(fmt::format("{}*{}", channels[i].first, channels[j].first));
            const auto& x = channels[i].second;
            const auto& y = channels[j].second;
            for (Eigen::Index t = 0; t < n; ++t) {
                b.values(t, col) = x[static_cast<std::size_t>(t)] * y[static_cast<std::size_t>(t)];
            }
        }
    }
    return b;
}

CalendarDummies calendar_dummies(std::span<const Timestamp> timestamps) {
    const auto n = static_cast<Eigen::Index>(timestamps.size());
    CalendarDummies out{{ColumnGroup::day_dummies, {}, Eigen::MatrixXd::Zero(n, kHoursPerDay)},
                        {ColumnGroup::cday_dummies, {}, Eigen::MatrixXd::Zero(n, kHoursPerDay)},
                        {ColumnGroup::week_dummies, {}, Eigen::MatrixXd::Zero(n, kHoursPerWeek)},
                        {ColumnGroup::cweek_dummies, {}, Eigen::MatrixXd::Zero(n, kHoursPerWeek)}};
    for (int k = 1; k <= kHoursPerDay; ++k) {
        out.day.names.push_back(fmt::format("hod{}", k));
        out.cday.names.push_back(fmt::format("hod_le{}", k));
    }
    for (int k = 1; k <= kHoursPerWeek; ++k) {
        out.week.names.push_back(fmt::format("how{}", k));
        out.cweek.names.push_back(fmt::format("how_le{}", k));
    }
    for (Eigen::Index t = 0; t < n; ++t) {
        const int hod = hour_of_day(timestamps[static_cast<std::size_t>(t)]);
        const int how = hour_of_week(timestamps[static_cast<std::size_t>(t)]);
        out.day.values(t, hod - 1) = 1.0;
        out.cday.values.row(t).tail(kHoursPerDay - hod + 1).setOnes();
        out.week.values(t, how - 1) = 1.0;
        out.cweek.values.row(t).tail(kHoursPerWeek - how + 1).setOnes();
    }
    return out;
}

FeatureBlock periodic_annual_splines(std::span<const Timestamp> timestamps, int n_basis) {
    const PeriodicCubicBasis basis(kAnnualPeriodHours, n_basis);
    const auto n = static_cast<Eigen::Index>(timestamps.size());
    FeatureBlock b{ColumnGroup::annual_splines, {}, Eigen::MatrixXd(n, n_basis)};
    for (int j = 0; j < n_basis; ++j) {
        b.names.push_back(fmt::format("annual{}", j + 1));
    }
    std::vector<double> row(static_cast<std::size_t>(n_basis));
    for (Eigen::Index t = 0; t < n; ++t) {
        const double phase = static_cast<double>(timestamps[static_cast<std::size_t>(t)].time_since_epoch().count());
        basis.evaluate(phase, row);
        for (int j = 0; j < n_basis; ++j) {
            b.values(t, j) = row[static_cast<std::size_t>(j)];
        }
    }
    return b;
}

std::vector<double> holiday_scale(std::span<const double> load, std::span<const std::size_t> rows, double eps_rel,
                                  std::size_t median_end) {
    const double floor = eps_rel * quantile(median_end > 0 ? load.first(median_end) : load, 0.5);
    std::vector<double> out;
    out.reserve(rows.size());
    const std::size_t week = kHoursPerWeek;
    for (auto t : rows) {
        std::size_t begin = t >= week ? t - week : 0;
        std::size_t end = t >= week ? t : std::min(week, load.size());
        const auto window = load.subspan(begin, end - begin);
        const double s = quantile(window, 0.90) - quantile(window, 0.37);
        out.push_back(std::max(s, floor));
    }
    return out;
}

FeatureBlock holiday_dummies(std::span<const Timestamp> timestamps, std::span<const MonthDay> candidates,
                             std::span<const double> load, std::size_t offset) {
    const auto n = static_cast<Eigen::Index>(timestamps.size());
    if (offset + timestamps.size() > load.size()) {
        throw DataError("holiday dummies: load is shorter than the timestamps");
    }
    // rows of each (candidate, hour)
    std::vector<std::array<std::vector<std::size_t>, kHoursPerDay>> hits(candidates.size());
    for (std::size_t t = 0; t < timestamps.size(); ++t) {
        const auto md = month_day_of(timestamps[t]);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (candidates[c] == md) {
                hits[c][static_cast<std::size_t>(hour_of_day(timestamps[t]) - 1)].push_back(t);
            }
        }
    }
    std::vector<std::uint8_t> occurs(candidates.size(), 0);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        occurs[c] = std::any_of(hits[c].begin(), hits[c].end(), [](const auto& h) { return !h.empty(); });
    }
    std::size_t n_cols = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (!occurs[c]) {
            spdlog::log(offset > 0 ? spdlog::level::debug : spdlog::level::warn,
                        "holiday candidate {} does not occur in the sample; column dropped",
                         format_month_day(candidates[c]));
            continue;
        }
        for (const auto& h : hits[c]) {
            n_cols += h.empty() ? 0 : 1;
        }
    }
    FeatureBlock b{ColumnGroup::holiday_dummies, {}, Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n_cols))};
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (!occurs[c]) {
            continue;
        }
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto& rows = hits[c][static_cast<std::size_t>(h)];
            if (rows.empty()) {
                continue;
            }
            b.names.push_back(fmt::format("hol_{}_h{:02d}", format_month_day(candidates[c]), h));
            std::vector<std::size_t> at(rows.size());
            std::transform(rows.begin(), rows.end(), at.begin(), [&](std::size_t r) { return r + offset; });
            const auto scale = holiday_scale(load, at, 1e-6, offset);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                b.values(static_cast<Eigen::Index>(rows[i]), col) = scale[i];
            }
            ++col;
        }
    }
    return b;
}

std::vector<Timestamp> hourly_timestamps(Timestamp start, std::size_t n) {
    std::vector<Timestamp> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = start + std::chrono::hours{static_cast<long>(i)};
    }
    return out;
}

} // namespace sboa
