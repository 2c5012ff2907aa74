#pragma once

#include "sboa/time.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sboa {

enum class ColumnGroup : std::uint8_t {
    lags,
    relu_weather,
    interactions,
    day_dummies,
    cday_dummies,
    week_dummies,
    cweek_dummies,
    annual_splines,
    holiday_dummies,
};

inline constexpr std::array kAllColumnGroups = {
    ColumnGroup::lags,         ColumnGroup::relu_weather,  ColumnGroup::interactions,
    ColumnGroup::day_dummies,  ColumnGroup::cday_dummies,  ColumnGroup::week_dummies,
    ColumnGroup::cweek_dummies, ColumnGroup::annual_splines, ColumnGroup::holiday_dummies,
};

// Stable names; downstream code and output files refer to groups by them.
std::string_view group_name(ColumnGroup g);

inline constexpr double kAnnualPeriodHours = 24.0 * 365.24;

/// Dense columns of one feature group, one row per timestamp. NaN marks an
/// unavailable value (e.g. a lag reaching outside the sample).
struct FeatureBlock {
    ColumnGroup group = ColumnGroup::lags;
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    Eigen::Index cols() const { return values.cols(); }
};

struct GroupRange {
    ColumnGroup group;
    std::size_t begin;
    std::size_t end;
};

using SparseView = Eigen::Map<const Eigen::SparseMatrix<double, Eigen::ColMajor, int>>;

/// Column-grouped sparse design matrix in compressed column storage.
/// Columns are appended group by group; unavailable values are stored as
/// structural zeros and recorded so that fits can exclude those rows.
class DesignMatrix {
public:
    explicit DesignMatrix(std::size_t rows = 0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return names_.size(); }
    std::size_t nonzeros() const { return values_.size(); }

    void append(const FeatureBlock& block);

    SparseView matrix() const;
    std::span<const std::string> names() const { return names_; }
    std::span<const GroupRange> groups() const { return groups_; }
    bool has_group(ColumnGroup g) const;
    std::vector<std::size_t> columns_of(ColumnGroup g) const;
    std::vector<std::size_t> columns_except(std::span<const std::size_t> excluded) const;
    ColumnGroup group_of(std::size_t col) const;

    // Rows where every listed column is available.
    std::vector<std::uint8_t> available_rows(std::span<const std::size_t> cols) const;

    // Dense copy of X[row, cols] (unavailable entries read as 0).
    void dense_row(std::size_t row, std::span<const std::size_t> cols, std::span<double> out) const;

private:
    std::size_t rows_;
    std::vector<std::string> names_;
    std::vector<GroupRange> groups_;
    std::vector<int> outer_{0};
    std::vector<int> inner_;
    std::vector<double> values_;
    // Per column: sorted rows with unavailable values.
    std::vector<std::vector<int>> missing_;
};

// Column for lag k holds y[t + k]; NaN where t + k is outside the sample.
FeatureBlock lag_columns(std::span<const double> y, std::span<const int> lags, const std::string& prefix = "lag");

// Thresholds q_p(x) for the hinge features.
std::vector<double> relu_thresholds(std::span<const double> x, std::span<const double> probs);
// Columns max(x - q_p(x), 0) for each p in probs.
FeatureBlock quantile_relu(std::span<const double> x, std::span<const double> probs, const std::string& name = "x");
// Applies previously fitted thresholds.
FeatureBlock quantile_relu_with(std::span<const double> x, std::span<const double> thresholds,
                                std::span<const double> probs, const std::string& name = "x");

using NamedChannel = std::pair<std::string, std::span<const double>>;

// One column per unordered pair {x, y}, squares included, value x_t * y_t.
FeatureBlock pairwise_interactions(std::span<const NamedChannel> channels);

struct CalendarDummies {
    FeatureBlock day;   // 24 columns: HoD == k
    FeatureBlock cday;  // 24 columns: HoD <= k
    FeatureBlock week;  // 168 columns: HoW == k
    FeatureBlock cweek; // 168 columns: HoW <= k
};
CalendarDummies calendar_dummies(std::span<const Timestamp> timestamps);

// Periodic cubic B-splines with annual period on an equidistant grid,
// phase measured in hours since 1970-01-01 00:00.
FeatureBlock periodic_annual_splines(std::span<const Timestamp> timestamps, int n_basis = 12);

// Scale of the holiday impact at row t: q_0.90 - q_0.37 of the previous 168
// load values (the first full week for t < 168), floored at eps_rel times the
// median of load[0, median_end) (all of load by default).
std::vector<double> holiday_scale(std::span<const double> load, std::span<const std::size_t> rows,
                                  double eps_rel = 1e-6, std::size_t median_end = 0);

// One column per (candidate date, hour of day) that occurs in the sample;
// the column is holiday_scale() on matching rows and zero elsewhere.
// Candidates that never occur are dropped with a warning.
// With offset > 0, row t corresponds to load[offset + t] and the scale floor
// only looks at load[0, offset), so the block can be built causally.
FeatureBlock holiday_dummies(std::span<const Timestamp> timestamps, std::span<const MonthDay> candidates,
                             std::span<const double> load, std::size_t offset = 0);

std::vector<Timestamp> hourly_timestamps(Timestamp start, std::size_t n);

} // namespace sboa
