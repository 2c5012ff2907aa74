#pragma once

#include "sboa/time.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sboa {

enum class Family : std::uint8_t { stl_es, ar_p, additive, lasso_hd };
enum class Scale : std::uint8_t { log, level };

std::string_view family_name(Family f);
Family parse_family(std::string_view s);
std::string_view scale_name(Scale s);
Scale parse_scale(std::string_view s);

struct ExpertSpec {
    Family family = Family::lasso_hd;
    int window_days = 28;
    Scale scale = Scale::log;

    // e.g. "lasso_hd/w119/log"
    std::string name() const;
    friend bool operator==(const ExpertSpec&, const ExpertSpec&) = default;
};

/// Expert forecasts indexed (issue day, horizon position, expert). Horizon
/// position i corresponds to horizon first_horizon + i, i.e. hour i of the
/// target day. Unwritten entries are gaps (NaN). Entries are write-once and
/// strictly positive.
class ExpertPanel {
public:
    ExpertPanel() = default;
    ExpertPanel(std::vector<Date> issue_days, std::vector<ExpertSpec> experts, int first_horizon = 17);

    std::size_t n_days() const { return days_.size(); }
    std::size_t n_experts() const { return experts_.size(); }
    std::span<const Date> issue_days() const { return days_; }
    std::span<const ExpertSpec> experts() const { return experts_; }
    int first_horizon() const { return first_horizon_; }

    void set(std::size_t d, std::size_t h, std::size_t k, double value);
    // Writes all 24 horizons of one (day, expert) cell.
    void set_day(std::size_t d, std::size_t k, std::span<const double> values);
    double at(std::size_t d, std::size_t h, std::size_t k) const { return values_[offset(d, h, k)]; }
    bool has(std::size_t d, std::size_t h, std::size_t k) const { return written_[offset(d, h, k)] != 0; }
    // True if the expert has all 24 values on day d.
    bool complete(std::size_t d, std::size_t k) const;

    // 24 x K matrix of day d; gaps are NaN.
    Eigen::MatrixXd slice(std::size_t d) const;

    // Panel restricted to the given experts (in that order) and days [day_begin, day_end).
    ExpertPanel subset(std::span<const std::size_t> experts, std::size_t day_begin, std::size_t day_end) const;
    ExpertPanel subset(std::span<const std::size_t> experts) const { return subset(experts, 0, n_days()); }

    friend bool operator==(const ExpertPanel& a, const ExpertPanel& b);

private:
    std::size_t offset(std::size_t d, std::size_t h, std::size_t k) const {
        return (d * kHorizonCount + h) * experts_.size() + k;
    }

    std::vector<Date> days_;
    std::vector<ExpertSpec> experts_;
    int first_horizon_ = 17;
    std::vector<double> values_;
    std::vector<std::uint8_t> written_;
};

// Flat CSV "d,h,k,value" (issue date, horizon, expert index, forecast); gaps
// are omitted. The expert table is written alongside as "k,name,family,window_days,scale".
void write_panel_csv(const ExpertPanel& panel, const std::string& panel_path, const std::string& experts_path);
ExpertPanel read_panel_csv(const std::string& panel_path, const std::string& experts_path);

// Compact binary cache. `key` is stored in the header and checked on load.
void write_panel_cache(const ExpertPanel& panel, std::uint64_t key, const std::string& path);
// Returns false if the file is missing or was written for a different key.
bool read_panel_cache(const std::string& path, std::uint64_t key, ExpertPanel& out);

} // namespace sboa
