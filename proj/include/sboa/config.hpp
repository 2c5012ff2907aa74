#pragma once

#include "sboa/boa.hpp"
#include "sboa/experts/pool.hpp"
#include "sboa/holiday.hpp"
#include "sboa/selection.hpp"
#include "sboa/time.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sboa {

/// All tuning constants of a run. Serialized as JSON; infinite lambda is
/// written as the string "inf".
struct PipelineConfig {
    std::string input = "data.csv";
    std::string output_dir = "out";
    std::string cache_dir; // empty: <output_dir>/cache

    int anchor_hour = kDefaultAnchorHour;
    HolidayConfig holiday;
    PoolConfig pool;
    std::vector<double> lambda_grid = default_lambda_grid();
    double rho = 0.01;
    SelectionOptions selection;
    BoaOptions boa;

    // Issue day of the first test forecast; default: the test period ends
    // with the last issue day whose target day is fully in the data.
    std::optional<Date> first_issue_day;
    // Number of test days; 0 runs from first_issue_day to the end of the data.
    int test_days = 60;
    std::uint64_t seed = 1;
    int threads = 0; // 0: OpenMP default

    PipelineConfig();

    std::string resolved_cache_dir() const { return cache_dir.empty() ? output_dir + "/cache" : cache_dir; }
    // First panel day relative to the first test day.
    std::size_t lead_days() const;
};

const std::vector<MonthDay>& default_holiday_candidates();

nlohmann::json to_json(const PipelineConfig& config);
// Keys present in `j` override the values in `base`; unknown keys throw.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path, PipelineConfig base = {});

void validate(const PipelineConfig& config);

// Canonical text: JSON with sorted keys and shortest round-trip numbers.
std::string canonical_text(const PipelineConfig& config);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 14695981039346656037ULL);
std::uint64_t hash_series(const HourlySeries& series);
// Key of the expert panel cache: the config entries that shape the panel
// plus the data content.
std::uint64_t panel_cache_key(const PipelineConfig& config, std::uint64_t data_hash);

} // namespace sboa
