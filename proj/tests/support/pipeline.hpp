#pragma once

#include "sboa/config.hpp"
#include "sboa/synthetic.hpp"

#include <filesystem>
#include <string>

namespace fixture {

inline std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("sboa_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// A run small enough for unit tests: 70 days, two families, one window.
inline sboa::PipelineConfig small_config(const std::filesystem::path& dir, std::size_t days = 70) {
    sboa::SyntheticOptions o;
    o.days = days;
    o.holidays = {{1, 1}, {2, 14}};
    const auto input = (dir / "data.csv").string();
    sboa::write_series_csv(sboa::simulate(o).series, input);
    sboa::PipelineConfig c;
    c.input = input;
    c.output_dir = (dir / "out").string();
    c.holiday.candidates = o.holidays;
    c.holiday.alpha_count = 6;
    c.holiday.alpha_ratio = 1e-2;
    c.pool.families = {sboa::Family::stl_es, sboa::Family::lasso_hd};
    c.pool.windows = {28};
    c.lambda_grid = {0.0, 4.0, sboa::kInfiniteLambda};
    c.selection = {5, 5, 3};
    c.test_days = 5;
    return c;
}

} // namespace fixture
