#pragma once

#include "sboa/execution.hpp"
#include "sboa/experts/additive.hpp"
#include "sboa/experts/ar.hpp"
#include "sboa/experts/expert_input.hpp"
#include "sboa/experts/lasso_hd.hpp"
#include "sboa/experts/stl_es.hpp"
#include "sboa/panel.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sboa {

inline const std::vector<int>& default_windows() {
    static const std::vector<int> w{28, 56, 77, 119, 210, 393, 758, 1123};
    return w;
}

struct PoolConfig {
    std::vector<Family> families{Family::stl_es, Family::ar_p, Family::additive, Family::lasso_hd};
    std::vector<int> windows = default_windows();
    std::vector<Scale> scales{Scale::log, Scale::level};
    int ar_max_order = kArMaxOrder;
    double log_response_scale = 100.0;
    StlOptions stl;
    AdditiveOptions additive;
    LassoHdOptions lasso_hd;
};

// Family-major, then window, then scale.
std::vector<ExpertSpec> expert_grid(const PoolConfig& config);

// Forecast on the load scale (log-scale fits are exponentiated). nullopt
// when the spec is infeasible for this input or the output is not a
// positive finite number.
std::optional<DayForecast> forecast_expert(const ExpertSpec& spec, const ExpertInput& input, const PoolConfig& config);

// One job per (issue day, expert); failures and infeasible specs leave gaps.
ExpertPanel build_panel(const ExpertInputFactory& factory, std::span<const ExpertSpec> specs,
                        std::span<const Date> issue_days, const PoolConfig& config,
                        Execution execution = Execution::parallel);

} // namespace sboa
