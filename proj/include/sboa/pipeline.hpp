#pragma once

#include "sboa/boa.hpp"
#include "sboa/config.hpp"
#include "sboa/panel.hpp"
#include "sboa/selection.hpp"
#include "sboa/series.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sboa {

// Failure inside one pipeline stage; what() starts with "[stage] ".
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

inline constexpr const char* kAdjustedChannel = "load_hldadj";

/// Issue days of the expert panel: `lead` days for burn-in and validation,
/// then the test days. The holiday model is fitted on the hours up to the
/// first panel anchor.
struct RunPlan {
    std::vector<Date> issue_days;
    std::size_t first_test = 0;
    std::size_t holiday_fit_end = 0;
    std::size_t test_count() const { return issue_days.size() - first_test; }
};

RunPlan plan_run(const PipelineConfig& config, const HourlySeries& series);

// Adds the holiday-adjusted load as channel load_hldadj.
HourlySeries adjust_stage(const HourlySeries& prepared, const PipelineConfig& config, const RunPlan& plan,
                          Execution execution = Execution::parallel);

// Loads the panel from the cache when the key matches, else trains and
// writes the cache.
ExpertPanel train_stage(const HourlySeries& adjusted, const PipelineConfig& config, const RunPlan& plan,
                        Execution execution = Execution::parallel, bool use_cache = true);

// Row d: observed load of the target day of issue day d (NaN outside the data).
Eigen::MatrixXd target_actuals(const HourlySeries& series, std::span<const Date> issue_days, int anchor_hour);

struct AggregateOutput {
    SelectionResult selection;
    ExpertPanel chosen;
    AggregationResult aggregation;
    std::vector<double> expert_test_mae; // per panel expert over test days, NaN if never available
    double test_mae = 0.0;
};

AggregateOutput aggregate_stage(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, const PipelineConfig& config,
                                const RunPlan& plan, Execution execution = Execution::parallel);

// forecasts.csv, weights.csv, lambda_trace.csv, daily_mae.csv,
// selection_curve.csv and summary.json in the output directory.
void write_aggregate_artifacts(const AggregateOutput& out, const ExpertPanel& panel, const PipelineConfig& config,
                               const RunPlan& plan);

// Marks summary.json of the output directory as incomplete.
void write_failure_summary(const PipelineConfig& config, const StageError& error);

// All stages from the raw input file. Throws StageError.
AggregateOutput run_all(const PipelineConfig& config, Execution execution = Execution::parallel);

// File names inside the output directory.
std::string output_path(const PipelineConfig& config, const std::string& name);

std::string panel_cache_path(const PipelineConfig& config, std::uint64_t key);

} // namespace sboa
