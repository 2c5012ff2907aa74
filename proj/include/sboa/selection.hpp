#pragma once

#include "sboa/boa.hpp"

#include <span>
#include <vector>

namespace sboa {

struct SelectionOptions {
    std::size_t burn_in = 30;
    std::size_t validation = 60;
    std::size_t max_experts = 40;
};

struct SelectionResult {
    std::vector<std::size_t> order;  // greedy order of panel expert indices
    std::vector<double> mae_curve;   // validation MAE after adding order[0..M)
    std::size_t best_size = 0;       // argmin of the curve plus one
    std::vector<std::size_t> chosen; // order[0..best_size)
    std::vector<std::size_t> candidates;
};

// Mean daily MAE of the full lambda-grid aggregation of `experts`, over
// days [burn_in, burn_in + validation) of the panel.
double validation_mae(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, std::span<const std::size_t> experts,
                      std::span<const double> lambdas, const BoaOptions& boa, double rho,
                      const SelectionOptions& options);

// Greedy forward selection on the first burn_in + validation panel days.
// Only experts with complete forecasts on those days are candidates. Ties go
// to the earliest candidate.
SelectionResult forward_select(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, std::span<const double> lambdas,
                               const BoaOptions& boa, double rho, const SelectionOptions& options,
                               Execution execution = Execution::parallel);

} // namespace sboa
