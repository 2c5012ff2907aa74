#include "sboa/selection.hpp"

#include "sboa/error.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace sboa {

double validation_mae(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, std::span<const std::size_t> experts,
                      std::span<const double> lambdas, const BoaOptions& boa, double rho,
                      const SelectionOptions& options) {
    const std::size_t days = options.burn_in + options.validation;
    if (days > panel.n_days()) {
        throw DataError(fmt::format("selection needs {} panel days, panel has {}", days, panel.n_days()));
    }
    const auto sub = panel.subset(experts, 0, days);
    const auto result =
        aggregate(sub, actuals.topRows(static_cast<Eigen::Index>(days)), lambdas, boa, rho, Execution::serial);
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t d = options.burn_in; d < days; ++d) {
        if (!std::isnan(result.mae[d])) {
            s += result.mae[d];
            ++n;
        }
    }
    return n > 0 ? s / static_cast<double>(n) : std::numeric_limits<double>::infinity();
}

SelectionResult forward_select(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, std::span<const double> lambdas,
                               const BoaOptions& boa, double rho, const SelectionOptions& options,
                               Execution execution) {
    const std::size_t days = options.burn_in + options.validation;
    if (days > panel.n_days() || static_cast<std::size_t>(actuals.rows()) < days) {
        throw DataError(fmt::format("selection needs {} days of panel and actuals", days));
    }
    SelectionResult out;
    for (std::size_t k = 0; k < panel.n_experts(); ++k) {
        bool full = true;
        for (std::size_t d = 0; d < days && full; ++d) {
            full = panel.complete(d, k);
        }
        if (full) {
            out.candidates.push_back(k);
        }
    }
    if (out.candidates.empty()) {
        throw DataError("no expert has complete forecasts over the selection window");
    }
    const std::size_t rounds = std::min(options.max_experts, out.candidates.size());
    std::vector<std::size_t> remaining = out.candidates;
    for (std::size_t m = 0; m < rounds; ++m) {
        std::vector<double> scores(remaining.size());
        const auto n_rem = static_cast<long>(remaining.size());
        LoopErrors errors;
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::parallel)
        for (long c = 0; c < n_rem; ++c) {
            errors.run(c, [&] {
                auto trial = out.order;
                trial.push_back(remaining[static_cast<std::size_t>(c)]);
                scores[static_cast<std::size_t>(c)] =
                    validation_mae(panel, actuals, trial, lambdas, boa, rho, options);
            });
        }
        errors.rethrow();
        const auto best = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
        out.order.push_back(remaining[best]);
        out.mae_curve.push_back(scores[best]);
        remaining.erase(remaining.begin() + static_cast<long>(best));
        spdlog::debug("forward selection: M={} adds {} (MAE {:.4f})", m + 1, panel.experts()[out.order.back()].name(),
                      scores[best]);
    }
    out.best_size =
        static_cast<std::size_t>(std::min_element(out.mae_curve.begin(), out.mae_curve.end()) - out.mae_curve.begin()) + 1;
    out.chosen.assign(out.order.begin(), out.order.begin() + static_cast<long>(out.best_size));
    return out;
}

} // namespace sboa
