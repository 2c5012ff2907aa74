#include "sboa/boa.hpp"

#include "sboa/error.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace sboa {

std::string_view eta_variant_name(EtaVariant v) { return v == EtaVariant::half_range ? "half_range" : "inverse_range"; }

EtaVariant parse_eta_variant(std::string_view s) {
    if (s == "half_range") {
        return EtaVariant::half_range;
    }
    if (s == "inverse_range") {
        return EtaVariant::inverse_range;
    }
    throw ConfigError(fmt::format("unknown eta variant '{}'", s));
}

Combination combine(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& forecasts) {
    const auto H = forecasts.rows();
    const auto K = forecasts.cols();
    const auto gap = forecasts.array().isNaN();
    const Eigen::ArrayXXd avail = gap.select(0.0, Eigen::ArrayXXd::Ones(H, K));
    const Eigen::ArrayXXd f = gap.select(0.0, forecasts.array());
    Eigen::ArrayXXd w = weights.array() * avail;
    const Eigen::ArrayXd total = w.rowwise().sum();
    const Eigen::ArrayXd count = avail.rowwise().sum();
    for (Eigen::Index h = 0; h < H; ++h) {
        if (total[h] > 0.0) {
            w.row(h) /= total[h];
        } else if (count[h] > 0.0) {
            // only zero-weight experts left: equal weights among them
            w.row(h) = avail.row(h) / count[h];
        }
    }
    Combination c;
    c.forecast = (w * f).rowwise().sum().matrix();
    for (Eigen::Index h = 0; h < H; ++h) {
        if (count[h] == 0.0) {
            c.forecast[h] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    c.weights = w.matrix();
    return c;
}

BoaState::BoaState(std::size_t n_experts, std::size_t n_horizons) {
    if (n_experts == 0) {
        throw ConfigError("aggregation needs at least one expert");
    }
    const auto H = static_cast<Eigen::Index>(n_horizons);
    const auto K = static_cast<Eigen::Index>(n_experts);
    w_ = Eigen::MatrixXd::Constant(H, K, 1.0 / static_cast<double>(K));
    E_ = Eigen::MatrixXd::Zero(H, K);
    eta_ = Eigen::MatrixXd::Zero(H, K);
    R_ = Eigen::MatrixXd::Zero(H, K);
    S_ = Eigen::MatrixXd::Zero(H, K);
}

double BoaState::update(const Eigen::MatrixXd& forecasts, const Combination& combination, const Eigen::VectorXd& actual,
                        const BoaOptions& options) {
    const auto H = w_.rows();
    const auto K = w_.cols();
    const double log_k = std::log(static_cast<double>(K));
    const double inf = std::numeric_limits<double>::infinity();

    // Horizons without an actual keep sign 0; together with r = 0 for missing
    // forecasts this leaves the state of the skipped entries unchanged.
    Eigen::ArrayXd sign = Eigen::ArrayXd::Zero(H);
    Eigen::ArrayXd comb = Eigen::ArrayXd::Zero(H);
    for (Eigen::Index h = 0; h < H; ++h) {
        if (!std::isnan(actual[h]) && !std::isnan(combination.forecast[h])) {
            sign[h] = ad_subgradient(combination.forecast[h], actual[h]);
            comb[h] = combination.forecast[h];
        }
    }
    // Broadcasts are materialized first; fused into a longer expression they
    // would not vectorize.
    const auto f = forecasts.array();
    Eigen::ArrayXXd r = (-f).colwise() + comb;
    r.colwise() *= sign;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        r.data()[i] = std::isnan(forecasts.data()[i]) ? 0.0 : r.data()[i];
    }
    const double identity = (combination.weights.array() * r).rowwise().sum().abs().maxCoeff();

    auto E = E_.array();
    auto S = S_.array();
    auto R = R_.array();
    auto eta = eta_.array();
    if (options.regret_forget > 0.0) {
        for (Eigen::Index h = 0; h < H; ++h) {
            if (std::isnan(actual[h]) || std::isnan(combination.forecast[h])) {
                continue;
            }
            for (Eigen::Index k = 0; k < K; ++k) {
                if (!std::isnan(forecasts(h, k))) {
                    R(h, k) *= 1.0 - options.regret_forget;
                }
            }
        }
    }
    E = E.max(r.abs());
    S += r.square();
    const Eigen::ArrayXXd cap = options.eta_variant == EtaVariant::half_range ? (E / 2.0).eval() : (0.5 / E).eval();
    const Eigen::ArrayXXd rate = (log_k / S).sqrt();
    // Plain loops where Eigen's select would not vectorize.
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double v = std::min(cap.data()[i], rate.data()[i]);
        eta.data()[i] = S.data()[i] > 0.0 ? v : 0.0;
    }
    R += r * (eta * r - 1.0) / 2.0 + (-2.0 * eta * r > 1.0).select(E, 0.0);

    // w_k proportional to eta_k exp(-eta_k R_k), exponent shifted by its row max
    Eigen::ArrayXXd expo(H, K);
    for (Eigen::Index i = 0; i < expo.size(); ++i) {
        expo.data()[i] = eta.data()[i] > 0.0 ? -eta.data()[i] * R.data()[i] : -inf;
    }
    Eigen::ArrayXd top = expo.rowwise().maxCoeff();
    const Eigen::ArrayXd shift = top.isInf().select(0.0, top);
    // exponents below -600 are clamped: such weights are negligible and
    // subnormal intermediates would slow the whole update down
    expo.colwise() -= shift;
    Eigen::ArrayXXd w = eta * expo.max(-600.0).exp();
    w.colwise() /= w.rowwise().sum();
    if (options.weight_floor > 0.0) {
        w = w.max(options.weight_floor);
        w.colwise() /= w.rowwise().sum();
    }
    for (Eigen::Index h = 0; h < H; ++h) {
        if (std::isinf(top[h])) {
            w.row(h).setConstant(1.0 / static_cast<double>(K));
        }
    }
    w_ = w.matrix();
    ++updates_;
    return identity;
}

double day_mae(const Eigen::VectorXd& forecast, const Eigen::VectorXd& actual) {
    double s = 0.0;
    int n = 0;
    for (Eigen::Index h = 0; h < forecast.size(); ++h) {
        if (!std::isnan(forecast[h]) && !std::isnan(actual[h])) {
            s += ad_loss(forecast[h], actual[h]);
            ++n;
        }
    }
    return n > 0 ? s / n : std::numeric_limits<double>::quiet_NaN();
}

BoaRun run_boa(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, const Smoother& smoother,
               const BoaOptions& options, bool keep_weights) {
    const std::size_t D = panel.n_days();
    if (static_cast<std::size_t>(actuals.rows()) != D || actuals.cols() != kHorizonCount) {
        throw DataError(fmt::format("actuals must be {} x {}, got {} x {}", D, kHorizonCount, actuals.rows(),
                                    actuals.cols()));
    }
    if (options.feedback_delay < 1) {
        throw ConfigError("feedback delay must be at least one day");
    }
    const auto delay = static_cast<std::size_t>(options.feedback_delay);
    BoaState state(panel.n_experts());
    BoaRun run;
    run.forecasts.resize(static_cast<Eigen::Index>(D), kHorizonCount);
    run.mae.assign(D, std::numeric_limits<double>::quiet_NaN());
    std::vector<Eigen::MatrixXd> slices(D);
    std::vector<Combination> combos(D);
    for (std::size_t d = 0; d < D; ++d) {
        if (d >= delay) {
            const std::size_t i = d - delay;
            const double res = state.update(slices[i], combos[i], actuals.row(static_cast<Eigen::Index>(i)).transpose(),
                                            options);
            run.max_identity_residual = std::max(run.max_identity_residual, res);
            slices[i] = Eigen::MatrixXd();
            combos[i] = Combination();
        }
        const Eigen::MatrixXd smoothed = smooth_weights(state.weights(), smoother, options.simplex_repair);
        slices[d] = panel.slice(d);
        combos[d] = combine(smoothed, slices[d]);
        run.forecasts.row(static_cast<Eigen::Index>(d)) = combos[d].forecast.transpose();
        run.mae[d] = day_mae(combos[d].forecast, actuals.row(static_cast<Eigen::Index>(d)).transpose());
        if (keep_weights) {
            run.raw_weights.push_back(state.weights());
            run.smoothed_weights.push_back(smoothed);
        }
    }
    return run;
}

AggregationResult aggregate(const ExpertPanel& panel, const Eigen::MatrixXd& actuals, std::span<const double> lambdas,
                            const BoaOptions& options, double rho, Execution execution, bool keep_weights) {
    if (lambdas.empty()) {
        throw ConfigError("lambda grid is empty");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw ConfigError("forgetting parameter rho must be in [0, 1)");
    }
    AggregationResult out;
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    const auto L = static_cast<long>(lambdas.size());
    out.runs.resize(lambdas.size());
    std::vector<Smoother> smoothers;
    for (double l : lambdas) {
        smoothers.push_back(Smoother::build(l));
    }
    LoopErrors errors;
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::parallel)
    for (long j = 0; j < L; ++j) {
        errors.run(j, [&] {
            out.runs[static_cast<std::size_t>(j)] =
                run_boa(panel, actuals, smoothers[static_cast<std::size_t>(j)], options, keep_weights);
        });
    }
    errors.rethrow();

    const std::size_t D = panel.n_days();
    const auto delay = static_cast<std::size_t>(options.feedback_delay);
    out.forecasts.resize(static_cast<Eigen::Index>(D), kHorizonCount);
    out.selected.assign(D, 0);
    out.mae.assign(D, std::numeric_limits<double>::quiet_NaN());
    out.discounted_mae = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(D), L,
                                                   std::numeric_limits<double>::quiet_NaN());
    std::vector<double> num(lambdas.size(), 0.0), den(lambdas.size(), 0.0);
    for (std::size_t d = 0; d < D; ++d) {
        if (d >= delay) {
            const std::size_t i = d - delay;
            for (std::size_t j = 0; j < lambdas.size(); ++j) {
                const double m = out.runs[j].mae[i];
                if (!std::isnan(m)) {
                    num[j] = (1.0 - rho) * num[j] + m;
                    den[j] = (1.0 - rho) * den[j] + 1.0;
                }
            }
        }
        std::size_t best = 0;
        double best_value = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            if (den[j] > 0.0) {
                const double v = num[j] / den[j];
                out.discounted_mae(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)) = v;
                if (v < best_value) {
                    best_value = v;
                    best = j;
                }
            }
        }
        out.selected[d] = best;
        out.forecasts.row(static_cast<Eigen::Index>(d)) = out.runs[best].forecasts.row(static_cast<Eigen::Index>(d));
        out.mae[d] = out.runs[best].mae[d];
    }
    for (const auto& r : out.runs) {
        out.max_identity_residual = std::max(out.max_identity_residual, r.max_identity_residual);
    }
    return out;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g{0.0};
    for (int e = -4; e <= 12; ++e) {
        g.push_back(std::exp2(static_cast<double>(e)));
    }
    g.push_back(kInfiniteLambda);
    return g;
}

} // namespace sboa
