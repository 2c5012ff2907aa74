#include "sboa/experts/ar.hpp"

#include "sboa/error.hpp"

#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

namespace sboa {

ArFit fit_ar(std::span<const double> y, int p_max) {
    const std::size_t n = y.size();
    if (n < 2 || p_max < 0 || static_cast<std::size_t>(p_max) >= n) {
        throw DataError("autoregression needs more observations than the maximum order");
    }
    ArFit fit;
    fit.mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = y[t] - fit.mean;
    }
    const auto pm = static_cast<std::size_t>(p_max);
    std::vector<double> gamma(pm + 1, 0.0);
    for (std::size_t k = 0; k <= pm; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            s += x[t] * x[t + k];
        }
        gamma[k] = s / static_cast<double>(n);
    }
    const double nn = static_cast<double>(n);
    fit.sigma2 = gamma[0];
    if (!(gamma[0] > 1e-14 * std::max(1.0, fit.mean * fit.mean))) {
        fit.sigma2 = 0.0;
        return fit;
    }
    fit.aic.push_back(nn * std::log(gamma[0]));
    double best = fit.aic[0];
    std::vector<double> phi, next;
    double sigma2 = gamma[0];
    for (std::size_t p = 1; p <= pm; ++p) {
        double acc = gamma[p];
        for (std::size_t i = 0; i + 1 < p; ++i) {
            acc -= phi[i] * gamma[p - 1 - i];
        }
        const double kappa = acc / sigma2;
        const double s2 = sigma2 * (1.0 - kappa * kappa);
        if (!(std::abs(kappa) < 1.0) || !(s2 > 0.0)) {
            spdlog::warn("Yule-Walker recursion lost positive definiteness at order {}; orders capped at {}", p, p - 1);
            break;
        }
        next.assign(p, 0.0);
        for (std::size_t i = 0; i + 1 < p; ++i) {
            next[i] = phi[i] - kappa * phi[p - 2 - i];
        }
        next[p - 1] = kappa;
        phi.swap(next);
        sigma2 = s2;
        const double aic = nn * std::log(sigma2) + 2.0 * static_cast<double>(p);
        fit.aic.push_back(aic);
        if (aic < best) {
            best = aic;
            fit.order = static_cast<int>(p);
            fit.phi = phi;
            fit.sigma2 = sigma2;
        }
    }
    return fit;
}

std::vector<double> ar_forecast_path(const ArFit& fit, std::span<const double> y, int h_max) {
    const std::size_t n = y.size();
    const auto p = static_cast<std::size_t>(fit.order);
    if (n < p) {
        throw DataError("forecast history shorter than the autoregressive order");
    }
    std::vector<double> x(p + static_cast<std::size_t>(h_max));
    for (std::size_t i = 0; i < p; ++i) {
        x[i] = y[n - p + i] - fit.mean;
    }
    std::vector<double> out(static_cast<std::size_t>(h_max));
    for (std::size_t h = 0; h < out.size(); ++h) {
        double s = 0.0;
        const std::size_t t = p + h;
        for (std::size_t i = 0; i < p; ++i) {
            s += fit.phi[i] * x[t - 1 - i];
        }
        x[t] = s;
        out[h] = s + fit.mean;
    }
    return out;
}

std::optional<DayForecast> forecast_ar(std::span<const double> y, int first_horizon, int p_max) {
    if (y.size() < 2 * static_cast<std::size_t>(p_max)) {
        return std::nullopt;
    }
    const auto fit = fit_ar(y, p_max);
    const auto path = ar_forecast_path(fit, y, first_horizon + kHorizonCount - 1);
    DayForecast out{};
    for (int i = 0; i < kHorizonCount; ++i) {
        out[static_cast<std::size_t>(i)] = path[static_cast<std::size_t>(first_horizon - 1 + i)];
    }
    return out;
}

} // namespace sboa
