#include "sboa/experts/stl_es.hpp"

#include "sboa/error.hpp"

#include <algorithm>
#include <cmath>

namespace sboa {

namespace {

double tricube(double u) {
    if (u >= 1.0) {
        return 0.0;
    }
    const double c = 1.0 - u * u * u;
    return c * c * c;
}

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
    std::vector<double> out;
    if (x.size() < len) {
        return out;
    }
    out.resize(x.size() - len + 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            s += x[i + j];
        }
        out[i] = s / static_cast<double>(len);
    }
    return out;
}

std::vector<double> loess_all(std::span<const double> y, int span, int degree) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = loess_at(y, static_cast<double>(i + 1), span, degree);
    }
    return out;
}

} // namespace

double loess_at(std::span<const double> y, double x, int span, int degree) {
    const auto n = static_cast<long>(y.size());
    if (n == 0) {
        throw DataError("loess on an empty series");
    }
    const long q = std::max(span, 1);
    long lo = 1;
    long hi = n;
    double h = 0.0;
    if (q >= n) {
        h = std::max(x - 1.0, static_cast<double>(n) - x) + static_cast<double>(q - n) / 2.0;
    } else {
        lo = std::clamp(static_cast<long>(std::floor(x)) - (q - 1) / 2, 1L, n - q + 1);
        // slide toward x while the far end is farther than the next point
        while (lo + q <= n && x - static_cast<double>(lo) > static_cast<double>(lo + q) - x) {
            ++lo;
        }
        while (lo > 1 && static_cast<double>(lo + q - 1) - x > x - static_cast<double>(lo - 1)) {
            --lo;
        }
        hi = lo + q - 1;
        h = std::max(x - static_cast<double>(lo), static_cast<double>(hi) - x);
    }
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (long i = lo; i <= hi; ++i) {
        const double d = static_cast<double>(i) - x;
        const double w = h > 0.0 ? tricube(std::abs(d) / h) : (d == 0.0 ? 1.0 : 0.0);
        if (w <= 0.0) {
            continue;
        }
        const double v = y[static_cast<std::size_t>(i - 1)];
        sw += w;
        sx += w * d;
        sy += w * v;
        sxx += w * d * d;
        sxy += w * d * v;
    }
    if (sw <= 0.0) {
        const long nearest = std::clamp(std::lround(x), 1L, n);
        return y[static_cast<std::size_t>(nearest - 1)];
    }
    const double mean = sy / sw;
    if (degree == 0) {
        return mean;
    }
    const double mx = sx / sw;
    const double var = sxx / sw - mx * mx;
    if (var <= 1e-12 * std::max(1.0, h * h)) {
        return mean;
    }
    const double slope = (sxy / sw - mx * mean) / var;
    // value of the local line at d = 0
    return mean - slope * mx;
}

StlDecomposition stl(std::span<const double> y, const StlOptions& options) {
    const std::size_t n = y.size();
    const auto np = static_cast<std::size_t>(options.period);
    if (np < 2 || n < 2 * np) {
        throw DataError("stl needs at least two full periods");
    }
    StlDecomposition out;
    out.trend.assign(n, 0.0);
    out.seasonal.assign(n, 0.0);
    std::vector<double> detrended(n), cycle(n + 2 * np), sub;
    for (int iter = 0; iter < options.inner_iterations; ++iter) {
        for (std::size_t t = 0; t < n; ++t) {
            detrended[t] = y[t] - out.trend[t];
        }
        for (std::size_t j = 0; j < np; ++j) {
            sub.clear();
            for (std::size_t t = j; t < n; t += np) {
                sub.push_back(detrended[t]);
            }
            const std::size_t m = sub.size();
            for (std::size_t k = 0; k <= m + 1; ++k) {
                cycle[j + k * np] = loess_at(sub, static_cast<double>(k), options.seasonal_span, options.seasonal_degree);
            }
        }
        auto low = moving_average(cycle, np);
        low = moving_average(low, np);
        low = moving_average(low, 3);
        low = loess_all(low, options.lowpass_span, 1);
        for (std::size_t t = 0; t < n; ++t) {
            out.seasonal[t] = cycle[np + t] - low[t];
            detrended[t] = y[t] - out.seasonal[t];
        }
        out.trend = loess_all(detrended, options.trend_span, 1);
    }
    out.remainder.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.remainder[t] = y[t] - out.trend[t] - out.seasonal[t];
    }
    return out;
}

SesFit fit_ses(std::span<const double> x) {
    if (x.empty()) {
        throw DataError("exponential smoothing on an empty series");
    }
    auto run = [&](double alpha) {
        SesFit f{alpha, x[0], 0.0};
        for (std::size_t t = 1; t < x.size(); ++t) {
            const double e = x[t] - f.level;
            f.sse += e * e;
            f.level += alpha * e;
        }
        return f;
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 1e-4, b = 1.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = run(c).sse, fd = run(d).sse;
    for (int it = 0; it < 60 && b - a > 1e-6; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = run(c).sse;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = run(d).sse;
        }
    }
    return run((a + b) / 2.0);
}

std::optional<DayForecast> forecast_stl_es(std::span<const double> y, int first_horizon, const StlOptions& options) {
    const auto np = static_cast<std::size_t>(options.period);
    if (y.size() < 2 * np || first_horizon + kHorizonCount - 1 > options.period) {
        return std::nullopt;
    }
    const auto dec = stl(y, options);
    const std::size_t n = y.size();
    const double slope = (dec.trend[n - 1] - dec.trend[n - 1 - np]) / static_cast<double>(np);
    const double level = fit_ses(dec.remainder).level;
    DayForecast out{};
    for (int i = 0; i < kHorizonCount; ++i) {
        const auto h = static_cast<std::size_t>(first_horizon + i);
        out[static_cast<std::size_t>(i)] =
            dec.trend[n - 1] + static_cast<double>(h) * slope + dec.seasonal[n - 1 + h - np] + level;
    }
    return out;
}

} // namespace sboa
