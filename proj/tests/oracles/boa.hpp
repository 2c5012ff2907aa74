#pragma once

// Straight transcription of the smoothed BOA recursions with the gradient
// trick, one horizon and one expert at a time. Independent of the engine:
// its own spline basis, its own linear solves, no Eigen.

#include "oracles/bspline.hpp"
#include "oracles/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

constexpr int H = 24;

inline Matrix hat_matrix(double lambda) {
    Matrix hat = zeros(H, H);
    if (std::isinf(lambda)) {
        for (auto& row : hat) {
            std::fill(row.begin(), row.end(), 1.0 / H);
        }
        return hat;
    }
    if (lambda == 0.0) {
        // 26 functions on 24 points have full row rank: the projection is I.
        for (int i = 0; i < H; ++i) {
            hat[i][i] = 1.0;
        }
        return hat;
    }
    const int m = 26;
    std::vector<double> x;
    for (int i = 0; i < H; ++i) {
        x.push_back(static_cast<double>(i) / (H - 1));
    }
    const Matrix b = cubic_basis(0.0, 1.0, m, x);
    const Matrix bt = transpose(b);
    Matrix a = multiply(bt, b);
    for (int i = 0; i + 1 < m; ++i) {
        // D'D of the first-difference matrix
        a[i][i] += lambda;
        a[i + 1][i + 1] += lambda;
        a[i][i + 1] -= lambda;
        a[i + 1][i] -= lambda;
    }
    return multiply(b, solve(a, bt));
}

struct Settings {
    bool inverse_range = false;
    double floor = 1e-12;
    bool repair = true;
    int delay = 1;
};

struct Trajectory {
    std::vector<Matrix> raw;      // per day, H x K weights before smoothing
    std::vector<Matrix> smoothed; // weights used on that day
    std::vector<Vector> forecast; // per day, H combined values
    std::vector<double> mae;
    double max_identity = 0.0;
};

// panel[d][h][k]; NaN marks a gap. actual[d][h].
inline Trajectory run(const std::vector<Matrix>& panel, const Matrix& actual, double lambda, const Settings& s) {
    const std::size_t D = panel.size();
    const std::size_t K = panel[0][0].size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const Matrix hat = hat_matrix(lambda);
    Matrix w = zeros(H, K), E = zeros(H, K), S = zeros(H, K), R = zeros(H, K), eta = zeros(H, K);
    for (auto& row : w) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(K));
    }
    Trajectory out;
    std::vector<Matrix> used(D);

    for (std::size_t d = 0; d < D; ++d) {
        if (d >= static_cast<std::size_t>(s.delay)) {
            const std::size_t i = d - static_cast<std::size_t>(s.delay);
            for (int h = 0; h < H; ++h) {
                const double y = actual[i][h];
                const double c = out.forecast[i][h];
                if (std::isnan(y) || std::isnan(c)) {
                    continue;
                }
                const double sg = c > y ? 1.0 : (c < y ? -1.0 : 0.0);
                double identity = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    const double f = panel[i][h][k];
                    if (std::isnan(f)) {
                        continue;
                    }
                    const double r = sg * (c - f);
                    identity += used[i][h][k] * r;
                    E[h][k] = std::max(E[h][k], std::abs(r));
                    S[h][k] += r * r;
                    if (S[h][k] > 0.0) {
                        const double cap = s.inverse_range ? 1.0 / (2.0 * E[h][k]) : E[h][k] / 2.0;
                        eta[h][k] = std::min(cap, std::sqrt(std::log(static_cast<double>(K)) / S[h][k]));
                    } else {
                        eta[h][k] = 0.0;
                    }
                    R[h][k] += r * (eta[h][k] * r - 1.0) / 2.0 + (-2.0 * eta[h][k] * r > 1.0 ? E[h][k] : 0.0);
                }
                out.max_identity = std::max(out.max_identity, std::abs(identity));
                double total = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    total += eta[h][k] * std::exp(-eta[h][k] * R[h][k]) / static_cast<double>(K);
                }
                for (std::size_t k = 0; k < K; ++k) {
                    const double num = eta[h][k] * std::exp(-eta[h][k] * R[h][k]) / static_cast<double>(K);
                    w[h][k] = total > 0.0 ? num / total : 1.0 / static_cast<double>(K);
                }
                if (total > 0.0 && s.floor > 0.0) {
                    double z = 0.0;
                    for (std::size_t k = 0; k < K; ++k) {
                        w[h][k] = std::max(w[h][k], s.floor);
                        z += w[h][k];
                    }
                    for (std::size_t k = 0; k < K; ++k) {
                        w[h][k] /= z;
                    }
                }
            }
        }

        Matrix sm = multiply(hat, w);
        if (s.repair) {
            for (int h = 0; h < H; ++h) {
                double z = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    sm[h][k] = std::max(sm[h][k], 0.0);
                    z += sm[h][k];
                }
                for (std::size_t k = 0; k < K; ++k) {
                    sm[h][k] = z > 0.0 ? sm[h][k] / z : 1.0 / static_cast<double>(K);
                }
            }
        }
        Matrix u = zeros(H, K);
        Vector f(H, nan);
        double abs_err = 0.0;
        int n_err = 0;
        for (int h = 0; h < H; ++h) {
            double z = 0.0;
            std::size_t avail = 0;
            for (std::size_t k = 0; k < K; ++k) {
                if (!std::isnan(panel[d][h][k])) {
                    z += sm[h][k];
                    ++avail;
                }
            }
            if (avail == 0) {
                continue;
            }
            double c = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                if (std::isnan(panel[d][h][k])) {
                    continue;
                }
                u[h][k] = z > 0.0 ? sm[h][k] / z : 1.0 / static_cast<double>(avail);
                if (u[h][k] != 0.0) {
                    c += u[h][k] * panel[d][h][k];
                }
            }
            f[h] = c;
            if (!std::isnan(actual[d][h])) {
                abs_err += std::abs(c - actual[d][h]);
                ++n_err;
            }
        }
        used[d] = u;
        out.raw.push_back(w);
        out.smoothed.push_back(sm);
        out.forecast.push_back(f);
        out.mae.push_back(n_err > 0 ? abs_err / n_err : nan);
    }
    return out;
}

// Index of the replicate with the lowest discounted MAE over the days whose
// actuals have arrived by day d, written as explicit weighted sums.
inline std::vector<std::size_t> select_lambda(const std::vector<Trajectory>& runs, double rho, int delay) {
    const std::size_t D = runs[0].mae.size();
    std::vector<std::size_t> out(D, 0);
    for (std::size_t d = 0; d < D; ++d) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < runs.size(); ++j) {
            if (d < static_cast<std::size_t>(delay)) {
                break;
            }
            const std::size_t last = d - static_cast<std::size_t>(delay);
            // weights (1 - rho)^(number of known days after day i)
            double num = 0.0, den = 0.0, weight = 1.0;
            for (std::size_t i = last + 1; i-- > 0;) {
                if (std::isnan(runs[j].mae[i])) {
                    continue;
                }
                num += weight * runs[j].mae[i];
                den += weight;
                weight *= 1.0 - rho;
            }
            if (den > 0.0 && num / den < best) {
                best = num / den;
                out[d] = j;
            }
        }
    }
    return out;
}

} // namespace oracle
