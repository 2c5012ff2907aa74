#include "sboa/experts/additive.hpp"

#include "sboa/bspline.hpp"
#include "sboa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sboa {

PenalizedFit fit_penalized(const Eigen::MatrixXd& S, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                           std::span<const double> relative_grid) {
    const auto n = y.size();
    PenalizedFit fit;
    fit.beta_u = Eigen::VectorXd::Zero(U.cols());
    fit.beta_s = Eigen::VectorXd::Zero(S.cols());

    // Independent unpenalized columns, in pivot order.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> piv(U);
    const auto r = U.cols() > 0 ? piv.rank() : 0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < r; ++j) {
        keep.push_back(piv.colsPermutation().indices()[j]);
    }
    Eigen::MatrixXd Ur(n, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        Ur.col(j) = U.col(keep[static_cast<std::size_t>(j)]);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Ur);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);

    Eigen::VectorXd resid = y;
    if (S.cols() > 0) {
        const Eigen::MatrixXd St = S - Q * (Q.transpose() * S);
        const Eigen::VectorXd yt = y - Q * (Q.transpose() * y);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(S.cols(), S.cols());
        G.selfadjointView<Eigen::Lower>().rankUpdate(St.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
        const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
        const Eigen::VectorXd z = eig.eigenvectors().transpose() * (St.transpose() * yt);
        const double yy = yt.squaredNorm();
        const double mean_eig = lam.sum() / static_cast<double>(lam.size());
        const double scale = mean_eig > 0.0 ? mean_eig : 1.0;
        const double nn = static_cast<double>(n);
        double best = std::numeric_limits<double>::infinity();
        double best_lambda = scale * relative_grid.back();
        double best_df = 0.0;
        for (double rel : relative_grid) {
            const double lambda = rel * scale;
            const Eigen::ArrayXd denom = lam.array() + lambda;
            const double df = static_cast<double>(r) + (lam.array() / denom).sum();
            const Eigen::ArrayXd z2 = z.array().square();
            const double rss = std::max(0.0, yy - 2.0 * (z2 / denom).sum() + (z2 * lam.array() / denom.square()).sum());
            if (nn - df < 0.5) {
                continue;
            }
            const double gcv = nn * rss / ((nn - df) * (nn - df));
            if (gcv < best) {
                best = gcv;
                best_lambda = lambda;
                best_df = df;
            }
        }
        fit.lambda = best_lambda;
        fit.gcv = best;
        fit.df = best_df;
        fit.beta_s = eig.eigenvectors() * (z.array() / (lam.array() + best_lambda)).matrix();
        resid -= S * fit.beta_s;
    } else {
        fit.df = static_cast<double>(r);
    }
    if (r > 0) {
        const Eigen::VectorXd bu = qr.solve(resid);
        for (Eigen::Index j = 0; j < r; ++j) {
            fit.beta_u[keep[static_cast<std::size_t>(j)]] = bu[j];
        }
    }
    return fit;
}

namespace {

using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

struct Smooth {
    int input;
    CubicBSplineBasis basis;
};

const WeatherTrack* find_track(const ExpertInput& in, const std::string& name) {
    for (const auto& w : in.weather) {
        if (w.name == name) {
            return &w;
        }
    }
    return nullptr;
}

} // namespace

std::optional<DayForecast> forecast_additive(const ExpertInput& in, const AdditiveOptions& options) {
    const std::size_t n = in.n();
    if (n < 2 * kHoursPerWeek) {
        return std::nullopt;
    }
    const auto* temp = find_track(in, "temperature");
    const auto* cloud = find_track(in, "cloud_cover");
    std::vector<const WeatherTrack*> plain;
    for (const auto* name : {"pressure", "wind_speed", "wind_NS", "wind_EW"}) {
        if (const auto* w = find_track(in, name)) {
            plain.push_back(w);
        }
    }
    std::vector<int> linear_lags;
    for (int k : options.short_lags) {
        if (static_cast<std::size_t>(2 * k) <= n) {
            linear_lags.push_back(k);
        }
    }
    for (int k : options.long_lags) {
        if (static_cast<std::size_t>(2 * k) <= n) {
            linear_lags.push_back(k);
        }
    }

    DayForecast out{};
    for (int i = 0; i < kHorizonCount; ++i) {
        const int h = in.first_horizon + i;
        const std::size_t tgt = in.target_index(i);
        const bool use24 = h <= 24;
        int max_lag = kHoursPerWeek;
        for (int k : linear_lags) {
            max_lag = std::max(max_lag, k);
        }
        const auto first = static_cast<std::size_t>(max_lag) + (tgt - static_cast<std::size_t>(max_lag)) % 24;
        std::vector<std::size_t> rows;
        for (std::size_t t = first; t < n; t += 24) {
            rows.push_back(t);
        }
        if (rows.size() < 8) {
            return std::nullopt;
        }

        // Smooth inputs at time t; the order fixes the input ids below.
        auto inputs = [&](std::size_t t, std::vector<double>& v) {
            v.clear();
            v.push_back(use24 ? in.y[t - 24] : 0.0);
            v.push_back(in.y[t - kHoursPerWeek]);
            v.push_back(temp ? temp->rm24[t] : 0.0);
            v.push_back(cloud ? cloud->rm24[t] : 0.0);
            for (const auto* w : plain) {
                v.push_back(w->values[t]);
            }
        };
        const int n_inputs = 4 + static_cast<int>(plain.size());
        std::vector<std::uint8_t> present(static_cast<std::size_t>(n_inputs), 1);
        present[0] = use24;
        present[2] = temp != nullptr;
        present[3] = cloud != nullptr;
        std::vector<double> lo(static_cast<std::size_t>(n_inputs), std::numeric_limits<double>::infinity());
        std::vector<double> hi(static_cast<std::size_t>(n_inputs), -std::numeric_limits<double>::infinity());
        std::vector<double> v;
        for (auto t : rows) {
            inputs(t, v);
            for (int j = 0; j < n_inputs; ++j) {
                lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j)]);
                hi[static_cast<std::size_t>(j)] = std::max(hi[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j)]);
            }
        }
        for (int j = 0; j < n_inputs; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            if (!(hi[ju] - lo[ju] > 1e-9 * std::max(1.0, std::abs(hi[ju])))) {
                present[ju] = 0;
            }
        }

        const int n_unpen = 1 + (use24 ? 1 : 0) + 1 + static_cast<int>(linear_lags.size()) + 6;
        auto count_pen = [&](int main, int wd, int tb) {
            int c = 0;
            for (int j = 0; j < n_inputs; ++j) {
                c += present[static_cast<std::size_t>(j)] ? main : 0;
            }
            c += (present[2] ? 7 * wd : 0) + (present[3] ? 7 * wd : 0);
            c += (present[2] && present[3]) ? tb * tb : 0;
            return c;
        };
        bool reduced = static_cast<int>(rows.size()) < count_pen(options.n_basis, options.weekday_basis,
                                                                   options.tensor_basis) + n_unpen;
        const int main_k = reduced ? options.reduced_basis : options.n_basis;
        const int wd_k = reduced ? 0 : options.weekday_basis;
        const int tb_k = reduced ? 0 : options.tensor_basis;
        std::vector<Smooth> mains, weekly;
        for (int j = 0; j < n_inputs; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            if (present[ju]) {
                mains.push_back({j, CubicBSplineBasis(lo[ju], hi[ju], main_k)});
            }
        }
        if (wd_k > 0) {
            for (int j : {2, 3}) {
                const auto ju = static_cast<std::size_t>(j);
                if (present[ju]) {
                    weekly.push_back({j, CubicBSplineBasis(lo[ju], hi[ju], std::max(wd_k, 4))});
                }
            }
        }
        const bool tensor = tb_k > 0 && present[2] && present[3];
        std::optional<CubicBSplineBasis> tb_temp, tb_cloud;
        if (tensor) {
            tb_temp.emplace(lo[2], hi[2], tb_k);
            tb_cloud.emplace(lo[3], hi[3], tb_k);
        }
        const int n_pen = count_pen(main_k, wd_k, tb_k);

        std::vector<double> buf(16), buf2(16);
        auto fill = [&](std::size_t t, RowRef s, RowRef u) {
            inputs(t, v);
            const int wd = day_of_week(in.time_at(t));
            int c = 0;
            for (const auto& m : mains) {
                buf.resize(static_cast<std::size_t>(m.basis.size()));
                m.basis.evaluate(v[static_cast<std::size_t>(m.input)], buf);
                for (double b : buf) {
                    s[c++] = b;
                }
            }
            for (const auto& m : weekly) {
                buf.resize(static_cast<std::size_t>(m.basis.size()));
                m.basis.evaluate(v[static_cast<std::size_t>(m.input)], buf);
                for (int d = 1; d <= 7; ++d) {
                    for (double b : buf) {
                        s[c++] = d == wd ? b : 0.0;
                    }
                }
            }
            if (tensor) {
                buf.resize(static_cast<std::size_t>(tb_k));
                buf2.resize(static_cast<std::size_t>(tb_k));
                tb_temp->evaluate(v[2], buf);
                tb_cloud->evaluate(v[3], buf2);
                for (double a : buf) {
                    for (double b : buf2) {
                        s[c++] = a * b;
                    }
                }
            }
            int q = 0;
            u[q++] = 1.0;
            if (use24) {
                u[q++] = in.y[t - 24];
            }
            u[q++] = in.y[t - kHoursPerWeek];
            for (int k : linear_lags) {
                u[q++] = in.y[t - static_cast<std::size_t>(k)];
            }
            for (int d = 2; d <= 7; ++d) {
                u[q++] = d == wd ? 1.0 : 0.0;
            }
        };

        const auto m = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd S(m, n_pen), U(m, n_unpen);
        Eigen::VectorXd y(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            fill(rows[static_cast<std::size_t>(r)], S.row(r), U.row(r));
            y[r] = in.y[rows[static_cast<std::size_t>(r)]];
        }
        const auto fit = fit_penalized(S, U, y, options.ridge_grid);
        Eigen::RowVectorXd s_new(n_pen), u_new(n_unpen);
        fill(tgt, s_new, u_new);
        out[static_cast<std::size_t>(i)] = fit.predict(s_new.transpose(), u_new.transpose());
    }
    return out;
}

} // namespace sboa
