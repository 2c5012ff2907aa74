#include "sboa/experts/lasso_hd.hpp"

#include "sboa/design_matrix.hpp"

#include <cmath>

namespace sboa {

std::vector<double> lasso_hd_alpha_grid() {
    std::vector<double> out;
    for (int i = 0; i < 20; ++i) {
        out.push_back(std::exp2(6.0 - 7.0 * static_cast<double>(i) / 19.0));
    }
    return out;
}

std::vector<int> lasso_hd_lags(int h) {
    std::vector<int> out;
    for (int k = h; k <= h + 39; ++k) {
        out.push_back(k);
    }
    for (int d = 21; d <= 56; d += 7) {
        out.push_back(24 * d);
    }
    for (int d = 350; d <= 371; d += 7) {
        out.push_back(24 * d);
    }
    return out;
}

std::optional<DayForecast> forecast_lasso_hd(const ExpertInput& in, const LassoHdOptions& options) {
    const std::size_t n = in.n();
    DayForecast out{};
    for (int i = 0; i < kHorizonCount; ++i) {
        const int h = in.first_horizon + i;
        const std::size_t tgt = in.target_index(i);
        std::vector<int> lags;
        for (int k : lasso_hd_lags(h)) {
            if (static_cast<std::size_t>(2 * k) <= n) {
                lags.push_back(k);
            }
        }
        if (lags.empty()) {
            return std::nullopt;
        }
        const auto max_lag = static_cast<std::size_t>(lags.back());
        std::vector<std::size_t> rows;
        for (std::size_t t = max_lag + (tgt - max_lag) % 24; t < n; t += 24) {
            rows.push_back(t);
        }
        const std::size_t m = rows.size();
        if (m < 8) {
            return std::nullopt;
        }
        rows.push_back(tgt); // prediction row last
        const auto R = static_cast<Eigen::Index>(rows.size());

        std::vector<FeatureBlock> blocks;
        FeatureBlock lag_block{ColumnGroup::lags, {}, Eigen::MatrixXd(R, static_cast<Eigen::Index>(lags.size()))};
        for (std::size_t j = 0; j < lags.size(); ++j) {
            lag_block.names.push_back("lag");
            for (Eigen::Index r = 0; r < R; ++r) {
                lag_block.values(r, static_cast<Eigen::Index>(j)) = in.y[rows[static_cast<std::size_t>(r)] - static_cast<std::size_t>(lags[j])];
            }
        }
        blocks.push_back(std::move(lag_block));

        std::vector<std::vector<double>> channels;
        for (const auto& w : in.weather) {
            for (const auto* src : {&w.values, &w.rm24}) {
                std::vector<double> c(rows.size());
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    c[r] = (*src)[rows[r]];
                }
                channels.push_back(std::move(c));
            }
        }
        std::vector<NamedChannel> named;
        for (const auto& c : channels) {
            const std::span<const double> all(c);
            const auto thresholds = relu_thresholds(all.first(m), options.relu_probs);
            blocks.push_back(quantile_relu_with(all, thresholds, options.relu_probs));
            named.emplace_back("w", all);
        }
        if (!named.empty()) {
            blocks.push_back(pairwise_interactions(named));
        }
        std::vector<Timestamp> stamps;
        for (auto t : rows) {
            stamps.push_back(in.time_at(t));
        }
        auto cal = calendar_dummies(stamps);
        blocks.push_back(std::move(cal.day));
        blocks.push_back(std::move(cal.cday));
        blocks.push_back(std::move(cal.week));
        blocks.push_back(std::move(cal.cweek));
        blocks.push_back(periodic_annual_splines(stamps));

        Eigen::Index p = 0;
        for (const auto& b : blocks) {
            p += b.cols();
        }
        Eigen::MatrixXd X(R, p);
        Eigen::Index at = 0;
        for (const auto& b : blocks) {
            X.middleCols(at, b.cols()) = b.values;
            at += b.cols();
        }
        std::vector<double> y(m);
        for (std::size_t r = 0; r < m; ++r) {
            y[r] = options.response_scale * in.y[rows[r]];
        }
        const auto problem = lasso::Problem::from_dense(X.topRows(static_cast<Eigen::Index>(m)), y);
        auto lasso_options = options.lasso;
        if (lasso_options.max_active == 0) {
            lasso_options.max_active = m - 2;
        }
        const auto path = problem.fit_path(options.alphas, lasso_options);
        const auto& fit = lasso::select_bic(path, m);
        const Eigen::VectorXd x_new = X.row(R - 1).transpose();
        out[static_cast<std::size_t>(i)] = fit.predict(std::span<const double>(x_new.data(), static_cast<std::size_t>(x_new.size()))) /
                                           options.response_scale;
    }
    return out;
}

} // namespace sboa
