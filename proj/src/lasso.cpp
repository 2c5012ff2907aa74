#include "sboa/lasso.hpp"

#include "sboa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace sboa::lasso {

namespace {

constexpr Eigen::Index kRowBlock = 1024;

bool is_constant(double var, double mean_sq) { return !(var > 1e-13 * std::max(mean_sq, 1e-300)) || var <= 0.0; }

double soft_threshold(double z, double alpha) {
    if (z > alpha) {
        return z - alpha;
    }
    if (z < -alpha) {
        return z + alpha;
    }
    return 0.0;
}

} // namespace

double Fit::predict(std::span<const double> x) const {
    double s = intercept;
    for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
        if (coefficients[j] != 0.0) {
            s += coefficients[j] * x[static_cast<std::size_t>(j)];
        }
    }
    return s;
}

Standardized standardize(const Eigen::MatrixXd& x) {
    Standardized out;
    const auto n = static_cast<double>(x.rows());
    out.centers = x.colwise().mean().transpose();
    out.x = x.rowwise() - out.centers.transpose();
    out.scales.resize(x.cols());
    out.constant.assign(static_cast<std::size_t>(x.cols()), 0);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = out.x.col(j).squaredNorm() / n;
        if (is_constant(var, out.centers[j] * out.centers[j])) {
            out.constant[static_cast<std::size_t>(j)] = 1;
            out.scales[j] = 1.0;
            out.x.col(j).setZero();
        } else {
            out.scales[j] = std::sqrt(var);
            out.x.col(j) /= out.scales[j];
        }
    }
    return out;
}

Problem Problem::from_design(const DesignMatrix& design, std::span<const double> y,
                             std::span<const std::uint8_t> row_mask, std::span<const std::size_t> cols) {
    if (y.size() != design.rows() || row_mask.size() != design.rows()) {
        throw DataError("lasso problem: response and row mask must match the design rows");
    }
    const auto X = design.matrix();
    const auto* outer = X.outerIndexPtr();
    const auto* inner = X.innerIndexPtr();
    const auto* vals = X.valuePtr();

    Problem pr;
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < design.rows(); ++i) {
        if (row_mask[i] && !std::isnan(y[i])) {
            rows.push_back(static_cast<Eigen::Index>(i));
        }
    }
    pr.n_ = rows.size();
    if (pr.n_ < 2) {
        throw DataError("lasso problem needs at least two usable rows");
    }
    const double n = static_cast<double>(pr.n_);
    std::vector<std::uint8_t> use(design.rows(), 0);
    double ysum = 0.0;
    for (auto r : rows) {
        use[static_cast<std::size_t>(r)] = 1;
        ysum += y[static_cast<std::size_t>(r)];
    }
    pr.y_mean_ = ysum / n;

    const auto p = static_cast<Eigen::Index>(cols.size());
    pr.centers_.setZero(p);
    pr.scales_.setOnes(p);
    pr.constant_.assign(cols.size(), 0);
    Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto c = cols[static_cast<std::size_t>(j)];
        double s = 0.0, ss = 0.0;
        for (int q = outer[c]; q < outer[c + 1]; ++q) {
            if (use[static_cast<std::size_t>(inner[q])]) {
                s += vals[q];
                ss += vals[q] * vals[q];
            }
        }
        pr.centers_[j] = s / n;
        sumsq[j] = ss;
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const double var = sumsq[j] / n - pr.centers_[j] * pr.centers_[j];
        if (is_constant(var, sumsq[j] / n)) {
            pr.constant_[static_cast<std::size_t>(j)] = 1;
        } else {
            pr.active_.push_back(j);
        }
    }
    const auto pa = static_cast<Eigen::Index>(pr.active_.size());

    // Accumulate centered cross products over dense row blocks.
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(pa, pa);
    Eigen::VectorXd xy = Eigen::VectorXd::Zero(pa);
    std::vector<int> cursor(static_cast<std::size_t>(pa));
    for (Eigen::Index a = 0; a < pa; ++a) {
        cursor[static_cast<std::size_t>(a)] = outer[cols[static_cast<std::size_t>(pr.active_[static_cast<std::size_t>(a)])]];
    }
    std::vector<Eigen::Index> slot(design.rows(), -1);
    Eigen::MatrixXd block;
    Eigen::VectorXd yblock;
    for (std::size_t start = 0; start < rows.size(); start += kRowBlock) {
        const std::size_t stop = std::min(rows.size(), start + static_cast<std::size_t>(kRowBlock));
        const auto m = static_cast<Eigen::Index>(stop - start);
        block.resize(m, pa);
        yblock.resize(m);
        for (std::size_t i = start; i < stop; ++i) {
            slot[static_cast<std::size_t>(rows[i])] = static_cast<Eigen::Index>(i - start);
            yblock[static_cast<Eigen::Index>(i - start)] = y[static_cast<std::size_t>(rows[i])] - pr.y_mean_;
        }
        const int last_row = static_cast<int>(rows[stop - 1]);
        for (Eigen::Index a = 0; a < pa; ++a) {
            const auto j = pr.active_[static_cast<std::size_t>(a)];
            block.col(a).setConstant(-pr.centers_[j]);
            const auto c = cols[static_cast<std::size_t>(j)];
            int& q = cursor[static_cast<std::size_t>(a)];
            while (q < outer[c + 1] && inner[q] <= last_row) {
                const auto s = slot[static_cast<std::size_t>(inner[q])];
                if (s >= 0 && use[static_cast<std::size_t>(inner[q])]) {
                    block(s, a) += vals[q];
                }
                ++q;
            }
        }
        cross.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
        xy.noalias() += block.transpose() * yblock;
        for (std::size_t i = start; i < stop; ++i) {
            slot[static_cast<std::size_t>(rows[i])] = -1;
        }
    }
    cross.triangularView<Eigen::StrictlyUpper>() = cross.transpose();

    double yy = 0.0;
    for (auto r : rows) {
        const double d = y[static_cast<std::size_t>(r)] - pr.y_mean_;
        yy += d * d;
    }
    pr.yy_ = yy / n;
    for (Eigen::Index a = 0; a < pa; ++a) {
        const auto j = pr.active_[static_cast<std::size_t>(a)];
        pr.scales_[j] = std::sqrt(cross(a, a) / n);
    }
    pr.finish(cross, xy);
    return pr;
}

Problem Problem::from_dense(const Eigen::MatrixXd& x, std::span<const double> y) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        throw DataError("lasso problem: response length must match the design rows");
    }
    Problem pr;
    pr.n_ = static_cast<std::size_t>(x.rows());
    if (pr.n_ < 2) {
        throw DataError("lasso problem needs at least two rows");
    }
    const double n = static_cast<double>(pr.n_);
    // aligned copy
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), x.rows());
    pr.y_mean_ = yv.mean();
    const Eigen::VectorXd yc = yv.array() - pr.y_mean_;
    pr.yy_ = yc.squaredNorm() / n;
    auto st = standardize(x);
    pr.centers_ = st.centers;
    pr.scales_ = st.scales;
    pr.constant_ = st.constant;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!pr.constant_[static_cast<std::size_t>(j)]) {
            pr.active_.push_back(j);
        }
    }
    const auto pa = static_cast<Eigen::Index>(pr.active_.size());
    Eigen::MatrixXd centered(x.rows(), pa);
    for (Eigen::Index a = 0; a < pa; ++a) {
        centered.col(a) = st.x.col(pr.active_[static_cast<std::size_t>(a)]) * st.scales[pr.active_[static_cast<std::size_t>(a)]];
    }
    Eigen::MatrixXd cross = centered.transpose() * centered;
    Eigen::VectorXd xy = centered.transpose() * yc;
    pr.finish(cross, xy);
    return pr;
}

void Problem::finish(const Eigen::MatrixXd& cross, const Eigen::VectorXd& xy) {
    const double n = static_cast<double>(n_);
    const auto pa = static_cast<Eigen::Index>(active_.size());
    Eigen::VectorXd inv(pa);
    for (Eigen::Index a = 0; a < pa; ++a) {
        inv[a] = 1.0 / scales_[active_[static_cast<std::size_t>(a)]];
    }
    corr_ = (inv.asDiagonal() * cross * inv.asDiagonal()) / n;
    b_ = inv.asDiagonal() * xy / n;
    y_sd_ = std::sqrt(yy_);
}

double Problem::alpha_max() const { return b_.size() == 0 ? 0.0 : b_.cwiseAbs().maxCoeff(); }

std::vector<Fit> Problem::fit_path(std::span<const double> alphas, const Options& options) const {
    const auto pa = static_cast<Eigen::Index>(active_.size());
    const double n = static_cast<double>(n_);
    const double tol = options.tol * (y_sd_ > 0.0 ? y_sd_ : 1.0);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(pa);
    Eigen::VectorXd grad = b_; // X_s'(y_c - X_s beta)/n
    std::vector<Fit> path;
    path.reserve(alphas.size());
    long sweeps = 0;
    std::vector<Eigen::Index> active_set;

    auto update = [&](Eigen::Index j, double alpha) {
        const double sjj = corr_(j, j);
        const double old = beta[j];
        const double fresh = soft_threshold(grad[j] + sjj * old, alpha) / sjj;
        const double delta = fresh - old;
        if (delta != 0.0) {
            grad.noalias() -= delta * corr_.col(j);
            beta[j] = fresh;
        }
        return std::abs(delta);
    };

    for (double alpha : alphas) {
        if (!(alpha >= 0.0)) {
            throw ConfigError("lasso penalty must be nonnegative");
        }
        double last_delta = 0.0;
        long alpha_sweeps = 0;
        auto check = [&]() {
            ++sweeps;
            if (++alpha_sweeps > options.max_sweeps) {
                throw NumericalError(fmt::format("lasso did not converge at alpha={} after {} sweeps (last max change {})",
                                                 alpha, options.max_sweeps, last_delta));
            }
        };
        try {
            while (true) {
                double full = 0.0;
                for (Eigen::Index j = 0; j < pa; ++j) {
                    full = std::max(full, update(j, alpha));
                }
                last_delta = full;
                check();
                if (full < tol) {
                    break;
                }
                active_set.clear();
                for (Eigen::Index j = 0; j < pa; ++j) {
                    if (beta[j] != 0.0) {
                        active_set.push_back(j);
                    }
                }
                // Sweeps over the active set only touch the active block of the
                // gradient; the full gradient is rebuilt afterwards.
                if (options.max_active > 0 && active_set.size() > options.max_active) {
                    throw NumericalError(fmt::format("lasso active set exceeds {} at alpha={}", options.max_active, alpha));
                }
                const auto na = static_cast<Eigen::Index>(active_set.size());
                Eigen::MatrixXd c_aa(na, na);
                Eigen::VectorXd g_a(na), b_a(na);
                for (Eigen::Index a = 0; a < na; ++a) {
                    for (Eigen::Index c = 0; c < na; ++c) {
                        c_aa(c, a) = corr_(active_set[static_cast<std::size_t>(c)], active_set[static_cast<std::size_t>(a)]);
                    }
                    g_a[a] = grad[active_set[static_cast<std::size_t>(a)]];
                    b_a[a] = beta[active_set[static_cast<std::size_t>(a)]];
                }
                while (true) {
                    double d = 0.0;
                    for (Eigen::Index a = 0; a < na; ++a) {
                        const double sjj = c_aa(a, a);
                        const double old = b_a[a];
                        const double fresh = soft_threshold(g_a[a] + sjj * old, alpha) / sjj;
                        const double delta = fresh - old;
                        if (delta != 0.0) {
                            g_a.noalias() -= delta * c_aa.col(a);
                            b_a[a] = fresh;
                            d = std::max(d, std::abs(delta));
                        }
                    }
                    last_delta = d;
                    check();
                    if (d < tol) {
                        break;
                    }
                }
                for (Eigen::Index a = 0; a < na; ++a) {
                    beta[active_set[static_cast<std::size_t>(a)]] = b_a[a];
                }
                grad.noalias() = b_ - corr_ * beta;
            }
        } catch (const NumericalError& e) {
            if (!options.truncate_on_failure || path.empty()) {
                throw;
            }
            spdlog::debug("lasso path truncated: {}", e.what());
            break;
        }

        spdlog::trace("lasso alpha {:.4g}: {} sweeps", alpha, alpha_sweeps);
        Fit fit;
        fit.alpha = alpha;
        fit.sweeps = sweeps;
        fit.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p()));
        fit.intercept = y_mean_;
        for (Eigen::Index a = 0; a < pa; ++a) {
            if (beta[a] != 0.0) {
                const auto j = active_[static_cast<std::size_t>(a)];
                const double coef = beta[a] / scales_[j];
                fit.coefficients[j] = coef;
                fit.intercept -= coef * centers_[j];
                ++fit.df;
            }
        }
        // rss/n = yy - 2 beta'b + beta'S beta = yy - beta'(b + grad)
        const double rss_n = yy_ - beta.dot(b_ + grad);
        fit.rss = std::max(rss_n, 0.0) * n;
        path.push_back(std::move(fit));
    }
    return path;
}

std::vector<double> log_grid(double alpha_max, double ratio, int count) {
    std::vector<double> out;
    if (count <= 0) {
        return out;
    }
    if (count == 1) {
        return {alpha_max};
    }
    const double lmax = std::log(alpha_max);
    const double lmin = std::log(alpha_max * ratio);
    for (int i = 0; i < count; ++i) {
        out.push_back(std::exp(lmax + (lmin - lmax) * static_cast<double>(i) / static_cast<double>(count - 1)));
    }
    return out;
}

double bic(const Fit& fit, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double rss = std::max(fit.rss, std::numeric_limits<double>::min());
    return nn * std::log(rss / nn) + static_cast<double>(fit.df) * std::log(nn);
}

const Fit& select_bic(std::span<const Fit> path, std::size_t n) {
    if (path.empty()) {
        throw DataError("select_bic on an empty path");
    }
    std::size_t best = 0;
    double best_value = bic(path[0], n);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double v = bic(path[i], n);
        if (v < best_value) {
            best = i;
            best_value = v;
        }
    }
    return path[best];
}

} // namespace sboa::lasso
