#pragma once

#include "sboa/design_matrix.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace sboa::lasso {

struct Options {
    // Convergence: largest coefficient change in one sweep, on the
    // standardized scale and relative to sd(y).
    double tol = 1e-7;
    long max_sweeps = 100000;
    // On non-convergence return the fits of the larger alphas instead of
    // throwing (the first alpha must still converge).
    bool truncate_on_failure = false;
    // The path ends once more coefficients than this are nonzero (0: no limit).
    std::size_t max_active = 0;
};

/// One point on a regularization path. Coefficients are on the original
/// column scale; columns with zero variance have coefficient exactly 0.
struct Fit {
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    double alpha = 0.0;
    int df = 0;
    double rss = 0.0;
    long sweeps = 0;

    double predict(std::span<const double> x) const;
};

struct Standardized {
    Eigen::MatrixXd x;
    Eigen::VectorXd centers;
    Eigen::VectorXd scales;
    std::vector<std::uint8_t> constant;
};

// Columns centered to mean 0 and scaled to unit (population) standard
// deviation. Zero-variance columns are flagged, centered and left unscaled.
Standardized standardize(const Eigen::MatrixXd& x);

/// Sufficient statistics of a lasso problem
///   min_b (1/2n) |y_c - X_s b|^2 + alpha |b|_1
/// with X_s the standardized design and y_c the centered response. Only the
/// p x p correlation matrix is kept, so fits cost O(p^2) per sweep
/// regardless of n.
class Problem {
public:
    // Rows with row_mask[i] == 0 are excluded; `cols` selects and orders columns.
    static Problem from_design(const DesignMatrix& design, std::span<const double> y,
                               std::span<const std::uint8_t> row_mask, std::span<const std::size_t> cols);
    static Problem from_dense(const Eigen::MatrixXd& x, std::span<const double> y);

    std::size_t n() const { return n_; }
    std::size_t p() const { return static_cast<std::size_t>(centers_.size()); }
    std::span<const std::uint8_t> constant() const { return constant_; }

    // Smallest alpha giving the all-zero solution: max_j |X_j' y_c| / n.
    double alpha_max() const;

    // Warm-started path over `alphas` (any order; descending is efficient).
    std::vector<Fit> fit_path(std::span<const double> alphas, const Options& options = {}) const;

private:
    Problem() = default;
    void finish(const Eigen::MatrixXd& cross, const Eigen::VectorXd& xy);

    std::size_t n_ = 0;
    double y_mean_ = 0.0;
    double y_sd_ = 0.0;
    double yy_ = 0.0; // y_c'y_c / n
    Eigen::VectorXd centers_;
    Eigen::VectorXd scales_;
    std::vector<std::uint8_t> constant_;
    std::vector<Eigen::Index> active_; // non-constant columns
    Eigen::MatrixXd corr_;             // standardized Gram over active_
    Eigen::VectorXd b_;                // X_s' y_c / n over active_
};

// Descending grid of `count` values from alpha_max down to alpha_max * ratio.
std::vector<double> log_grid(double alpha_max, double ratio, int count);

// Minimizes n log(rss/n) + df log(n); ties go to the earlier (larger alpha) fit.
const Fit& select_bic(std::span<const Fit> path, std::size_t n);
double bic(const Fit& fit, std::size_t n);

} // namespace sboa::lasso
