#pragma once

#include <Eigen/Dense>

#include <limits>

namespace sboa {

inline constexpr double kInfiniteLambda = std::numeric_limits<double>::infinity();

/// Cubic P-spline smoother over the 24 horizon positions. The basis lives on
/// `n_knots` equidistant knots over [0, 1] (n_knots + 2 cubic B-splines),
/// the penalty is on first differences of the coefficients. An infinite
/// lambda smooths to the mean.
class Smoother {
public:
    static Smoother build(double lambda, int n_points = 24, int n_knots = 24);

    double lambda() const { return lambda_; }
    const Eigen::MatrixXd& basis() const { return basis_; }
    const Eigen::MatrixXd& hat() const { return hat_; }

private:
    double lambda_ = 0.0;
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd hat_;
};

// Applies the hat matrix to each column (expert) of w (horizons x experts).
// With repair, negative values are clipped and each row renormalized to sum 1.
Eigen::MatrixXd smooth_weights(const Eigen::MatrixXd& w, const Smoother& smoother, bool simplex_repair = true);

// Sum over rows of squared successive differences, per column, summed.
double roughness(const Eigen::MatrixXd& w);

} // namespace sboa
