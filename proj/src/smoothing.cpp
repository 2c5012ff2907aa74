#include "sboa/smoothing.hpp"

#include "sboa/bspline.hpp"
#include "sboa/error.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace sboa {

Smoother Smoother::build(double lambda, int n_points, int n_knots) {
    if (!(lambda >= 0.0)) {
        throw ConfigError("smoothing lambda must be nonnegative");
    }
    if (n_points < 2 || n_knots < 2) {
        throw ConfigError("smoother needs at least two points and two knots");
    }
    Smoother s;
    s.lambda_ = lambda;
    const CubicBSplineBasis basis(0.0, 1.0, n_knots + 2);
    std::vector<double> x(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        x[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(n_points - 1);
    }
    s.basis_ = basis.evaluate(x);
    const auto n = static_cast<Eigen::Index>(n_points);
    const auto m = s.basis_.cols();
    if (std::isinf(lambda)) {
        s.hat_ = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
        return s;
    }
    if (lambda == 0.0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.basis_, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        const double tol = 1e-10 * sv[0];
        Eigen::Index rank = 0;
        while (rank < sv.size() && sv[rank] > tol) {
            ++rank;
        }
        if (rank < n) {
            throw NumericalError(fmt::format("unpenalized smoother is singular: basis rank {} < {} points; use at "
                                             "least {} knots",
                                             rank, n, n_points));
        }
        const auto U = svd.matrixU().leftCols(rank);
        s.hat_ = U * U.transpose();
    } else {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m - 1, m);
        for (Eigen::Index i = 0; i + 1 < m; ++i) {
            D(i, i) = -1.0;
            D(i, i + 1) = 1.0;
        }
        const Eigen::MatrixXd A = s.basis_.transpose() * s.basis_ + lambda * D.transpose() * D;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() != Eigen::Success) {
            throw NumericalError(fmt::format("smoother system is singular at lambda={}", lambda));
        }
        s.hat_ = s.basis_ * ldlt.solve(s.basis_.transpose());
    }
    s.hat_ = (0.5 * (s.hat_ + s.hat_.transpose())).eval();
    return s;
}

Eigen::MatrixXd smooth_weights(const Eigen::MatrixXd& w, const Smoother& smoother, bool simplex_repair) {
    Eigen::MatrixXd out = smoother.hat() * w;
    if (simplex_repair) {
        out = out.cwiseMax(0.0);
        for (Eigen::Index h = 0; h < out.rows(); ++h) {
            const double s = out.row(h).sum();
            if (s > 0.0) {
                out.row(h) /= s;
            } else {
                out.row(h).setConstant(1.0 / static_cast<double>(out.cols()));
            }
        }
    }
    return out;
}

double roughness(const Eigen::MatrixXd& w) {
    if (w.rows() < 2) {
        return 0.0;
    }
    return (w.bottomRows(w.rows() - 1) - w.topRows(w.rows() - 1)).squaredNorm();
}

} // namespace sboa
