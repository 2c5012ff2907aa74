#include "sboa/bspline.hpp"

#include "sboa/error.hpp"

#include <algorithm>
#include <cmath>

namespace sboa {

double cardinal_cubic(double x) {
    if (x < 0.0 || x >= 4.0) {
        return 0.0;
    }
    if (x < 1.0) {
        return x * x * x / 6.0;
    }
    if (x < 2.0) {
        return (((-3.0 * x + 12.0) * x - 12.0) * x + 4.0) / 6.0;
    }
    if (x < 3.0) {
        return (((3.0 * x - 24.0) * x + 60.0) * x - 44.0) / 6.0;
    }
    const double r = 4.0 - x;
    return r * r * r / 6.0;
}

CubicBSplineBasis::CubicBSplineBasis(double lo, double hi, int n_basis) : lo_(lo), hi_(hi), n_basis_(n_basis) {
    if (n_basis < 4) {
        throw ConfigError("a cubic B-spline basis needs at least 4 functions");
    }
    if (!(hi > lo)) {
        throw ConfigError("B-spline range must have hi > lo");
    }
    step_ = (hi - lo) / static_cast<double>(n_basis - 3);
}

void CubicBSplineBasis::evaluate(double x, std::span<double> out) const {
    const double u = (std::clamp(x, lo_, hi_) - lo_) / step_;
    for (int j = 0; j < n_basis_; ++j) {
        out[static_cast<std::size_t>(j)] = cardinal_cubic(u - static_cast<double>(j) + 3.0);
    }
}

Eigen::MatrixXd CubicBSplineBasis::evaluate(std::span<const double> x) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(x.size()), n_basis_);
    std::vector<double> row(static_cast<std::size_t>(n_basis_));
    for (std::size_t i = 0; i < x.size(); ++i) {
        evaluate(x[i], row);
        for (int j = 0; j < n_basis_; ++j) {
            out(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

PeriodicCubicBasis::PeriodicCubicBasis(double period, int n_basis) : period_(period), n_basis_(n_basis) {
    if (n_basis < 4) {
        throw ConfigError("a periodic cubic basis needs at least 4 functions");
    }
}

void PeriodicCubicBasis::evaluate(double phase, std::span<double> out) const {
    double u = std::fmod(phase, period_);
    if (u < 0.0) {
        u += period_;
    }
    u *= static_cast<double>(n_basis_) / period_;
    const double n = static_cast<double>(n_basis_);
    for (int j = 0; j < n_basis_; ++j) {
        double a = u - static_cast<double>(j);
        if (a < 0.0) {
            a += n;
        }
        out[static_cast<std::size_t>(j)] = cardinal_cubic(a);
    }
}

} // namespace sboa
