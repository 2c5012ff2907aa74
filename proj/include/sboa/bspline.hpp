#pragma once

#include <Eigen/Dense>

#include <span>

namespace sboa {

// Cardinal cubic B-spline with support [0, 4).
double cardinal_cubic(double x);

/// Cubic B-spline basis on equidistant knots over [lo, hi] with the knot
/// grid padded by three knots on each side, so the basis is a partition of
/// unity on the whole interval. Inputs outside [lo, hi] are clamped.
class CubicBSplineBasis {
public:
    CubicBSplineBasis(double lo, double hi, int n_basis);

    int size() const { return n_basis_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    void evaluate(double x, std::span<double> out) const;
    Eigen::MatrixXd evaluate(std::span<const double> x) const;

private:
    double lo_;
    double hi_;
    int n_basis_;
    double step_;
};

/// Periodic cubic B-splines with `n_basis` functions on an equidistant grid
/// over [0, period), wrapped around.
class PeriodicCubicBasis {
public:
    PeriodicCubicBasis(double period, int n_basis);

    int size() const { return n_basis_; }
    double period() const { return period_; }
    void evaluate(double phase, std::span<double> out) const;

private:
    double period_;
    int n_basis_;
};

} // namespace sboa
