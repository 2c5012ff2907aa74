#pragma once

// Textbook dense linear algebra on row-major std::vector matrices.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

inline Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, Vector(c, 0.0)); }

inline Matrix transpose(const Matrix& a) {
    Matrix t = zeros(a.empty() ? 0 : a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            t[j][i] = a[i][j];
        }
    }
    return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix c = zeros(a.size(), b[0].size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (std::size_t j = 0; j < b[0].size(); ++j) {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return c;
}

// Gaussian elimination with partial pivoting; B holds the right-hand sides
// as columns.
inline Matrix solve(Matrix a, Matrix b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        if (a[piv][col] == 0.0) {
            throw std::runtime_error("singular system");
        }
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
            for (std::size_t c = 0; c < b[r].size(); ++c) {
                b[r][c] -= f * b[col][c];
            }
        }
    }
    Matrix x = zeros(n, b[0].size());
    for (std::size_t c = 0; c < b[0].size(); ++c) {
        for (std::size_t i = n; i-- > 0;) {
            double s = b[i][c];
            for (std::size_t j = i + 1; j < n; ++j) {
                s -= a[i][j] * x[j][c];
            }
            x[i][c] = s / a[i][i];
        }
    }
    return x;
}

inline Vector solve(const Matrix& a, const Vector& b) {
    Matrix rhs = zeros(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) {
        rhs[i][0] = b[i];
    }
    const Matrix x = solve(a, rhs);
    Vector out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[i] = x[i][0];
    }
    return out;
}

// Least squares with an intercept through the normal equations. Returns
// (intercept, slopes).
inline std::pair<double, Vector> least_squares(const Matrix& x, const Vector& y) {
    const std::size_t n = x.size();
    const std::size_t p = x[0].size();
    Matrix a = zeros(p + 1, p + 1);
    Vector b(p + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Vector row(p + 1, 1.0);
        for (std::size_t j = 0; j < p; ++j) {
            row[j + 1] = x[i][j];
        }
        for (std::size_t r = 0; r <= p; ++r) {
            b[r] += row[r] * y[i];
            for (std::size_t c = 0; c <= p; ++c) {
                a[r][c] += row[r] * row[c];
            }
        }
    }
    const Vector beta = solve(a, b);
    return {beta[0], Vector(beta.begin() + 1, beta.end())};
}

} // namespace oracle
