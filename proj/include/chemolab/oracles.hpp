#pragma once

// Independent reference computations for the tests and the acceptance suite.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chemolab/grid.hpp"

namespace chemolab::oracle {

/// Solves (I - c Delta_h) v = u by assembling the Neumann stencil matrix and
/// running Gaussian elimination with partial pivoting.
inline chemolab::Field dense_shifted_solve(const chemolab::Field& u, double c) {
    const chemolab::Grid& g = u.grid();
    const std::size_t n0 = g.count(0), n1 = g.count(1), n = g.size();
    std::vector<double> A(n * n, 0.0), b = u.values();
    const double w0 = c / (g.spacing(0) * g.spacing(0));
    const double w1 = g.dim() == 2 ? c / (g.spacing(1) * g.spacing(1)) : 0.0;
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            const std::size_t r = i * n1 + j;
            A[r * n + r] += 1.0;
            auto couple = [&](std::size_t other, double w) {
                A[r * n + r] += w;
                A[r * n + other] -= w;
            };
            if (i > 0) couple(r - n1, w0);
            if (i + 1 < n0) couple(r + n1, w0);
            if (g.dim() == 2) {
                if (j > 0) couple(r - 1, w1);
                if (j + 1 < n1) couple(r + 1, w1);
            }
        }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(A[r * n + k]) > std::abs(A[piv * n + k])) piv = r;
        if (A[piv * n + k] == 0.0) throw std::runtime_error("singular oracle matrix");
        if (piv != k) {
            for (std::size_t col = 0; col < n; ++col) std::swap(A[k * n + col], A[piv * n + col]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = A[r * n + k] / A[k * n + k];
            if (f == 0.0) continue;
            for (std::size_t col = k; col < n; ++col) A[r * n + col] -= f * A[k * n + col];
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t col = k + 1; col < n; ++col) s -= A[k * n + col] * x[col];
        x[k] = s / A[k * n + k];
    }
    return chemolab::Field(g, std::move(x));
}

/// Closed-form logistic solution of u' = u (1 - u).
inline double logistic_closed_form(double u0, double t) {
    const double e = std::exp(t);
    return u0 * e / (1.0 + u0 * (e - 1.0));
}

}  // namespace chemolab::oracle
