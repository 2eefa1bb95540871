#pragma once

// Independent numeric oracles for the test suite: adaptive quadrature,
// dense tensor algebra, and a dense 7-point stencil. These deliberately
// avoid the library's own evaluation paths.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rsk/canonical_tensor.hpp"
#include "rsk/field.hpp"

namespace oracle {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Dense materialization by direct triple loop over entries (independent of
/// rsk::dense_of's accumulation order).
inline Eigen::VectorXd densify(const rsk::CanonicalTensor3& t) {
    const int n = t.n();
    Eigen::VectorXd out(static_cast<long>(n) * n * n);
    long idx = 0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) out[idx++] = t.entry({i, j, k});
    return out;
}

/// 7-point Dirichlet stencil on a dense array, written independently of the
/// library implementation.
inline Eigen::VectorXd stencil_laplacian(const Eigen::VectorXd& v, int n, double h) {
    auto at = [&](int i, int j, int k) -> double {
        if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k >= n) return 0.0;
        return v[(static_cast<long>(i) * n + j) * n + k];
    };
    Eigen::VectorXd out(v.size());
    const double ih2 = 1.0 / (h * h);
    long idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                out[idx++] = ih2 * (at(i - 1, j, k) + at(i + 1, j, k) + at(i, j - 1, k) +
                                    at(i, j + 1, k) + at(i, j, k - 1) + at(i, j, k + 1) -
                                    6.0 * at(i, j, k));
    return out;
}

/// Random canonical tensor with entries in [-1, 1], fixed seed.
inline rsk::CanonicalTensor3 random_tensor(const rsk::GridSpec& g, int rank,
                                           std::uint64_t seed = 42) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    rsk::CanonicalTensor3 t(g, rank);
    for (int l = 0; l < 3; ++l)
        for (int q = 0; q < rank; ++q)
            for (int i = 0; i < g.n; ++i) t.factors[l](i, q) = uni(rng);
    return t;
}

/// Potential of a radial density rho(s) at radius r via the shell theorem,
///   u(r) = (1/r) int_0^r s^2 rho(s) ds + int_r^inf s rho(s) ds,
/// evaluated by adaptive quadrature (equals (1/4pi) int rho(|y|)/|x-y| dy).
inline double radial_potential(const std::function<double(double)>& rho, double r, double rmax) {
    const double inner =
        adaptive_simpson([&](double s) { return s * s * rho(s); }, 0.0, r, 1e-14);
    const double outer = adaptive_simpson([&](double s) { return s * rho(s); }, r, rmax, 1e-14);
    return inner / r + outer;
}

}  // namespace oracle
