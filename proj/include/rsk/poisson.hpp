#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rsk/field.hpp"
#include "rsk/range_separation.hpp"

namespace rsk {

namespace detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Orthonormal (and symmetric, hence involutory) discrete sine basis of the
/// Dirichlet tridiagonal: S_ij = sqrt(2/(n+1)) sin(i j pi/(n+1)).
inline Eigen::MatrixXd sine_basis(int n) {
    Eigen::MatrixXd S(n, n);
    const double c = std::sqrt(2.0 / (n + 1));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            S(i - 1, j - 1) = c * std::sin(M_PI * i * j / (n + 1));
    return S;
}

/// In-place mode-wise multiplication of the flat field by the symmetric S.
inline void mode_transform(Eigen::VectorXd& v, const Eigen::MatrixXd& S, int n) {
    Eigen::Map<RowMat> M1(v.data(), n, static_cast<long>(n) * n);
    M1 = (S * M1).eval();
    for (int i = 0; i < n; ++i) {
        Eigen::Map<RowMat> slab(v.data() + static_cast<long>(i) * n * n, n, n);
        slab = (S * slab).eval();
    }
    Eigen::Map<RowMat> M3(v.data(), static_cast<long>(n) * n, n);
    M3 = (M3 * S).eval();
}

}  // namespace detail

/// Solve the zero-Dirichlet discrete Poisson problem (-A) u = f by
/// diagonalizing the univariate tridiagonal in its sine eigenbasis and
/// dividing by the positive eigenvalue sums. Relative residual is at solver
/// precision (<= 1e-10 contract).
inline GridField solve_poisson_dirichlet(const GridField& f) {
    const int n = f.grid.n;
    const double ih2 = 1.0 / (f.grid.h() * f.grid.h());
    Eigen::MatrixXd S = detail::sine_basis(n);
    Eigen::VectorXd lambda(n);  // eigenvalues of -D2, positive
    for (int j = 1; j <= n; ++j) lambda[j - 1] = (2.0 - 2.0 * std::cos(M_PI * j / (n + 1))) * ih2;

    Eigen::VectorXd v = f.values;
    detail::mode_transform(v, S, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const long base = (static_cast<long>(i) * n + j) * n;
            const double lij = lambda[i] + lambda[j];
            for (int k = 0; k < n; ++k) v[base + k] /= lij + lambda[k];
        }
    detail::mode_transform(v, S, n);
    return GridField(f.grid, std::move(v), FieldRole::potential);
}

/// Discrete convolution u_s = K * f with a compactly supported canonical
/// kernel K (local window tensor, half-width gamma cells): per rank term,
/// three sequential 1D convolutions. The Galerkin kernel entries are cell
/// integrals, so they already carry the h^3 volume element of
/// u_s(x_i) = h^3 sum_j K(x_i - x_j) f_j. Support of the result is supp(f)
/// dilated by gamma cells per mode, with no leakage beyond the window.
inline GridField short_convolve(const CanonicalTensor3& shortKernel, const GridField& f) {
    const int n = f.grid.n;
    const int L = shortKernel.n();
    if (L % 2 == 0) throw std::invalid_argument("short_convolve: kernel window must be odd");
    const int g = (L - 1) / 2;
    if (std::abs(shortKernel.grid.h() - f.grid.h()) > 1e-12 * f.grid.h())
        throw std::invalid_argument("short_convolve: mesh size mismatch");

    const long n3 = static_cast<long>(n) * n * n;
    auto conv_mode = [&](const Eigen::VectorXd& in, const Eigen::VectorXd& ker, int mode) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n3);
        // strides of the three modes in the flat layout
        const long stride = mode == 0 ? static_cast<long>(n) * n : (mode == 1 ? n : 1);
        const long outer = n3 / n;
        for (long line = 0; line < outer; ++line) {
            // base offset of this 1D line
            long rem = line;
            long base = 0;
            for (int l = 0, seen = 0; l < 3; ++l) {
                if (l == mode) continue;
                const long str = l == 0 ? static_cast<long>(n) * n : (l == 1 ? n : 1);
                const long idx = (seen == 0) ? rem / n : rem % n;
                base += idx * str;
                ++seen;
            }
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                const int dlo = std::max(-g, i - (n - 1));
                const int dhi = std::min(g, i);
                for (int d = dlo; d <= dhi; ++d) acc += ker[g + d] * in[base + (i - d) * stride];
                out[base + i * stride] = acc;
            }
        }
        return out;
    };

    GridField u(f.grid, FieldRole::potential);
    for (int q = 0; q < shortKernel.rank(); ++q) {
        Eigen::VectorXd tmp = conv_mode(f.values, shortKernel.factors[0].col(q), 0);
        tmp = conv_mode(tmp, shortKernel.factors[1].col(q), 1);
        tmp = conv_mode(tmp, shortKernel.factors[2].col(q), 2);
        u.values += shortKernel.coeffs[q] * tmp;
    }
    return u;
}

/// Modified right-hand side of the regularized scheme: fbar = f + A u_s.
inline GridField modified_rhs(const GridField& f, const GridField& u_s) {
    if (f.grid != u_s.grid) throw std::invalid_argument("modified_rhs: grid mismatch");
    GridField lap = apply_laplacian_dense(u_s);
    GridField out(f.grid, FieldRole::density);
    out.values = f.values + lap.values;
    return out;
}

struct RegularizedReport {
    double suppFDistance = 0.0;     // dist(supp f, box boundary), physical units
    double suppFbarDistance = 0.0;  // dist(supp fbar, box boundary)
    double usBoundaryMax = 0.0;     // max |u_s| on the boundary cells
    double residual = 0.0;          // ||A u + f|| / ||f||  for the composed solution
    double maxRelDiffVsDirect = 0.0;
    bool distanceHypothesisHolds = true;
    int gamma = 0;
};

namespace detail {

inline double support_distance_to_boundary(const GridField& f, double threshold = 0.0) {
    const int n = f.grid.n;
    double minDist = f.grid.b;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                if (std::abs(f.at(i, j, k)) <= threshold) continue;
                const double d =
                    f.grid.b - std::max({std::abs(f.grid.center(i)), std::abs(f.grid.center(j)),
                                         std::abs(f.grid.center(k))});
                minDist = std::min(minDist, d);
            }
    return minDist;
}

inline double boundary_max_abs(const GridField& f) {
    const int n = f.grid.n;
    double m = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                if (i != 1 && i != n && j != 1 && j != n && k != 1 && k != n) continue;
                m = std::max(m, std::abs(f.at(i, j, k)));
            }
    return m;
}

}  // namespace detail

/// Regularized Poisson solve: u = u_s + ubar with u_s the short-range
/// convolution and ubar the Dirichlet solution of the modified (smooth)
/// right-hand side. Algebraically identical to the direct solve; the report
/// carries support distances, the solver residual, and the direct-solve
/// comparison. `shortKernel` is the windowed short-range reference tensor.
inline std::pair<GridField, RegularizedReport> regularized_poisson(
    const GridField& f, const CanonicalTensor3& shortKernel) {
    RegularizedReport rep;
    rep.gamma = (shortKernel.n() - 1) / 2;

    GridField u_s = short_convolve(shortKernel, f);
    GridField fbar = modified_rhs(f, u_s);
    GridField ubar = solve_poisson_dirichlet(fbar);

    GridField u(f.grid, FieldRole::potential);
    u.values = u_s.values + ubar.values;

    const double sigmaEff = rep.gamma * f.grid.h();
    rep.suppFDistance = detail::support_distance_to_boundary(f);
    rep.suppFbarDistance =
        detail::support_distance_to_boundary(fbar, 1e-14 * fbar.values.cwiseAbs().maxCoeff());
    rep.usBoundaryMax = detail::boundary_max_abs(u_s);
    rep.distanceHypothesisHolds = rep.suppFDistance > sigmaEff;

    GridField direct = solve_poisson_dirichlet(f);
    const double denom = direct.values.cwiseAbs().maxCoeff();
    rep.maxRelDiffVsDirect =
        denom > 0 ? (u.values - direct.values).cwiseAbs().maxCoeff() / denom : 0.0;

    GridField lap = apply_laplacian_dense(u);
    rep.residual = (lap.values + f.values).norm() / std::max(f.values.norm(), 1e-300);
    return {std::move(u), rep};
}

}  // namespace rsk
