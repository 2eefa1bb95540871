#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

#include "rsk/grid.hpp"

namespace rsk {

/// Rank-R canonical tensor on an n x n x n grid,
///   a[i1,i2,i3] = sum_q xi_q U1(i1,q) U2(i2,q) U3(i3,q),
/// with one n x R side matrix per mode (columns are the skeleton vectors).
/// Magnitudes are folded into the factors; xi carries signs and particle
/// charges. Tensors are immutable values in practice: every operation
/// returns a new tensor.
struct CanonicalTensor3 {
    GridSpec grid;
    std::array<Eigen::MatrixXd, 3> factors;  // each n x R
    Eigen::VectorXd coeffs;                  // length R

    CanonicalTensor3() = default;
    explicit CanonicalTensor3(const GridSpec& g, int rank = 0) : grid(g) {
        for (auto& U : factors) U = Eigen::MatrixXd::Zero(g.n, rank);
        coeffs = Eigen::VectorXd::Ones(rank);
    }

    int rank() const { return static_cast<int>(coeffs.size()); }
    int n() const { return grid.n; }

    double entry(const Index3& i) const {
        for (int l = 0; l < 3; ++l)
            if (i[l] < 1 || i[l] > grid.n) throw std::out_of_range("CanonicalTensor3::entry");
        double acc = 0.0;
        for (int q = 0; q < rank(); ++q)
            acc += coeffs[q] * factors[0](i[0] - 1, q) * factors[1](i[1] - 1, q) *
                   factors[2](i[2] - 1, q);
        return acc;
    }
};

/// Rank-additive sum: concatenates columns, preserving the operand order, so
/// no arithmetic is performed on the factors.
inline CanonicalTensor3 add(const CanonicalTensor3& a, const CanonicalTensor3& b) {
    if (a.grid != b.grid) throw std::invalid_argument("add: grid mismatch");
    CanonicalTensor3 out(a.grid, a.rank() + b.rank());
    for (int l = 0; l < 3; ++l) {
        out.factors[l].leftCols(a.rank()) = a.factors[l];
        out.factors[l].rightCols(b.rank()) = b.factors[l];
    }
    out.coeffs.head(a.rank()) = a.coeffs;
    out.coeffs.tail(b.rank()) = b.coeffs;
    return out;
}

inline CanonicalTensor3 scaled(const CanonicalTensor3& a, double c) {
    CanonicalTensor3 out = a;
    out.coeffs *= c;
    return out;
}

/// Full materialization, flat index ((i-1)*n + (j-1))*n + (k-1). Columns are
/// accumulated in storage order. Intended for oracles and small grids; cost
/// and memory are O(n^3 R).
inline Eigen::VectorXd dense_of(const CanonicalTensor3& t) {
    const int n = t.n();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(n) * n * n);
    for (int q = 0; q < t.rank(); ++q) {
        const auto u = t.factors[0].col(q);
        const auto v = t.factors[1].col(q);
        const auto w = t.factors[2].col(q);
        const double xi = t.coeffs[q];
        for (int i = 0; i < n; ++i) {
            const double a = xi * u[i];
            if (a == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                const double bcoef = a * v[j];
                if (bcoef == 0.0) continue;
                out.segment(static_cast<long>(i) * n * n + static_cast<long>(j) * n, n) +=
                    bcoef * w;
            }
        }
    }
    return out;
}

/// Frobenius norm squared via the Gram identity
///   ||a||^2 = sum_{q,q'} xi_q xi_q' prod_l <u_q^l, u_q'^l>,
/// never by densification.
inline double frobenius_norm_sq(const CanonicalTensor3& t) {
    const int R = t.rank();
    if (R == 0) return 0.0;
    Eigen::MatrixXd G = Eigen::MatrixXd::Ones(R, R);
    for (int l = 0; l < 3; ++l)
        G = G.cwiseProduct((t.factors[l].transpose() * t.factors[l]).eval());
    return t.coeffs.dot(G * t.coeffs);
}

inline double frobenius_norm(const CanonicalTensor3& t) {
    double s = frobenius_norm_sq(t);
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

}  // namespace rsk
