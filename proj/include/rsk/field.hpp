#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "rsk/canonical_tensor.hpp"
#include "rsk/grid.hpp"

namespace rsk {

enum class FieldRole { density, potential };

/// Dense n x n x n grid function, flat index ((i-1)n + (j-1))n + (k-1).
/// Canonical-format fields are densified on entry to this module; dense
/// fields are intended for n <= 257.
struct GridField {
    GridSpec grid;
    Eigen::VectorXd values;
    FieldRole role = FieldRole::density;

    GridField() = default;
    GridField(const GridSpec& g, FieldRole r = FieldRole::density)
        : grid(g), values(Eigen::VectorXd::Zero(static_cast<long>(g.n) * g.n * g.n)), role(r) {}
    GridField(const GridSpec& g, Eigen::VectorXd v, FieldRole r = FieldRole::density)
        : grid(g), values(std::move(v)), role(r) {
        if (values.size() != static_cast<long>(g.n) * g.n * g.n)
            throw std::invalid_argument("GridField: size mismatch");
    }

    static GridField from_tensor(const CanonicalTensor3& t, FieldRole r = FieldRole::density) {
        return GridField(t.grid, dense_of(t), r);
    }

    long flat(int i, int j, int k) const {  // 1-based
        return (static_cast<long>(i - 1) * grid.n + (j - 1)) * grid.n + (k - 1);
    }
    double at(int i, int j, int k) const { return values[flat(i, j, k)]; }
    double& at(int i, int j, int k) { return values[flat(i, j, k)]; }

    /// Trilinear interpolation at a physical point (cell-centered samples,
    /// clamped at the box faces).
    double interpolate(const Eigen::Vector3d& x) const {
        const int n = grid.n;
        const double h = grid.h();
        double w[3][2];
        int i0[3];
        for (int l = 0; l < 3; ++l) {
            double s = (x[l] + grid.b) / h - 0.5;  // continuous 0-based cell index
            if (s < 0) s = 0;
            if (s > n - 1) s = n - 1;
            int lo = static_cast<int>(s);
            if (lo > n - 2) lo = n - 2;
            i0[l] = lo;
            double f = s - lo;
            w[l][0] = 1.0 - f;
            w[l][1] = f;
        }
        double acc = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    acc += w[0][a] * w[1][b] * w[2][c] *
                           at(i0[0] + a + 1, i0[1] + b + 1, i0[2] + c + 1);
        return acc;
    }
};

/// Dense 7-point-stencil application of the Kronecker Laplacian A
/// (zero-Dirichlet): (A v)_ijk = (sum of 6 neighbors - 6 v_ijk)/h^2.
inline GridField apply_laplacian_dense(const GridField& f) {
    const int n = f.grid.n;
    const double ih2 = 1.0 / (f.grid.h() * f.grid.h());
    GridField out(f.grid, f.role);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                double acc = -6.0 * f.at(i, j, k);
                if (i > 1) acc += f.at(i - 1, j, k);
                if (i < n) acc += f.at(i + 1, j, k);
                if (j > 1) acc += f.at(i, j - 1, k);
                if (j < n) acc += f.at(i, j + 1, k);
                if (k > 1) acc += f.at(i, j, k - 1);
                if (k < n) acc += f.at(i, j, k + 1);
                out.at(i, j, k) = acc * ih2;
            }
    return out;
}

}  // namespace rsk
