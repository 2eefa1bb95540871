#pragma once

#include <cmath>
#include <stdexcept>

#include "rsk/canonical_tensor.hpp"
#include "rsk/grid.hpp"
#include "rsk/quadrature.hpp"

namespace rsk {

/// Exact integral of exp(-t^2 x^2) over one cell [lo, hi] of the
/// piecewise-constant basis,
///   (sqrt(pi)/(2t)) (erf(t hi) - erf(t lo)),
/// with the t -> 0 limit (hi - lo).
inline double gaussian_cell_integral(double t, double lo, double hi) {
    if (t < 1e-10) return hi - lo;
    return 0.5 * std::sqrt(M_PI) / t * (std::erf(t * hi) - std::erf(t * lo));
}

/// Galerkin projection of the Gaussian sum onto the grid: factor column q of
/// every mode is p_q^{1/3} [ int_{cell i} exp(-t_q^2 x^2) dx ]_i. The kernel
/// is centered at the origin, so the three side matrices are identical. The
/// kernel scale is folded in as |scale|^{1/3} per mode with its sign carried
/// by the coefficient vector.
inline CanonicalTensor3 project_kernel(const QuadratureRule& rule, const GridSpec& grid) {
    const int n = grid.n;
    const int R = rule.rank();
    const double h = grid.h();
    const double mag = std::cbrt(std::abs(rule.kernel.scale));
    const double sgn = rule.kernel.scale < 0.0 ? -1.0 : 1.0;

    CanonicalTensor3 out(grid, R);
    Eigen::MatrixXd U(n, R);
    for (int q = 0; q < R; ++q) {
        const double t = rule.nodes[q];
        const double amp = mag * std::cbrt(rule.weights[q]);
        for (int i = 0; i < n; ++i) {
            const double xc = grid.center(i + 1);
            U(i, q) = amp * gaussian_cell_integral(t, xc - 0.5 * h, xc + 0.5 * h);
        }
        out.coeffs[q] = sgn;
    }
    out.factors[0] = U;
    out.factors[1] = U;
    out.factors[2] = U;
    return out;
}

/// Shift-and-windowing transform: restricts a reference tensor living on the
/// accompanying (2n+1)-cell grid (same mesh size) to the n-cell target grid,
/// with the reference center moved to the target cell `center`. Each output
/// factor is a contiguous length-n window of the corresponding reference
/// factor; rank and coefficients are preserved.
inline CanonicalTensor3 shift_window(const CanonicalTensor3& ref, const Index3& center,
                                     const GridSpec& target) {
    if (ref.n() != 2 * target.n + 1)
        throw std::invalid_argument("shift_window: reference grid must have 2n+1 cells");
    if (std::abs(ref.grid.h() - target.h()) > 1e-12 * target.h())
        throw std::invalid_argument("shift_window: mesh size mismatch");
    for (int l = 0; l < 3; ++l)
        if (center[l] < 1 || center[l] > target.n)
            throw std::invalid_argument("shift_window: center outside target grid");

    const int n = target.n;
    CanonicalTensor3 out(target, ref.rank());
    out.coeffs = ref.coeffs;
    for (int l = 0; l < 3; ++l) {
        const int offset = n + 1 - center[l];  // ref row (0-based) = i + offset - 1
        out.factors[l] = ref.factors[l].middleRows(offset, n);
    }
    return out;
}

}  // namespace rsk
