#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rsk/canonical_tensor.hpp"
#include "rsk/range_separation.hpp"
#include "rsk/tucker.hpp"

namespace rsk {

/// Discrete Laplacian in Kronecker form,
///   A = D2 (x) I (x) I + I (x) D2 (x) I + I (x) I (x) D2,
/// with the univariate second-difference matrix D2 = (1/h^2) tridiag{1,-2,1}
/// under homogeneous Dirichlet conditions (truncated tridiagonal). A is
/// negative definite (it discretizes the Laplacian); -A is the
/// positive-definite operator used by the solvers, and the discretized Dirac
/// delta is (-A) P_R. Kronecker rank is 3.
struct KroneckerLaplacian {
    GridSpec grid;

    explicit KroneckerLaplacian(const GridSpec& g) : grid(g) {}

    /// y = D2 v for one factor column.
    Eigen::VectorXd univariate(const Eigen::VectorXd& v) const {
        const int n = grid.n;
        const double ih2 = 1.0 / (grid.h() * grid.h());
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            double acc = -2.0 * v[i];
            if (i > 0) acc += v[i - 1];
            if (i + 1 < n) acc += v[i + 1];
            y[i] = acc * ih2;
        }
        return y;
    }
};

/// A t in canonical form: every input column contributes one term per mode
/// with D2 applied to that mode's factor, so rank(out) = 3 rank(t) exactly.
/// Output columns are grouped per input column (modes 1,2,3), which keeps
/// the operator commuting with column splits. Callers negate for the delta.
inline CanonicalTensor3 apply_laplacian(const CanonicalTensor3& t) {
    const KroneckerLaplacian A(t.grid);
    const int R = t.rank();
    CanonicalTensor3 out(t.grid, 3 * R);
    for (int q = 0; q < R; ++q) {
        for (int mode = 0; mode < 3; ++mode) {
            const int col = 3 * q + mode;
            for (int l = 0; l < 3; ++l)
                out.factors[l].col(col) =
                    (l == mode) ? A.univariate(t.factors[l].col(q)) : t.factors[l].col(q);
            out.coeffs[col] = t.coeffs[q];
        }
    }
    return out;
}

/// Operator-dependent discretized Dirac delta delta_h = (-A) P_R and its
/// short/long split delta_s = (-A) P_{R_s}, delta_l = (-A) P_{R_l}.
/// short + long recombines to full exactly (column concatenation).
struct DiscreteDelta {
    CanonicalTensor3 full;
    CanonicalTensor3 shortPart;
    CanonicalTensor3 longPart;
    std::optional<double> epsUsed;
};

inline DiscreteDelta build_delta(const RsSplit& split) {
    DiscreteDelta d;
    d.longPart = scaled(apply_laplacian(split.longPart), -1.0);
    d.shortPart = scaled(apply_laplacian(split.shortPart), -1.0);
    d.full = add(d.longPart, d.shortPart);
    return d;
}

/// Collective long-range delta of a multiparticle RS tensor: (-A) applied to
/// the compressed long-range part (rank <= 3 R_L), then eps-truncated via
/// the can-Tuck-can scheme. The short-range information stays replica-based
/// in the RS tensor; here shortPart carries the reference window delta.
inline DiscreteDelta multiparticle_delta(const RsCanonicalTensor& rs, double eps,
                                         TuckerTensor3* tuckerOut = nullptr,
                                         std::uint64_t seed = 0x5eed) {
    DiscreteDelta d;
    CanonicalTensor3 raw = scaled(apply_laplacian(rs.longRange), -1.0);
    auto [tk, cp] = compress_can_tuck_can(raw, eps, seed);
    d.longPart = std::move(cp);
    d.shortPart = scaled(apply_laplacian(rs.shortRef), -1.0);
    d.epsUsed = eps;
    if (tuckerOut) *tuckerOut = std::move(tk);
    return d;
}

}  // namespace rsk
