#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "rsk/canonical_tensor.hpp"

namespace rsk {

/// Orthogonal Tucker tensor: small dense core contracted with per-mode
/// orthonormal side matrices V^(l) (n x r_l).
struct TuckerTensor3 {
    GridSpec grid;
    std::array<Eigen::MatrixXd, 3> basis;
    std::array<int, 3> ranks{0, 0, 0};
    Eigen::VectorXd core;  // flat, index (a*r2 + b)*r3 + c

    double core_at(int a, int b, int c) const {
        return core[(static_cast<long>(a) * ranks[1] + b) * ranks[2] + c];
    }

    double entry(const Index3& i) const {
        double acc = 0.0;
        for (int a = 0; a < ranks[0]; ++a)
            for (int b = 0; b < ranks[1]; ++b) {
                double vb = basis[0](i[0] - 1, a) * basis[1](i[1] - 1, b);
                if (vb == 0.0) continue;
                for (int c = 0; c < ranks[2]; ++c)
                    acc += core_at(a, b, c) * vb * basis[2](i[2] - 1, c);
            }
        return acc;
    }
};

struct CompressionError : std::runtime_error {
    double bestResidual;
    CompressionError(const std::string& what, double best)
        : std::runtime_error(what), bestResidual(best) {}
};

namespace detail {

/// Exact mode-l unfolding Gram of a canonical tensor,
///   G^(1) = U1 D [ (U2^T U2) o (U3^T U3) ] D U1^T   (o = Hadamard),
/// and cyclic permutations. O(n R^2) time, O(R^2) memory.
inline Eigen::MatrixXd mode_gram_canonical(const CanonicalTensor3& t, int mode) {
    const int a = mode, b = (mode + 1) % 3, c = (mode + 2) % 3;
    Eigen::MatrixXd H = (t.factors[b].transpose() * t.factors[b])
                            .cwiseProduct(t.factors[c].transpose() * t.factors[c]);
    Eigen::MatrixXd UD = t.factors[a] * t.coeffs.asDiagonal();
    return UD * H * UD.transpose();
}

/// Mode Grams computed from a materialized tensor; preferable when the
/// canonical rank is so large that R x R intermediates dominate n^3.
inline std::array<Eigen::MatrixXd, 3> mode_grams_dense(const Eigen::VectorXd& dense, int n) {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    std::array<Eigen::MatrixXd, 3> G;
    Eigen::Map<const RowMat> M1(dense.data(), n, static_cast<long>(n) * n);
    G[0] = M1 * M1.transpose();
    G[1] = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        Eigen::Map<const RowMat> slab(dense.data() + static_cast<long>(i) * n * n, n, n);
        G[1] += slab * slab.transpose();
    }
    Eigen::Map<const RowMat> M3(dense.data(), static_cast<long>(n) * n, n);
    G[2] = M3.transpose() * M3;
    return G;
}

/// Orthonormal basis of the dominant eigenspace of a symmetric PSD Gram,
/// truncated so that the discarded eigenvalue mass is at most tailSq.
/// Eigenvalues below the spectral noise floor of the Gram route are always
/// discarded (effective relative accuracy floor ~3e-7 on singular values).
inline Eigen::MatrixXd dominant_basis(const Eigen::MatrixXd& G, double tailSq, int* rank_out) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
    const int n = static_cast<int>(ev.size());
    const double floor = ev[n - 1] * 1e-13;
    double acc = 0.0;
    int drop = 0;
    while (drop < n - 1 &&
           (ev[drop] <= floor || acc + std::max(ev[drop], 0.0) <= tailSq)) {
        acc += std::max(ev[drop], 0.0);
        ++drop;
    }
    int r = n - drop;
    *rank_out = r;
    return es.eigenvectors().rightCols(r).rowwise().reverse();
}

inline void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("compression: eps must be in (0,1)");
}

}  // namespace detail

/// Reduced HOSVD of a canonical tensor: orthogonal per-mode bases from the
/// spectral decomposition of the exact unfolding Grams, truncated so the
/// projection error stays below eps * ||t||_F, plus the projected core.
inline TuckerTensor3 hosvd_canonical(const CanonicalTensor3& t, double eps) {
    detail::check_eps(eps);
    if (t.rank() < 1) throw std::invalid_argument("hosvd: rank must be >= 1");
    const int n = t.n();
    const int R = t.rank();

    TuckerTensor3 out;
    out.grid = t.grid;

    std::array<Eigen::MatrixXd, 3> G;
    const bool dense_route = R > 1024 && n <= 320;
    if (dense_route) {
        G = detail::mode_grams_dense(dense_of(t), n);
    } else {
        for (int l = 0; l < 3; ++l) G[l] = detail::mode_gram_canonical(t, l);
    }
    const double tailSq = eps * eps * std::max(G[0].trace(), 0.0) / 3.0;  // per-mode budget
    for (int l = 0; l < 3; ++l)
        out.basis[l] = detail::dominant_basis(G[l], tailSq, &out.ranks[l]);

    // core = t x_1 V1^T x_2 V2^T x_3 V3^T, accumulated per canonical term
    const int r1 = out.ranks[0], r2 = out.ranks[1], r3 = out.ranks[2];
    out.core = Eigen::VectorXd::Zero(static_cast<long>(r1) * r2 * r3);
    Eigen::MatrixXd P1 = out.basis[0].transpose() * t.factors[0];  // r1 x R
    Eigen::MatrixXd P2 = out.basis[1].transpose() * t.factors[1];
    Eigen::MatrixXd P3 = out.basis[2].transpose() * t.factors[2];
    for (int q = 0; q < R; ++q) {
        const double xi = t.coeffs[q];
        if (xi == 0.0) continue;
        for (int a = 0; a < r1; ++a) {
            const double pa = xi * P1(a, q);
            if (pa == 0.0) continue;
            for (int b = 0; b < r2; ++b) {
                const double pab = pa * P2(b, q);
                if (pab == 0.0) continue;
                out.core.segment((static_cast<long>(a) * r2 + b) * r3, r3) += pab * P3.col(q);
            }
        }
    }
    return out;
}

/// HOSVD of an already materialized tensor (same truncation rule).
inline TuckerTensor3 hosvd_dense(const Eigen::VectorXd& dense, const GridSpec& grid, double eps) {
    detail::check_eps(eps);
    const int n = grid.n;
    TuckerTensor3 out;
    out.grid = grid;
    auto G = detail::mode_grams_dense(dense, n);
    const double tailSq = eps * eps * std::max(G[0].trace(), 0.0) / 3.0;
    for (int l = 0; l < 3; ++l)
        out.basis[l] = detail::dominant_basis(G[l], tailSq, &out.ranks[l]);

    const int r1 = out.ranks[0], r2 = out.ranks[1], r3 = out.ranks[2];
    // staged contraction: W_i = V2^T slab_i V3, core[a,:,:] += V1(i,a) W_i
    out.core = Eigen::VectorXd::Zero(static_cast<long>(r1) * r2 * r3);
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (int i = 0; i < n; ++i) {
        Eigen::Map<const RowMat> slab(dense.data() + static_cast<long>(i) * n * n, n, n);
        Eigen::MatrixXd W = out.basis[1].transpose() * slab * out.basis[2];  // r2 x r3
        for (int a = 0; a < r1; ++a) {
            const double v = out.basis[0](i, a);
            if (v == 0.0) continue;
            for (int b = 0; b < r2; ++b)
                out.core.segment((static_cast<long>(a) * r2 + b) * r3, r3) +=
                    v * W.row(b).transpose();
        }
    }
    return out;
}

/// Tucker eps-ranks only (no core re-expansion); used for rank reports.
inline std::array<int, 3> tucker_ranks(const CanonicalTensor3& t, double eps) {
    return hosvd_canonical(t, eps).ranks;
}

/// Materialize a Tucker tensor by staged contraction.
inline Eigen::VectorXd dense_of_tucker(const TuckerTensor3& tk) {
    const int n = tk.grid.n;
    const int r1 = tk.ranks[0], r2 = tk.ranks[1], r3 = tk.ranks[2];
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(n) * n * n);
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (int a = 0; a < r1; ++a) {
        Eigen::Map<const RowMat> coreSlab(tk.core.data() + static_cast<long>(a) * r2 * r3, r2, r3);
        Eigen::MatrixXd slab = tk.basis[1] * coreSlab * tk.basis[2].transpose();  // n x n
        for (int i = 0; i < n; ++i) {
            const double v = tk.basis[0](i, a);
            if (v == 0.0) continue;
            Eigen::Map<RowMat> dst(out.data() + static_cast<long>(i) * n * n, n, n);
            dst += v * slab;
        }
    }
    return out;
}

namespace detail {

struct CoreCp {
    std::array<Eigen::MatrixXd, 3> factors;  // r_l x rank, unit columns
    Eigen::VectorXd lambda;
};

inline Eigen::VectorXd cp_dense(const CoreCp& cp, int r1, int r2, int r3) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(r1) * r2 * r3);
    for (int q = 0; q < cp.lambda.size(); ++q)
        for (int a = 0; a < r1; ++a) {
            double pa = cp.lambda[q] * cp.factors[0](a, q);
            for (int b = 0; b < r2; ++b) {
                double pab = pa * cp.factors[1](b, q);
                out.segment((static_cast<long>(a) * r2 + b) * r3, r3) +=
                    pab * cp.factors[2].col(q);
            }
        }
    return out;
}

/// Matricized-tensor-times-Khatri-Rao product for the given mode of the
/// dense core; dims = (r1, r2, r3).
inline Eigen::MatrixXd mttkrp(const Eigen::VectorXd& G, const std::array<int, 3>& dims,
                              const CoreCp& cp, int mode) {
    const int r1 = dims[0], r2 = dims[1], r3 = dims[2];
    const int rank = static_cast<int>(cp.lambda.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dims[mode], rank);
    for (int a = 0; a < r1; ++a)
        for (int b = 0; b < r2; ++b) {
            const long base = (static_cast<long>(a) * r2 + b) * r3;
            for (int c = 0; c < r3; ++c) {
                const double g = G[base + c];
                if (g == 0.0) continue;
                for (int q = 0; q < rank; ++q) {
                    switch (mode) {
                        case 0: out(a, q) += g * cp.factors[1](b, q) * cp.factors[2](c, q); break;
                        case 1: out(b, q) += g * cp.factors[0](a, q) * cp.factors[2](c, q); break;
                        default: out(c, q) += g * cp.factors[0](a, q) * cp.factors[1](b, q); break;
                    }
                }
            }
        }
    return out;
}

inline Eigen::MatrixXd random_init(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd A(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) A(i, j) = gauss(rng);
    if (cols <= rows) {  // orthonormal start
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
        return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    }
    for (int j = 0; j < cols; ++j) A.col(j).normalize();
    return A;
}

/// Spectral initialization: leading eigenvectors of the core's own mode
/// Grams, padded with random columns beyond the mode dimension.
inline Eigen::MatrixXd spectral_init(const Eigen::VectorXd& G, const std::array<int, 3>& dims,
                                     int mode, int rank, std::mt19937_64& rng) {
    const int r1 = dims[0], r2 = dims[1], r3 = dims[2];
    Eigen::MatrixXd GM(dims[mode], dims[mode]);
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    if (mode == 0) {
        Eigen::Map<const RowMat> M(G.data(), r1, static_cast<long>(r2) * r3);
        GM = M * M.transpose();
    } else if (mode == 2) {
        Eigen::Map<const RowMat> M(G.data(), static_cast<long>(r1) * r2, r3);
        GM = M.transpose() * M;
    } else {
        GM.setZero();
        for (int a = 0; a < r1; ++a) {
            Eigen::Map<const RowMat> slab(G.data() + static_cast<long>(a) * r2 * r3, r2, r3);
            GM += slab * slab.transpose();
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(GM);
    const int keep = std::min(rank, dims[mode]);
    Eigen::MatrixXd out(dims[mode], rank);
    out.leftCols(keep) = es.eigenvectors().rightCols(keep).rowwise().reverse();
    if (rank > keep) out.rightCols(rank - keep) = random_init(dims[mode], rank - keep, rng);
    return out;
}

/// Alternating least squares at fixed rank; returns the relative residual of
/// the best iterate, written to *result. Column norms are absorbed into
/// lambda after each mode update. `spectral` selects the deterministic
/// spectral start; otherwise the start is random (seeded).
inline double cp_als(const Eigen::VectorXd& G, const std::array<int, 3>& dims, int rank,
                     std::mt19937_64& rng, int maxIter, double tol, CoreCp* result,
                     bool spectral) {
    CoreCp cp;
    for (int l = 0; l < 3; ++l)
        cp.factors[l] = spectral ? spectral_init(G, dims, l, rank, rng)
                                 : random_init(dims[l], rank, rng);
    cp.lambda = Eigen::VectorXd::Ones(rank);

    const double normG = G.norm();
    if (normG == 0.0) {
        cp.lambda.setZero();
        *result = cp;
        return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    int sinceImprovement = 0;
    for (int iter = 0; iter < maxIter; ++iter) {
        for (int mode = 0; mode < 3; ++mode) {
            const int mb = (mode + 1) % 3, mc = (mode + 2) % 3;
            Eigen::MatrixXd H = (cp.factors[mb].transpose() * cp.factors[mb])
                                    .cwiseProduct(cp.factors[mc].transpose() * cp.factors[mc]);
            Eigen::MatrixXd M = mttkrp(G, dims, cp, mode);  // dims[mode] x rank
            cp.factors[mode] =
                (H.completeOrthogonalDecomposition().pseudoInverse() * M.transpose()).transpose();
            for (int q = 0; q < rank; ++q) {
                double nrm = cp.factors[mode].col(q).norm();
                cp.lambda[q] = nrm;
                if (nrm > 0) cp.factors[mode].col(q) /= nrm;
            }
        }
        double res = (G - cp_dense(cp, dims[0], dims[1], dims[2])).norm() / normG;
        if (res < best * (1.0 - 1e-6)) {
            sinceImprovement = 0;
        } else {
            ++sinceImprovement;
        }
        if (res < best) {
            best = res;
            *result = cp;
        }
        if (res <= tol) return res;
        if (sinceImprovement >= 25) break;  // stalled
    }
    return best;
}

/// Exact slice expansion of the core: G = sum_{a,b} e_a (x) e_b (x) G(a,b,:),
/// rank r1 r2 with zero residual. This realizes the generic bound "canonical
/// rank <= (Tucker rank)^2" and serves as the deterministic fallback when
/// ALS stalls above the target residual.
inline CoreCp slice_expansion(const Eigen::VectorXd& G, const std::array<int, 3>& dims) {
    const int r1 = dims[0], r2 = dims[1], r3 = dims[2];
    CoreCp cp;
    cp.factors[0] = Eigen::MatrixXd::Zero(r1, r1 * r2);
    cp.factors[1] = Eigen::MatrixXd::Zero(r2, r1 * r2);
    cp.factors[2] = Eigen::MatrixXd::Zero(r3, r1 * r2);
    cp.lambda = Eigen::VectorXd::Zero(r1 * r2);
    for (int a = 0; a < r1; ++a)
        for (int b = 0; b < r2; ++b) {
            const int q = a * r2 + b;
            Eigen::VectorXd fiber = G.segment((static_cast<long>(a) * r2 + b) * r3, r3);
            const double nrm = fiber.norm();
            cp.factors[0](a, q) = 1.0;
            cp.factors[1](b, q) = 1.0;
            cp.factors[2].col(q) = nrm > 0 ? (fiber / nrm).eval() : fiber;
            cp.lambda[q] = nrm;
        }
    return cp;
}

}  // namespace detail

/// Stage 2: canonical re-expansion of a Tucker core by seeded-random ALS at
/// the smallest rank reaching core relative residual <= eps, lifted through
/// the orthogonal bases.
inline CanonicalTensor3 cp_from_tucker(const TuckerTensor3& tk, double eps,
                                       std::uint64_t seed = 0x5eed, int maxIter = 200) {
    detail::check_eps(eps);
    const std::array<int, 3>& r = tk.ranks;
    const int capPairs = std::min({r[0] * r[1], r[1] * r[2], r[0] * r[2]});
    const int cap = std::min(192, capPairs);
    std::mt19937_64 rng(seed);

    auto try_rank = [&](int rank, int iters, int restarts, detail::CoreCp* out) {
        double best = detail::cp_als(tk.core, r, rank, rng, iters, eps, out, /*spectral=*/true);
        detail::CoreCp candidate;
        for (int restart = 0; restart < restarts && best > eps; ++restart) {
            double res = detail::cp_als(tk.core, r, rank, rng, iters, eps, &candidate, false);
            if (res < best) {
                best = res;
                *out = candidate;
            }
        }
        return best;
    };

    detail::CoreCp cp, candidate;
    double bestRes = std::numeric_limits<double>::infinity();
    // the canonical rank is bounded below by the largest Tucker mode rank
    const int start = std::min(cap, std::max({r[0], r[1], r[2]}));
    int lo = start, found = -1;
    for (int rank = start; rank <= cap;) {
        double res = try_rank(rank, maxIter, 2, &candidate);
        bestRes = std::min(bestRes, res);
        if (res <= eps) {
            found = rank;
            cp = candidate;
            break;
        }
        lo = rank + 1;
        if (rank == cap) break;
        rank = std::min(cap, std::max(rank + 4, (3 * rank) / 2));
    }
    if (found > lo) {  // refine towards the smallest converged rank
        int hi = found;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            double res = try_rank(mid, maxIter, 1, &candidate);
            if (res <= eps) {
                hi = mid;
                cp = candidate;
            } else {
                lo = mid + 1;
            }
        }
        found = hi;
    }
    if (found < 0) {
        // deterministic fallback: exact slice expansion at rank r1*r2 (the
        // generic (Tucker rank)^2 bound); only unreasonable core sizes fail
        if (capPairs <= 4096) {
            cp = detail::slice_expansion(tk.core, r);
            found = static_cast<int>(cp.lambda.size());
        } else {
            throw CompressionError("cp_from_tucker: ALS did not reach the target residual",
                                   bestRes);
        }
    }

    CanonicalTensor3 out(tk.grid, found);
    for (int l = 0; l < 3; ++l) out.factors[l] = tk.basis[l] * cp.factors[l];
    out.coeffs = cp.lambda;
    return out;
}

/// Canonical -> Tucker -> canonical rank reduction. The returned canonical
/// tensor is within 3*eps of the input in relative Frobenius norm
/// (stage-wise triangle inequality: HOSVD projection <= eps, core
/// re-expansion <= eps).
inline std::pair<TuckerTensor3, CanonicalTensor3> compress_can_tuck_can(
    const CanonicalTensor3& t, double eps, std::uint64_t seed = 0x5eed, int maxIter = 200) {
    TuckerTensor3 tk = hosvd_canonical(t, eps);
    CanonicalTensor3 cp = cp_from_tucker(tk, eps, seed, maxIter);
    return {std::move(tk), std::move(cp)};
}

}  // namespace rsk
