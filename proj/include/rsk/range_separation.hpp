#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rsk/canonical_tensor.hpp"
#include "rsk/projection.hpp"
#include "rsk/quadrature.hpp"
#include "rsk/tucker.hpp"

namespace rsk {

enum class SplitCriterion { MaxNorm, L1Norm };

/// Short/long-range partition of a canonical kernel tensor. longPart holds
/// the leading (small-exponent) columns, shortPart the trailing ones; the
/// columns are plain copies, so longPart + shortPart recombines to the input
/// with no arithmetic performed. R_l is the splitting index on the k >= 0
/// quadrature branch; longCount is the structural column cut (for full-range
/// rules it includes the negative-branch terms, which are long-range by
/// construction).
struct RsSplit {
    int R_l = 0;
    int longCount = 0;
    double sigma = 0.0;
    double delta = 0.0;
    SplitCriterion criterion = SplitCriterion::MaxNorm;
    bool noTermSatisfied = false;  // criterion never reached: everything long
    CanonicalTensor3 longPart;
    CanonicalTensor3 shortPart;
};

/// Closed-form ball integral int_{B_sigma} exp(-t^2 ||x||^2) dx =
/// (pi/t^2) (sqrt(pi) erf(t sigma)/t - 2 sigma exp(-t^2 sigma^2)),
/// with the t -> 0 limit 4 pi sigma^3 / 3. Validated against numeric
/// quadrature in the test suite (which caught a factor-2 error in the
/// first antiderivative draft).
inline double gaussian_ball_integral(double t, double sigma) {
    if (t < 1e-10) return 4.0 * M_PI * sigma * sigma * sigma / 3.0;
    const double a = t * sigma;
    const double e = a < 26.0 ? std::exp(-a * a) : 0.0;
    return M_PI / (t * t) * (std::sqrt(M_PI) * std::erf(a) / t - 2.0 * sigma * e);
}

/// Splitting index on the k >= 0 branch: the smallest k whose Gaussian term
/// falls below delta outside the sigma-ball, under the max-norm criterion
/// a_k exp(-t_k^2 sigma^2) <= delta (a_k = p_k) or the L1 criterion
/// a_k int_{B_sigma} exp(-t_k^2 x^2) dx <= delta. If no k satisfies the
/// criterion, returns M (all terms long-range) and sets *noneSatisfied.
inline int choose_split(const QuadratureRule& rule, double sigma, double delta,
                        SplitCriterion criterion, bool* noneSatisfied = nullptr) {
    if (!(sigma > 0.0)) throw std::invalid_argument("choose_split: sigma must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("choose_split: delta in (0,1)");
    const int off = rule.branch_offset();
    if (noneSatisfied) *noneSatisfied = false;
    for (int k = 0; k + off < rule.rank(); ++k) {
        const double t = rule.nodes[k + off];
        const double p = rule.weights[k + off];
        const double value = criterion == SplitCriterion::MaxNorm
                                 ? p * std::exp(-std::min(t * t * sigma * sigma, 700.0))
                                 : p * gaussian_ball_integral(t, sigma);
        if (value <= delta) return k;
    }
    if (noneSatisfied) *noneSatisfied = true;
    return rule.M;
}

/// Structural split: long part takes the first longCount columns, short part
/// the rest. Exact recombination (column copies, no arithmetic).
inline RsSplit split_tensor(const CanonicalTensor3& t, int longCount) {
    if (longCount < 0 || longCount > t.rank())
        throw std::out_of_range("split_tensor: cut out of range");
    RsSplit s;
    s.longCount = longCount;
    s.longPart = CanonicalTensor3(t.grid, longCount);
    s.shortPart = CanonicalTensor3(t.grid, t.rank() - longCount);
    for (int l = 0; l < 3; ++l) {
        s.longPart.factors[l] = t.factors[l].leftCols(longCount);
        s.shortPart.factors[l] = t.factors[l].rightCols(t.rank() - longCount);
    }
    s.longPart.coeffs = t.coeffs.head(longCount);
    s.shortPart.coeffs = t.coeffs.tail(t.rank() - longCount);
    return s;
}

/// Criterion-driven split of a projected kernel tensor whose columns are in
/// rule order. The long part keeps the k = 0..R_l branch terms plus, for
/// full-range rules, the whole negative branch (t < log 2).
inline RsSplit split_kernel_tensor(const QuadratureRule& rule, const CanonicalTensor3& t,
                                   double sigma, double delta,
                                   SplitCriterion criterion = SplitCriterion::MaxNorm) {
    if (t.rank() != rule.rank())
        throw std::invalid_argument("split_kernel_tensor: tensor/rule rank mismatch");
    bool none = false;
    const int R_l = choose_split(rule, sigma, delta, criterion, &none);
    const int cut = std::min(rule.branch_offset() + R_l + 1, t.rank());
    RsSplit s = split_tensor(t, none ? t.rank() : cut);
    s.R_l = R_l;
    s.sigma = sigma;
    s.delta = delta;
    s.criterion = criterion;
    s.noTermSatisfied = none;
    return s;
}

/// Fixed-index variant (default R_l = M/2 when no criterion parameters are
/// given): splits after the k = R_l branch term.
inline RsSplit split_kernel_tensor(const QuadratureRule& rule, const CanonicalTensor3& t,
                                   int R_l) {
    if (R_l < 0 || R_l > rule.M) throw std::out_of_range("split_kernel_tensor: R_l out of range");
    RsSplit s = split_tensor(t, std::min(rule.branch_offset() + R_l + 1, t.rank()));
    s.R_l = R_l;
    return s;
}

struct Particle {
    Eigen::Vector3d center;
    double charge;
};

struct ParticleSystem {
    std::vector<Particle> particles;

    int N() const { return static_cast<int>(particles.size()); }

    void validate(const GridSpec& grid) const {
        if (particles.empty()) throw std::invalid_argument("ParticleSystem: no particles");
        for (const auto& p : particles)
            for (int l = 0; l < 3; ++l)
                if (std::abs(p.center[l]) > grid.b)
                    throw std::invalid_argument("ParticleSystem: particle outside box");
    }
};

/// RS-canonical tensor: one global low-rank canonical tensor for the
/// collective long-range field plus N replicas of a compactly supported
/// reference tensor (support diameter <= 2 gamma in index units) at the
/// particle centers.
struct RsCanonicalTensor {
    GridSpec grid;
    CanonicalTensor3 longRange;            // rank R_L, on grid
    CanonicalTensor3 shortRef;             // on a local (2 gamma + 1)-cell window grid
    int gamma = 0;                         // window half-width in cells
    std::vector<std::pair<Index3, double>> replicas;  // (center cell, coefficient)

    long storage_doubles() const {
        long stor = 3L * longRange.rank() * grid.n + longRange.rank();
        stor += 4L * static_cast<long>(replicas.size());
        stor += 3L * shortRef.rank() * shortRef.n() + shortRef.rank();
        return stor;
    }
};

struct AssembleReport {
    int N = 0;
    int R_l = 0;
    int R_s = 0;
    int gamma = 0;
    std::array<int, 3> tuckerRanks{0, 0, 0};
    int canonicalRankAfter = 0;
    long storageDoubles = 0;
    double maxSnapDisplacement = 0.0;
};

/// Snap a particle to the nearest cell center; displacement <= h sqrt(3)/2.
inline Index3 snap_to_grid(const GridSpec& grid, const Eigen::Vector3d& x,
                           double* displacement = nullptr) {
    Index3 idx{grid.snap(x[0]), grid.snap(x[1]), grid.snap(x[2])};
    if (displacement) {
        Eigen::Vector3d c(grid.center(idx[0]), grid.center(idx[1]), grid.center(idx[2]));
        *displacement = (x - c).norm();
    }
    return idx;
}

/// Rank-concatenated long-range sum sum_nu q_nu W_nu(ref) on the target
/// grid; charges are folded into the coefficient vector.
inline CanonicalTensor3 multiparticle_long_sum(const CanonicalTensor3& refLong,
                                               const ParticleSystem& sys, const GridSpec& grid,
                                               double* maxSnap = nullptr) {
    sys.validate(grid);
    CanonicalTensor3 acc(grid, 0);
    double worst = 0.0;
    for (const auto& p : sys.particles) {
        double d = 0.0;
        Index3 c = snap_to_grid(grid, p.center, &d);
        worst = std::max(worst, d);
        acc = add(acc, scaled(shift_window(refLong, c, grid), p.charge));
    }
    if (maxSnap) *maxSnap = worst;
    return acc;
}

/// Same sum materialized densely (reference densified once, then shifted
/// window copies accumulated); used for the compression of large systems.
inline Eigen::VectorXd multiparticle_long_dense(const CanonicalTensor3& refLong,
                                                const ParticleSystem& sys, const GridSpec& grid) {
    const int n = grid.n;
    const int m = refLong.n();
    if (m != 2 * n + 1) throw std::invalid_argument("multiparticle_long_dense: bad reference grid");
    Eigen::VectorXd ref = dense_of(refLong);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(n) * n * n);
    for (const auto& p : sys.particles) {
        Index3 c = snap_to_grid(grid, p.center);
        const int o1 = n + 1 - c[0], o2 = n + 1 - c[1], o3 = n + 1 - c[2];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const long dst = (static_cast<long>(i) * n + j) * n;
                const long src = (static_cast<long>(i + o1) * m + (j + o2)) * m + o3;
                out.segment(dst, n) += p.charge * ref.segment(src, n);
            }
    }
    return out;
}

/// Central window of half-width gamma around the reference origin, with the
/// factors restricted to the window (entries outside are dropped, so replica
/// support is exactly the window).
inline CanonicalTensor3 window_short_reference(const CanonicalTensor3& refShort, int gamma) {
    const int m = refShort.n();
    const int mid = (m + 1) / 2;  // 1-based origin cell of the odd reference grid
    if (m % 2 == 0) throw std::invalid_argument("window_short_reference: reference grid must be odd");
    if (gamma < 0 || mid - gamma < 1 || mid + gamma > m)
        throw std::invalid_argument("window_short_reference: gamma out of range");
    GridSpec local((2 * gamma + 1) * refShort.grid.h() / 2.0, 2 * gamma + 1);
    CanonicalTensor3 out(local, refShort.rank());
    out.coeffs = refShort.coeffs;
    for (int l = 0; l < 3; ++l)
        out.factors[l] = refShort.factors[l].middleRows(mid - 1 - gamma, 2 * gamma + 1);
    return out;
}

/// Assemble the N-particle potential in RS-canonical form: the long-range
/// windows are concatenated (rank N * longCount) and recompressed to
/// eps-rank; the short-range part is stored as the replica list over the
/// common windowed reference tensor. gamma = ceil(sigma/h).
inline std::pair<RsCanonicalTensor, TuckerTensor3> assemble_multiparticle(
    const RsSplit& refSplit, const ParticleSystem& sys, const GridSpec& grid, double eps,
    AssembleReport* report = nullptr, std::uint64_t seed = 0x5eed) {
    detail::check_eps(eps);
    sys.validate(grid);
    const double sigma = refSplit.sigma > 0.0 ? refSplit.sigma : 2.0 * grid.h();
    const int gammaMax = (refSplit.shortPart.n() - 1) / 2;
    const int gamma = std::min(gammaMax, static_cast<int>(std::ceil(sigma / grid.h())));

    RsCanonicalTensor rs;
    rs.grid = grid;
    rs.gamma = gamma;
    rs.shortRef = window_short_reference(refSplit.shortPart, gamma);

    double maxSnap = 0.0;
    for (const auto& p : sys.particles) {
        double d = 0.0;
        Index3 c = snap_to_grid(grid, p.center, &d);
        maxSnap = std::max(maxSnap, d);
        rs.replicas.emplace_back(c, p.charge);
    }

    TuckerTensor3 tk;
    if (grid.n <= 320) {
        Eigen::VectorXd dense = multiparticle_long_dense(refSplit.longPart, sys, grid);
        tk = hosvd_dense(dense, grid, eps);
    } else {
        tk = hosvd_canonical(multiparticle_long_sum(refSplit.longPart, sys, grid), eps);
    }
    rs.longRange = cp_from_tucker(tk, eps, seed);

    if (report) {
        report->N = sys.N();
        report->R_l = refSplit.R_l;
        report->R_s = refSplit.shortPart.rank();
        report->gamma = gamma;
        report->tuckerRanks = tk.ranks;
        report->canonicalRankAfter = rs.longRange.rank();
        report->storageDoubles = rs.storage_doubles();
        report->maxSnapDisplacement = maxSnap;
    }
    return {std::move(rs), std::move(tk)};
}

/// Entry of the RS-canonical tensor: long-range row products plus the
/// replicas whose support window contains the index. Cost O(3 R_L) plus
/// O(3 R_0) per overlapping replica.
inline double rs_entry(const RsCanonicalTensor& rs, const Index3& i) {
    for (int l = 0; l < 3; ++l)
        if (i[l] < 1 || i[l] > rs.grid.n) throw std::out_of_range("rs_entry");
    double acc = rs.longRange.rank() > 0 ? rs.longRange.entry(i) : 0.0;
    const int g = rs.gamma;
    for (const auto& [c, q] : rs.replicas) {
        if (std::abs(i[0] - c[0]) > g || std::abs(i[1] - c[1]) > g || std::abs(i[2] - c[2]) > g)
            continue;
        Index3 local{i[0] - c[0] + g + 1, i[1] - c[1] + g + 1, i[2] - c[2] + g + 1};
        acc += q * rs.shortRef.entry(local);
    }
    return acc;
}

}  // namespace rsk
