#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rsk/radial_kernel.hpp"

namespace rsk {

/// Sinc-quadrature Gaussian-sum approximation of a radial kernel,
///     scale * p(r) ~ scale * sum_k p_k exp(-t_k^2 r^2),
/// obtained from the Laplace-Gauss transform p(z) = int w(t) exp(-t^2 z^2) dt
/// by the substitution chain t = log(1 + exp(u)), u = sinh(w) and the
/// trapezoidal rule w_k = k*hM, hM = C0/sqrt(M).
///
/// Full-range rules keep k = -M..M (R = 2M+1 terms, stored in ascending t);
/// half-range rules keep k = 0..M with weights doubled for k >= 1. The
/// doubling is exact only for even integrands; for the Newton/Yukawa
/// substitution above the transformed integrand is not even, so full range
/// is the accurate choice for kernel projection and half range is retained
/// for the splitting convention of the k >= 0 branch and for testing.
struct QuadratureRule {
    RadialKernel kernel;
    int M = 1;
    double C0 = 3.0;
    bool halfRange = false;
    std::vector<double> nodes;    // t_k, ascending
    std::vector<double> weights;  // p_k, same order; p_k > 0 for k >= 0

    int rank() const { return static_cast<int>(nodes.size()); }

    /// Index of the k = 0 node (t_0 = log 2) within `nodes`.
    int branch_offset() const { return halfRange ? 0 : M; }
};

namespace detail {

inline double logistic(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    double es = std::exp(s);
    return es / (1.0 + es);
}

/// t(w) = log(1 + exp(sinh w)), evaluated without overflow.
inline double sinc_node(double w) {
    double s = std::sinh(w);
    if (s > 36.0) return s;                      // log1p(e^s) == s to double precision
    if (s < -700.0) return 0.0;                  // e^s underflows
    return std::log1p(std::exp(s));
}

}  // namespace detail

/// Build the sinc rule for kernel in {Newton, Yukawa, InversePower}.
/// Node map: t_k = log(1 + exp(sinh(k*hM))).  Weight for Newton:
/// p_k = (2/sqrt(pi)) * hM * cosh(w_k) / (1 + exp(-sinh(w_k))); for
/// InversePower(beta) the weight function 2 t^{beta-1}/Gamma(beta/2)
/// replaces 2/sqrt(pi); Yukawa multiplies the Newton weight by
/// exp(-kappa^2/(4 t_k^2)) (Laplace-Gauss transform of exp(-kappa z)/z,
/// validated against numeric integration in the test suite).
inline QuadratureRule build_sinc_rule(const RadialKernel& kernel, int M, double C0,
                                      bool halfRange = false) {
    if (M < 1) throw std::invalid_argument("build_sinc_rule: M must be >= 1");
    if (!(C0 > 0.0)) throw std::invalid_argument("build_sinc_rule: C0 must be > 0");
    if (kernel.family == KernelFamily::AbsR)
        throw std::invalid_argument("build_sinc_rule: AbsR has no Gaussian-sum quadrature");

    const double sqrt_pi = std::sqrt(M_PI);
    const double hM = C0 / std::sqrt(static_cast<double>(M));

    QuadratureRule rule;
    rule.kernel = kernel;
    rule.M = M;
    rule.C0 = C0;
    rule.halfRange = halfRange;

    const int k_lo = halfRange ? 0 : -M;
    for (int k = k_lo; k <= M; ++k) {
        const double w = k * hM;
        const double t = detail::sinc_node(w);
        const double s = std::sinh(w);
        double p = hM * std::cosh(w) * detail::logistic(s);

        switch (kernel.family) {
            case KernelFamily::Newton:
                p *= 2.0 / sqrt_pi;
                break;
            case KernelFamily::InversePower:
                p *= (t > 0.0) ? 2.0 * std::pow(t, kernel.beta - 1.0) / std::tgamma(kernel.beta / 2.0)
                               : 0.0;
                break;
            case KernelFamily::Yukawa:
                p *= (t > 0.0) ? (2.0 / sqrt_pi) * std::exp(-kernel.kappa * kernel.kappa / (4.0 * t * t))
                               : 0.0;
                break;
            case KernelFamily::AbsR:
                break;  // unreachable
        }
        if (halfRange && k > 0) p *= 2.0;
        if (!std::isfinite(p)) p = 0.0;

        rule.nodes.push_back(t);
        rule.weights.push_back(p);
    }
    return rule;
}

/// scale * sum_k p_k exp(-t_k^2 r^2).  Finite at r = 0 (value is the plain
/// weight sum there, which is not a kernel approximation).
inline double eval_gaussian_sum(const QuadratureRule& rule, double r) {
    double acc = 0.0;
    const double r2 = r * r;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        acc += rule.weights[k] * std::exp(-rule.nodes[k] * rule.nodes[k] * r2);
    return rule.kernel.scale * acc;
}

struct SweepRow {
    int M;
    double maxRelError;
};

/// Max relative error of the rule against the exact kernel over the part of
/// rGrid with r >= a, for each M in Ms.
inline std::vector<SweepRow> convergence_sweep(const RadialKernel& kernel,
                                               const std::vector<int>& Ms,
                                               const std::vector<double>& rGrid, double a,
                                               double C0 = 3.0, bool halfRange = false) {
    if (!(a > 0.0)) throw std::invalid_argument("convergence_sweep: a must be > 0");
    std::vector<double> rs;
    for (double r : rGrid)
        if (r >= a) rs.push_back(r);
    if (rs.empty()) throw std::invalid_argument("convergence_sweep: empty r grid");

    std::vector<SweepRow> table;
    for (int M : Ms) {
        QuadratureRule rule = build_sinc_rule(kernel, M, C0, halfRange);
        double worst = 0.0;
        for (double r : rs) {
            double exact = kernel(r);
            double err = std::abs(eval_gaussian_sum(rule, r) - exact) / std::abs(exact);
            if (err > worst) worst = err;
        }
        table.push_back({M, worst});
    }
    return table;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least-squares fit of log(maxRelError) against sqrt(M).
inline LineFit fit_log_error_vs_sqrtM(const std::vector<SweepRow>& table) {
    const int n = static_cast<int>(table.size());
    if (n < 2) throw std::invalid_argument("fit_log_error_vs_sqrtM: need >= 2 rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : table) {
        double x = std::sqrt(static_cast<double>(row.M));
        double y = std::log(row.maxRelError);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ybar = sy / n, ss_tot = 0, ss_res = 0;
    for (const auto& row : table) {
        double x = std::sqrt(static_cast<double>(row.M));
        double y = std::log(row.maxRelError);
        ss_tot += (y - ybar) * (y - ybar);
        double e = y - (fit.slope * x + fit.intercept);
        ss_res += e * e;
    }
    fit.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace rsk
