#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "rsk/projection.hpp"
#include "rsk/range_separation.hpp"

namespace rsk {

/// Harmonic potential of the Gaussian exp(-lambda^2 ||x||^2),
///   (1/4pi) int exp(-lambda^2 ||y||^2)/||x-y|| dy
///     = sqrt(pi) erf(lambda r)/(4 lambda^3 r),
/// with the removable singularity at r = 0 handled by the Taylor series
///   (1/(2 lambda^2)) (1 - a^2/3 + a^4/10 - ...),  a = lambda r.
/// The lambda^3 normalization is fixed by the large-r moment
/// (pi/lambda^2)^{3/2}/(4 pi r) and is cross-checked against numeric
/// integration in the test suite.
inline double erf_potential(double lambda, const Eigen::Vector3d& x) {
    if (!(lambda > 0.0)) throw std::invalid_argument("erf_potential: lambda must be > 0");
    const double r = x.norm();
    const double a = lambda * r;
    if (a < 1e-4) {
        const double a2 = a * a;
        return (1.0 - a2 / 3.0 + a2 * a2 / 10.0) / (2.0 * lambda * lambda);
    }
    return std::sqrt(M_PI) * std::erf(a) / (4.0 * lambda * lambda * lambda * r);
}

/// Gradient of erf_potential; radial, pointing toward the origin:
///   grad_l = -(x_l/(2 lambda^2 r^2)) (sqrt(pi) erf(lambda r)/(2 lambda r)
///            - exp(-lambda^2 r^2)).
/// Must (and does, see tests) match central finite differences of
/// erf_potential.
inline Eigen::Vector3d erf_potential_gradient(double lambda, const Eigen::Vector3d& x) {
    if (!(lambda > 0.0)) throw std::invalid_argument("erf_potential_gradient: lambda > 0");
    const double r = x.norm();
    if (r == 0.0) throw std::invalid_argument("erf_potential_gradient: x = 0");
    const double a = lambda * r;
    const double bracket = 0.5 * std::sqrt(M_PI) * std::erf(a) / a - std::exp(-a * a);
    return -(bracket / (2.0 * lambda * lambda * r * r)) * x;
}

/// G_d(r) = -Delta_d exp(-lambda r^2) = (2 d lambda - 4 lambda^2 r^2)
/// exp(-lambda r^2).
inline double g_d(int d, double lambda, double r) {
    if (d < 1 || !(lambda > 0.0) || r < 0.0) throw std::invalid_argument("g_d: bad arguments");
    return (2.0 * d * lambda - 4.0 * lambda * lambda * r * r) * std::exp(-lambda * r * r);
}

/// Zero of G_d.
inline double g_d_root(int d, double lambda) { return std::sqrt(d / (2.0 * lambda)); }

/// Stationary point r_0 > 0 of G_d and the extremum value there.
inline double g_d_stationary_point(int d, double lambda) {
    return std::sqrt((2.0 + d) / (2.0 * lambda));
}
inline double g_d_extremum(int d, double lambda) {
    return -4.0 * lambda * std::exp(-0.5 * (2.0 + d));
}

/// Surface area of the unit sphere in R^d, d <= 6.
inline double unit_sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        case 4: return 2.0 * M_PI * M_PI;
        case 5: return 8.0 * M_PI * M_PI / 3.0;
        case 6: return M_PI * M_PI * M_PI;
    }
    throw std::invalid_argument("unit_sphere_area: d must be in 1..6");
}

enum class GreenFamily {
    Yukawa,            // exp(-kappa r)/(4 pi r)
    Biharmonic,        // -r/(8 pi)
    KelvinSomigliana,  // 3x3 elasticity matrix
    Stokeslet,         // 3x3 hydrodynamic matrix
    StokesPressure,    // x/(4 pi r^3)
    Eta0,              // advection-diffusion, kappa^2 + |b|^2 = 0
};

struct AnalyticKernel {
    GreenFamily family = GreenFamily::Yukawa;
    double kappa = 0.0;      // Yukawa
    double lame_lambda = 1;  // Kelvin-Somigliana
    double lame_mu = 1;
    double viscosity = 1.0;  // Stokeslet
    Eigen::Vector3d drift = Eigen::Vector3d::Zero();  // Eta0
};

struct GreenValue {
    enum class Kind { Scalar, Vector, Matrix } kind = Kind::Scalar;
    double scalar = 0.0;
    Eigen::Vector3d vector = Eigen::Vector3d::Zero();
    Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
};

/// Pointwise fundamental solutions, x != 0.
inline GreenValue green_eval(const AnalyticKernel& kernel, const Eigen::Vector3d& x) {
    const double r = x.norm();
    if (r == 0.0) throw std::invalid_argument("green_eval: x = 0");
    GreenValue out;
    switch (kernel.family) {
        case GreenFamily::Yukawa:
            out.scalar = std::exp(-kernel.kappa * r) / (4.0 * M_PI * r);
            break;
        case GreenFamily::Biharmonic:
            out.scalar = -r / (8.0 * M_PI);
            break;
        case GreenFamily::Eta0:
            out.scalar = std::exp(kernel.drift.dot(x)) / (unit_sphere_area(3) * r);
            break;
        case GreenFamily::StokesPressure:
            out.kind = GreenValue::Kind::Vector;
            out.vector = x / (4.0 * M_PI * r * r * r);
            break;
        case GreenFamily::KelvinSomigliana: {
            out.kind = GreenValue::Kind::Matrix;
            const double l = kernel.lame_lambda, m = kernel.lame_mu;
            const double pref = (l + m) / (8.0 * M_PI * m * (l + 2.0 * m));
            const double diag = (l + 3.0 * m) / (l + m);
            out.matrix = pref * (diag / r * Eigen::Matrix3d::Identity() +
                                 (x * x.transpose()) / (r * r * r));
            break;
        }
        case GreenFamily::Stokeslet: {
            out.kind = GreenValue::Kind::Matrix;
            const double pref = 1.0 / (8.0 * M_PI * kernel.viscosity);
            out.matrix = pref * (Eigen::Matrix3d::Identity() / r + (x * x.transpose()) / (r * r * r));
            break;
        }
    }
    return out;
}

/// RS-split grid tensors for the scalar radial components 1/r and 1/r^3 of
/// the matrix-valued kernels, plus the coordinate multipliers that realize
/// the separable x_k x_l factors.
struct MatrixKernelTensors {
    GridSpec grid;
    RsSplit invR;    // 1/||x||
    RsSplit invR3;   // 1/||x||^3
    CanonicalTensor3 invRFull;
    CanonicalTensor3 invR3Full;
};

inline MatrixKernelTensors rs_split_matrix_kernels(const GridSpec& grid, int M, double C0,
                                                   double sigma, double delta) {
    MatrixKernelTensors out;
    out.grid = grid;
    QuadratureRule r1 = build_sinc_rule(RadialKernel::inverse_power(1.0), M, C0);
    QuadratureRule r3 = build_sinc_rule(RadialKernel::inverse_power(3.0), M, C0);
    out.invRFull = project_kernel(r1, grid);
    out.invR3Full = project_kernel(r3, grid);
    out.invR = split_kernel_tensor(r1, out.invRFull, sigma, delta);
    out.invR3 = split_kernel_tensor(r3, out.invR3Full, sigma, delta);
    return out;
}

/// Multiply one mode of a canonical tensor entrywise by the grid coordinate
/// (separable polynomial factor); applying it twice with k = l realizes
/// x_k^2.
inline CanonicalTensor3 coordinate_multiply(const CanonicalTensor3& t, int mode) {
    CanonicalTensor3 out = t;
    for (int i = 0; i < t.n(); ++i) out.factors[mode].row(i) *= t.grid.center(i + 1);
    return out;
}

/// Grid tensor of the (k,l) entry of the Stokeslet: (1/8 pi nu)
/// (delta_kl T_{1/r} + x_k x_l T_{1/r^3}).
inline CanonicalTensor3 stokeslet_entry_tensor(const MatrixKernelTensors& mk, double viscosity,
                                               int k, int l) {
    CanonicalTensor3 xx = coordinate_multiply(coordinate_multiply(mk.invR3Full, k), l);
    const double pref = 1.0 / (8.0 * M_PI * viscosity);
    if (k == l) return add(scaled(mk.invRFull, pref), scaled(xx, pref));
    return scaled(xx, pref);
}

/// Grid tensor of the (k,l) entry of the Kelvin-Somigliana matrix.
inline CanonicalTensor3 kelvin_entry_tensor(const MatrixKernelTensors& mk, double lame_lambda,
                                            double lame_mu, int k, int l) {
    const double lm = lame_lambda, mu = lame_mu;
    const double pref = (lm + mu) / (8.0 * M_PI * mu * (lm + 2.0 * mu));
    const double diag = (lm + 3.0 * mu) / (lm + mu);
    CanonicalTensor3 xx = coordinate_multiply(coordinate_multiply(mk.invR3Full, k), l);
    if (k == l) return add(scaled(mk.invRFull, pref * diag), scaled(xx, pref));
    return scaled(xx, pref);
}

}  // namespace rsk
