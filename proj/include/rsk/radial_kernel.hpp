#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsk {

enum class KernelFamily {
    Newton,        // 1/r
    Yukawa,        // exp(-kappa r)/r
    InversePower,  // 1/r^beta
    AbsR,          // r  (biharmonic component; no Gaussian-sum quadrature)
};

/// Radial generating kernel p(r). `scale` is a plain multiplicative
/// normalization (e.g. 1/(4 pi) for the Coulomb potential); it never enters
/// quadrature construction and is applied as a final factor on evaluation.
struct RadialKernel {
    KernelFamily family = KernelFamily::Newton;
    double kappa = 0.0;  // Yukawa only
    double beta = 1.0;   // InversePower only
    double scale = 1.0;

    static RadialKernel newton(double scale = 1.0) {
        return RadialKernel{KernelFamily::Newton, 0.0, 1.0, scale};
    }
    static RadialKernel yukawa(double kappa, double scale = 1.0) {
        if (!(kappa > 0.0)) throw std::invalid_argument("yukawa: kappa must be > 0");
        return RadialKernel{KernelFamily::Yukawa, kappa, 1.0, scale};
    }
    static RadialKernel inverse_power(double beta, double scale = 1.0) {
        if (!(beta > 0.0)) throw std::invalid_argument("inverse_power: beta must be > 0");
        return RadialKernel{KernelFamily::InversePower, 0.0, beta, scale};
    }

    /// Exact pointwise value scale * p(r), r > 0.
    double operator()(double r) const {
        switch (family) {
            case KernelFamily::Newton: return scale / r;
            case KernelFamily::Yukawa: return scale * std::exp(-kappa * r) / r;
            case KernelFamily::InversePower: return scale * std::pow(r, -beta);
            case KernelFamily::AbsR: return scale * r;
        }
        return 0.0;
    }

    std::string name() const {
        switch (family) {
            case KernelFamily::Newton: return "newton";
            case KernelFamily::Yukawa: return "yukawa";
            case KernelFamily::InversePower: return "invpow";
            case KernelFamily::AbsR: return "absr";
        }
        return "?";
    }
};

}  // namespace rsk
