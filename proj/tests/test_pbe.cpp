#include <catch2/catch.hpp>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rsk/pbe.hpp"

using namespace rsk;

namespace {

PbeConfig small_config(int N, double sigmaVdw, std::uint64_t seed = 12) {
    // Van der Waals balls must not overlap (molecular geometry and the
    // premise of the interface lemma): rejection-sample with a minimum
    // pairwise separation of 2.2 sigmaVdw.
    PbeConfig cfg;
    cfg.epsM = 2.0;
    cfg.epsS = 80.0;
    cfg.sigmaVdw = sigmaVdw;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    while (cfg.charges.N() < N) {
        Eigen::Vector3d x(u(rng), u(rng), u(rng));
        bool ok = true;
        for (const auto& p : cfg.charges.particles)
            if ((x - p.center).norm() < 2.2 * sigmaVdw) ok = false;
        if (ok)
            cfg.charges.particles.push_back({x, (cfg.charges.N() % 2 == 0) ? 1.0 : -1.0});
    }
    return cfg;
}

}  // namespace

TEST_CASE("pbe_regularize_rhs validates its inputs") {
    GridSpec g(1.0, 33);
    PbeConfig cfg = small_config(3, 0.15);
    REQUIRE_THROWS_AS(pbe_regularize_rhs(cfg, g, 12, 3.0, /*sigma=*/0.3, 1e-4, 1e-6),
                      std::invalid_argument);  // sigma > sigmaVdw
    PbeConfig bad = cfg;
    bad.epsM = -1.0;
    REQUIRE_THROWS_AS(pbe_regularize_rhs(bad, g, 12, 3.0, 0.1, 1e-4, 1e-6),
                      std::invalid_argument);
    PbeConfig outside = cfg;
    outside.charges.particles.push_back({{2.0, 0.0, 0.0}, 1.0});
    REQUIRE_THROWS_AS(pbe_regularize_rhs(outside, g, 12, 3.0, 0.1, 1e-4, 1e-6),
                      std::invalid_argument);
}

TEST_CASE("single atom: rho_long support sits inside the Van der Waals ball") {
    GridSpec g(1.0, 49);
    PbeConfig cfg;
    cfg.epsM = 1.0;
    cfg.sigmaVdw = 0.22;
    cfg.charges.particles.push_back({Eigen::Vector3d::Zero(), 1.0});
    auto [rho, uShort, rep] = pbe_regularize_rhs(cfg, g, 20, 3.0, cfg.sigmaVdw, 1e-4, 1e-6, 512);
    REQUIRE(rep.cellsAboveThresholdOutside == 0);
    REQUIRE(rep.interfaceMax <= 1e-3 * rep.uShortMax);
}

TEST_CASE("epsM scaling doubles rho_long entrywise") {
    GridSpec g(1.0, 33);
    PbeConfig cfg = small_config(3, 0.2);
    auto [rho1, us1, rep1] = pbe_regularize_rhs(cfg, g, 14, 3.0, 0.18, 1e-4, 1e-8, 256);
    PbeConfig cfg2 = cfg;
    cfg2.epsM *= 2.0;
    auto [rho2, us2, rep2] = pbe_regularize_rhs(cfg2, g, 14, 3.0, 0.18, 1e-4, 1e-8, 256);
    // same split, same particles: fields proportional up to compression eps
    double worst = 0.0;
    for (long i = 0; i < rho1.values.size(); i += 97)
        worst = std::max(worst, std::abs(rho2.values[i] - 2.0 * rho1.values[i]));
    REQUIRE(worst < 1e-6 * rho1.values.cwiseAbs().maxCoeff());
    // u_short does not depend on epsM
    REQUIRE((us1.values - us2.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interface samples: u_short vanishes on Gamma for a small system") {
    // Needs sigma/h large enough that one-cell interpolation smear around
    // the sphere stays below threshold (it reaches h sqrt(3)/2 inside Gamma,
    // where the short part is legitimately nonzero).
    GridSpec g(1.0, 129);
    PbeConfig cfg = small_config(4, 0.12, 5);
    auto [rho, uShort, rep] = pbe_regularize_rhs(cfg, g, 20, 3.0, 0.12, 1e-5, 1e-6, 512);
    REQUIRE(rep.uShortMax > 0.0);
    REQUIRE(rep.interfaceMax <= 1e-3 * rep.uShortMax);
    REQUIRE(rep.cellsAboveThresholdOutside == 0);
}

TEST_CASE("coarse grids smear the interface check by one cell") {
    GridSpec g(1.0, 49);
    PbeConfig cfg = small_config(4, 0.2, 5);
    auto [rho, uShort, rep] = pbe_regularize_rhs(cfg, g, 16, 3.0, 0.2, 1e-5, 1e-6, 512);
    REQUIRE(rep.interfaceMax <= 5e-2 * rep.uShortMax);
}

TEST_CASE("fibonacci sphere points are unit and roughly uniform") {
    auto pts = fibonacci_sphere(256);
    REQUIRE(pts.size() == 256);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
        REQUIRE(p.norm() == Approx(1.0).epsilon(1e-12));
        mean += p;
    }
    REQUIRE(mean.norm() / 256.0 < 0.02);
}
