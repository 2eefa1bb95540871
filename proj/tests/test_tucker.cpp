#include <catch2/catch.hpp>
#include <cmath>

#include "oracles.hpp"
#include "rsk/tucker.hpp"

using namespace rsk;

TEST_CASE("rank-1 input compresses to Tucker ranks (1,1,1) with zero error") {
    GridSpec g(1.0, 12);
    CanonicalTensor3 t(g, 1);
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < g.n; ++i) t.factors[l](i, 0) = std::sin(0.3 * (i + 1) + l);
    auto [tk, cp] = compress_can_tuck_can(t, 1e-8);
    REQUIRE(tk.ranks == std::array<int, 3>{1, 1, 1});
    REQUIRE(cp.rank() == 1);
    Eigen::VectorXd want = oracle::densify(t);
    Eigen::VectorXd got = oracle::densify(cp);
    REQUIRE((want - got).norm() / want.norm() < 1e-12);
}

TEST_CASE("Tucker bases are orthonormal and entry() matches the dense tensor") {
    GridSpec g(1.0, 10);
    auto t = oracle::random_tensor(g, 5, 11);
    TuckerTensor3 tk = hosvd_canonical(t, 1e-10);
    for (int l = 0; l < 3; ++l) {
        Eigen::MatrixXd VtV = tk.basis[l].transpose() * tk.basis[l];
        REQUIRE((VtV - Eigen::MatrixXd::Identity(tk.ranks[l], tk.ranks[l])).cwiseAbs().maxCoeff() <
                1e-12);
    }
    Eigen::VectorXd dense = oracle::densify(t);
    double worst = 0.0;
    for (Index3 idx : std::vector<Index3>{{1, 1, 1}, {10, 10, 10}, {4, 7, 2}, {9, 3, 6}}) {
        long flat = ((idx[0] - 1) * 10L + (idx[1] - 1)) * 10 + (idx[2] - 1);
        worst = std::max(worst, std::abs(tk.entry(idx) - dense[flat]));
    }
    REQUIRE(worst < 1e-10 * dense.cwiseAbs().maxCoeff());
}

TEST_CASE("hosvd dense route agrees with canonical route") {
    GridSpec g(1.0, 9);
    auto t = oracle::random_tensor(g, 6, 5);
    TuckerTensor3 a = hosvd_canonical(t, 1e-6);
    TuckerTensor3 b = hosvd_dense(oracle::densify(t), g, 1e-6);
    REQUIRE(a.ranks == b.ranks);
    // bases can differ by sign/rotation; compare reconstructed entries
    for (Index3 idx : std::vector<Index3>{{1, 2, 3}, {9, 9, 9}, {5, 5, 5}})
        REQUIRE(a.entry(idx) == Approx(b.entry(idx)).margin(1e-10));
}

TEST_CASE("compression contract: recompressed tensor within 3 eps of dense oracle") {
    GridSpec g(1.0, 16);
    auto t = oracle::random_tensor(g, 10, 123);
    const double eps = 1e-6;
    auto [tk, cp] = compress_can_tuck_can(t, eps);
    Eigen::VectorXd want = oracle::densify(t);
    Eigen::VectorXd got = oracle::densify(cp);
    REQUIRE((want - got).norm() / want.norm() < 3.0 * eps);
}

TEST_CASE("compression of a smooth Gaussian-sum tensor actually reduces rank") {
    GridSpec g(1.0, 24);
    // smooth long-range-like tensor: wide Gaussians only
    CanonicalTensor3 t(g, 8);
    for (int q = 0; q < 8; ++q) {
        double tq = 0.15 * (q + 1);
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < g.n; ++i) {
                double x = g.center(i + 1);
                t.factors[l](i, q) = std::exp(-tq * tq * x * x);
            }
    }
    auto [tk, cp] = compress_can_tuck_can(t, 1e-5);
    REQUIRE(cp.rank() < 8);
    REQUIRE((oracle::densify(cp) - oracle::densify(t)).norm() / oracle::densify(t).norm() <
            3e-5);
}

TEST_CASE("eps validation") {
    GridSpec g(1.0, 4);
    auto t = oracle::random_tensor(g, 2);
    REQUIRE_THROWS_AS(compress_can_tuck_can(t, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(compress_can_tuck_can(t, 1.5), std::invalid_argument);
}
