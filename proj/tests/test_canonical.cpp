#include <catch2/catch.hpp>
#include <cmath>

#include "oracles.hpp"
#include "rsk/projection.hpp"
#include "rsk/quadrature.hpp"

using namespace rsk;

TEST_CASE("rank-0 tensor is zero everywhere") {
    CanonicalTensor3 t(GridSpec(1.0, 4), 0);
    REQUIRE(t.entry({1, 1, 1}) == 0.0);
    REQUIRE(t.entry({4, 4, 4}) == 0.0);
}

TEST_CASE("rank-1 all-ones tensor is one everywhere") {
    CanonicalTensor3 t(GridSpec(1.0, 4), 1);
    for (int l = 0; l < 3; ++l) t.factors[l].setOnes();
    REQUIRE(t.entry({1, 2, 3}) == 1.0);
    REQUIRE(t.entry({4, 1, 4}) == 1.0);
}

TEST_CASE("entry matches dense materialization exactly on a random rank-3 tensor") {
    GridSpec g(1.0, 8);
    auto t = oracle::random_tensor(g, 3);
    Eigen::VectorXd dense = oracle::densify(t);
    Eigen::VectorXd lib = dense_of(t);
    REQUIRE((dense - lib).cwiseAbs().maxCoeff() < 1e-13);
    REQUIRE(t.entry({3, 5, 7}) == dense[(2 * 8 + 4) * 8 + 6]);
    REQUIRE_THROWS_AS(t.entry({0, 1, 1}), std::out_of_range);
    REQUIRE_THROWS_AS(t.entry({1, 9, 1}), std::out_of_range);
}

TEST_CASE("add concatenates ranks and sums entrywise") {
    GridSpec g(1.0, 8);
    auto a = oracle::random_tensor(g, 2, 1);
    auto b = oracle::random_tensor(g, 3, 2);
    auto c = add(a, b);
    REQUIRE(c.rank() == 5);
    Eigen::VectorXd got = oracle::densify(c);
    Eigen::VectorXd want = oracle::densify(a) + oracle::densify(b);
    REQUIRE((got - want).cwiseAbs().maxCoeff() < 1e-13);

    auto zero = CanonicalTensor3(g, 0);
    auto same = add(a, zero);
    REQUIRE(same.rank() == a.rank());
    REQUIRE((oracle::densify(same) - oracle::densify(a)).cwiseAbs().maxCoeff() == 0.0);

    auto cancel = add(a, scaled(a, -1.0));
    Eigen::VectorXd z = oracle::densify(cancel);
    REQUIRE(z.cwiseAbs().maxCoeff() < 1e-14);

    REQUIRE_THROWS_AS(add(a, oracle::random_tensor(GridSpec(1.0, 4), 2)), std::invalid_argument);
}

TEST_CASE("Frobenius norm via Gram identity matches dense norm") {
    GridSpec g(1.0, 8);
    auto t = oracle::random_tensor(g, 4, 3);
    REQUIRE(frobenius_norm(t) == Approx(oracle::densify(t).norm()).epsilon(1e-11));
}

TEST_CASE("degenerate single-term projection: t -> 0 gives constant h^3") {
    GridSpec g(1.0, 8);
    QuadratureRule rule;
    rule.kernel = RadialKernel::newton();
    rule.M = 1;
    rule.nodes = {0.0};
    rule.weights = {1.0};
    auto t = project_kernel(rule, g);
    const double h = g.h();
    REQUIRE(t.entry({1, 1, 1}) == Approx(h * h * h).epsilon(1e-14));
    REQUIRE(t.entry({5, 3, 8}) == Approx(h * h * h).epsilon(1e-14));
}

TEST_CASE("projected factors are identical across modes and even about the midpoint") {
    GridSpec g = reference_grid(GridSpec(1.0, 8));  // odd grid, origin on a cell center
    auto rule = build_sinc_rule(RadialKernel::newton(), 8, 3.0);
    auto t = project_kernel(rule, g);
    REQUIRE(t.factors[0] == t.factors[1]);
    REQUIRE(t.factors[0] == t.factors[2]);
    const int n = g.n;
    for (int q = 0; q < t.rank(); ++q)
        for (int i = 0; i < n / 2; ++i)
            REQUIRE(t.factors[0](i, q) == Approx(t.factors[0](n - 1 - i, q)).margin(1e-16));
}

TEST_CASE("projected Newton tensor matches cell-averaged kernel away from the origin") {
    // n=32, b=1, M=24: entrywise relative error vs the cell-averaged
    // 1/(4 pi r) at the level the rule resolves (measured ~1e-3 near
    // r = 0.3, decaying with distance and with M).
    GridSpec g(1.0, 32);
    auto rule = build_sinc_rule(RadialKernel::newton(1.0 / (4.0 * M_PI)), 24, 3.0);
    auto t = project_kernel(rule, g);
    const double h = g.h();
    // cell-averaged exact kernel by tensorized midpoint-of-subcell quadrature
    auto cell_avg = [&](double cx, double cy, double cz) {
        const int m = 6;
        double acc = 0.0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) {
                    double x = cx + (a + 0.5) * h / m - h / 2;
                    double y = cy + (b + 0.5) * h / m - h / 2;
                    double z = cz + (c + 0.5) * h / m - h / 2;
                    acc += 1.0 / (4.0 * M_PI * std::sqrt(x * x + y * y + z * z));
                }
        return acc / (m * m * m) * h * h * h;
    };
    // scan cells outside the r >= 0.3 ball; closer to the singularity the
    // M=24 rule no longer resolves 1/r (absolute error ~ 1/a)
    double worstNear = 0.0, worstFar = 0.0;
    for (int i = 1; i <= 32; i += 1)
        for (int j = 1; j <= 32; j += 2)
            for (int k = 1; k <= 32; k += 2) {
                double cx = g.center(i), cy = g.center(j), cz = g.center(k);
                double r2 = cx * cx + cy * cy + cz * cz;
                if (r2 < 0.3 * 0.3) continue;
                double want = cell_avg(cx, cy, cz);
                double rel = std::abs(t.entry({i, j, k}) - want) / want;
                worstNear = std::max(worstNear, rel);
                if (r2 >= 1.0) worstFar = std::max(worstFar, rel);
            }
    REQUIRE(worstNear < 2e-3);
    REQUIRE(worstFar < 7e-4);
}

TEST_CASE("shift_window: centered window is the central slice") {
    GridSpec target(1.0, 9);
    GridSpec ref = reference_grid(target);
    auto rule = build_sinc_rule(RadialKernel::newton(), 6, 3.0);
    auto reft = project_kernel(rule, ref);
    Index3 mid{5, 5, 5};
    auto w = shift_window(reft, mid, target);
    REQUIRE(w.rank() == reft.rank());
    for (int q = 0; q < w.rank(); ++q)
        for (int i = 0; i < 9; ++i)
            REQUIRE(w.factors[0](i, q) == reft.factors[0](i + 5, q));
}

TEST_CASE("shift by one grid step moves only that mode's window") {
    GridSpec target(1.0, 9);
    GridSpec ref = reference_grid(target);
    auto reft = oracle::random_tensor(ref, 2, 9);
    auto w0 = shift_window(reft, {5, 5, 5}, target);
    auto w1 = shift_window(reft, {6, 5, 5}, target);
    REQUIRE(w0.factors[1] == w1.factors[1]);
    REQUIRE(w0.factors[2] == w1.factors[2]);
    for (int q = 0; q < 2; ++q)
        for (int i = 0; i < 8; ++i) REQUIRE(w1.factors[0](i + 1, q) == w0.factors[0](i, q));
}

TEST_CASE("windowed tensor equals dense reference shifted and cropped") {
    GridSpec target(1.0, 16);
    GridSpec ref = reference_grid(target);
    auto reft = oracle::random_tensor(ref, 3, 17);
    Index3 c{11, 4, 9};
    auto w = shift_window(reft, c, target);
    const int n = target.n;
    for (Index3 idx : std::vector<Index3>{{1, 1, 1}, {16, 16, 16}, {7, 12, 3}, {11, 4, 9}}) {
        Index3 refIdx;
        for (int l = 0; l < 3; ++l) refIdx[l] = idx[l] - c[l] + n + 1;
        REQUIRE(w.entry(idx) == Approx(reft.entry(refIdx)).margin(1e-15));
    }
    REQUIRE_THROWS_AS(shift_window(reft, {0, 5, 5}, target), std::invalid_argument);
    REQUIRE_THROWS_AS(shift_window(reft, {17, 5, 5}, target), std::invalid_argument);
}
