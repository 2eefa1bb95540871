#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace rsk {

/// Uniform cubic Cartesian grid on [-b,b]^3 with n cells per axis.
/// Cells are indexed 1..n; cell i is centered at x_i = -b + (i - 1/2) h,
/// h = 2b/n, so the singularity of a kernel centered at the origin never
/// coincides with a cell center on even grids, and lands exactly on the
/// middle cell center on odd grids.
struct GridSpec {
    double b = 1.0;
    int n = 2;

    GridSpec() = default;
    GridSpec(double half_width, int cells) : b(half_width), n(cells) {
        if (!(b > 0.0)) throw std::invalid_argument("GridSpec: b must be positive");
        if (n < 2) throw std::invalid_argument("GridSpec: n must be >= 2");
    }

    double h() const { return 2.0 * b / n; }

    /// Center of cell i (1-based).
    double center(int i) const { return -b + (i - 0.5) * h(); }

    bool operator==(const GridSpec& o) const { return b == o.b && n == o.n; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

    /// Index (1-based) of the cell whose center is nearest to x; clamped to [1,n].
    int snap(double x) const {
        int i = static_cast<int>(std::lround((x + b) / h() + 0.5));
        if (i < 1) i = 1;
        if (i > n) i = n;
        return i;
    }
};

using Index3 = std::array<int, 3>;  // 1-based cell indices

/// Reference grid accompanying a target grid: same mesh size h, 2n+1 cells,
/// so its cell centers {j h : |j| <= n} contain the origin and every
/// difference of two target cell centers. Windows of length n fit for every
/// admissible shift.
inline GridSpec reference_grid(const GridSpec& target) {
    int m = 2 * target.n + 1;
    double h = target.h();
    return GridSpec(0.5 * m * h, m);
}

}  // namespace rsk
