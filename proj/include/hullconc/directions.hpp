#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "hullconc/common.hpp"
#include "hullconc/normal.hpp"
#include "hullconc/rng.hpp"

namespace hullconc {

/// i.i.d. uniform directions on S^{d-1} (normalized Gaussians), one per column.
inline Matrix random_directions(int d, long count, std::uint64_t seed) {
    if (d < 1 || count < 1) throw std::invalid_argument("random_directions: bad shape");
    Rng rng(seed);
    Matrix dirs(d, count);
    for (long j = 0; j < count; ++j) {
        double norm2 = 0.0;
        do {
            for (int i = 0; i < d; ++i) dirs(i, j) = normal_quantile_fast(rng.next_open01());
            norm2 = dirs.col(j).squaredNorm();
        } while (norm2 < 1e-12);
        dirs.col(j) /= std::sqrt(norm2);
    }
    return dirs;
}

/// Deterministic low-discrepancy direction grid, one per column:
/// d=1 alternates +1/-1, d=2 golden-angle circle points, d=3 Fibonacci
/// sphere; d>3 falls back to orthant-symmetrized random points (seeded).
inline Matrix direction_grid(int d, long count, std::uint64_t seed = 0) {
    if (d < 1 || count < 1) throw std::invalid_argument("direction_grid: bad shape");
    Matrix dirs(d, count);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    switch (d) {
        case 1:
            for (long j = 0; j < count; ++j) dirs(0, j) = (j % 2 == 0) ? 1.0 : -1.0;
            break;
        case 2:
            for (long j = 0; j < count; ++j) {
                const double ang = 2.0 * std::numbers::pi * (static_cast<double>(j) / golden -
                                                std::floor(static_cast<double>(j) / golden));
                dirs(0, j) = std::cos(ang);
                dirs(1, j) = std::sin(ang);
            }
            break;
        case 3:
            for (long j = 0; j < count; ++j) {
                const double z =
                    1.0 - 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(count);
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double ang = 2.0 * std::numbers::pi * (static_cast<double>(j) / golden -
                                                std::floor(static_cast<double>(j) / golden));
                dirs(0, j) = r * std::cos(ang);
                dirs(1, j) = r * std::sin(ang);
                dirs(2, j) = z;
            }
            break;
        default: {
            const Matrix half = random_directions(d, (count + 1) / 2, seed ^ 0xd19ec715);
            for (long j = 0; j < count; ++j) {
                dirs.col(j) = half.col(j / 2);
                if (j % 2 == 1) dirs.col(j) = -dirs.col(j);
            }
            break;
        }
    }
    return dirs;
}

}  // namespace hullconc
