#pragma once

/// Finite-difference weights on arbitrary 1-D node sets (Fornberg's recurrence)
/// and windowed derivative stencils on uniform meshes.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hessgreen/error.hpp"

namespace hessgreen {

/// weights[d][j] approximates the d-th derivative at x0 as sum_j weights[d][j] f(nodes[j]),
/// for d = 0..max_derivative.
inline std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& nodes,
                                                         int max_derivative) {
    const std::size_t count = nodes.size();
    if (count == 0 || max_derivative < 0 || static_cast<std::size_t>(max_derivative) >= count) {
        throw InvalidArgument("fornberg_weights: need more nodes than the derivative order");
    }
    const auto mmax = static_cast<std::size_t>(max_derivative);
    std::vector<std::vector<double>> c(mmax + 1, std::vector<double>(count, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < count; ++i) {
        const std::size_t mn = std::min(i, mmax);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// First and second derivative weights at node `index` of a uniform mesh with
/// spacing h and `size` nodes. The window has order+1 points, centred when it
/// fits and shifted inward (one point wider) near the ends, so both derivatives
/// are accurate to O(h^order).
struct Stencil {
    std::size_t first = 0;        ///< index of the leftmost node
    std::vector<double> d1;       ///< first-derivative weights
    std::vector<double> d2;       ///< second-derivative weights
};

inline Stencil uniform_stencil(std::size_t index, std::size_t size, double h, int order) {
    if (order < 2 || order % 2 != 0) {
        throw InvalidArgument("uniform_stencil: order must be even and >= 2");
    }
    const auto half = static_cast<std::size_t>(order / 2);
    std::size_t width = static_cast<std::size_t>(order) + 1;
    std::size_t first = 0;
    if (index >= half && index + half < size) {
        first = index - half;
    } else {
        width += 1;
        first = index < half ? 0 : size - width;
    }
    if (width > size) {
        throw InvalidArgument("uniform_stencil: mesh too small for the requested order");
    }
    std::vector<double> offsets(width);
    for (std::size_t j = 0; j < width; ++j) {
        offsets[j] = (static_cast<double>(first + j) - static_cast<double>(index)) * h;
    }
    const auto w = fornberg_weights(0.0, offsets, 2);
    return {first, w[1], w[2]};
}

}  // namespace hessgreen
