#pragma once

#include <vector>

namespace dnurbs {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const noexcept { return static_cast<int>(nodes.size()); }

    /// n-point rule, exact for polynomials of degree <= 2n - 1. Throws
    /// ConfigError for n < 1.
    static QuadratureRule gauss_legendre(int n);
};

}  // namespace dnurbs
