#pragma once

#include <vector>

namespace gensum {

// Gauss-Legendre rule mapped to [0, 1]. An n-point rule integrates
// polynomials of degree <= 2n - 1 exactly.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_legendre(int points);

// Smallest rule that is exact for degree `degree`.
int gauss_legendre_points_for_degree(int degree);

}  // namespace gensum
