#include "gensum/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "gensum/errors.hpp"

namespace gensum {

QuadratureRule gauss_legendre(int points) {
    if (points < 1) throw ConfigError("quadrature needs at least one point");
    const auto n = static_cast<std::size_t>(points);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    // Newton iteration on P_n from the Tricomi initial guesses; roots come in
    // symmetric pairs on [-1, 1].
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= points; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= points; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = points * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);

        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

int gauss_legendre_points_for_degree(int degree) {
    if (degree < 0) throw ConfigError("polynomial degree must be >= 0");
    return (degree + 2) / 2;  // ceil((degree + 1) / 2)
}

}  // namespace gensum
