#include "gensum/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gensum/errors.hpp"
#include "gensum/quadrature.hpp"

namespace gensum {

namespace {

double binom_double(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// x^k / k! without intermediate overflow.
double power_over_factorial(double x, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= x / i;
    return r;
}

// x (x-1) ... (x-k+1) / k!
double binom_real(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= (x - i) / (i + 1);
    return r;
}

void require_h(int h) {
    if (h < 2 || h > 20) throw ConfigError("h must lie in [2, 20], got " + std::to_string(h));
}

}  // namespace

double limit_density(double u, int h) {
    require_h(h);
    if (!(u > 0.0) || !(u < h)) return 0.0;
    // The alternating sum is better conditioned on the left half.
    const double v = std::min(u, h - u);
    double sum = 0.0;
    for (int i = 0; i <= static_cast<int>(std::floor(v)); ++i) {
        const double term = binom_double(h, i) * std::pow(v - i, h - 1);
        sum += (i % 2 == 0) ? term : -term;
    }
    return std::max(0.0, sum / std::tgamma(h));
}

double b_constant(int h, int k) {
    require_h(h);
    if (k < 1) throw ConfigError("k must be >= 1");
    const int points = gauss_legendre_points_for_degree((h - 1) * k);
    const QuadratureRule rule = gauss_legendre(points);
    double total = 0.0;
    for (int j = 0; j < h; ++j) {
        double piece = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            piece += rule.weights[q] * power_over_factorial(limit_density(j + rule.nodes[q], h), k);
        }
        total += piece;
    }
    return total;
}

PhaseConstants phase_constants(int h, int k_max) {
    require_h(h);
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    PhaseConstants out;
    out.h = h;
    out.k_max = k_max;
    for (int k = 1; k <= k_max; ++k) {
        out.b.push_back(b_constant(h, k));
        out.quadrature_nodes.push_back(gauss_legendre_points_for_degree((h - 1) * k));
    }
    return out;
}

double b_constant_finite_n_oracle(int k, const SignedCombination& combo, std::int64_t N,
                                  const TableBudget& budget) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (N < 1) throw ConfigError("N must be >= 1");
    const RepresentationCounts counts = rep_counts_all(combo, N, budget);
    const double sym = static_cast<double>(combo.block_symmetry());
    double sum = 0.0;
    for (const BigInt& r : counts.counts) sum += binom_real(r.convert_to<double>() / sym, k);
    const double exponent = static_cast<double>((combo.h() - 1) * k + 1);
    return std::pow(sym, k) * sum / std::pow(static_cast<double>(N), exponent);
}

SeriesValue g_series(double c, const SignedCombination& combo, const PhaseConstants& constants,
                     double tol) {
    if (!(c > 0.0)) throw ConfigError("c must be > 0");
    if (constants.h != combo.h()) throw ConfigError("phase constants built for a different h");
    const double x = std::pow(c, combo.h()) / static_cast<double>(combo.block_symmetry());

    double sum = 0.0;
    double x_power = 1.0;
    bool previous_small = false;
    for (int k = 1; k <= constants.k_max; ++k) {
        x_power *= x;
        const double term = constants.b[k - 1] * x_power;
        sum += (k % 2 == 1) ? term : -term;
        const bool small = std::abs(term) < tol * std::abs(sum);
        if (small && previous_small) return {sum, k};
        previous_small = small;
    }
    throw SeriesNotConverged("g series at c=" + std::to_string(c) + " (s=" +
                             std::to_string(combo.s()) + ", d=" + std::to_string(combo.d()) +
                             ") did not reach tol within k_max=" +
                             std::to_string(constants.k_max) + " terms");
}

SeriesValue g_series(double c, const SignedCombination& combo, const SeriesOptions& opts) {
    return g_series(c, combo, phase_constants(combo.h(), opts.k_max), opts.tol);
}

double g_hm_closed_form(double x) {
    if (x < 0.0) throw ConfigError("g is defined for x >= 0");
    if (x == 0.0) return 0.0;
    if (x < 1e-3) {
        // 2 (e^{-x} - 1 + x) / x = x - x^2/3 + x^3/12 - x^4/60 + ...
        double sum = 0.0;
        double term = x;  // 2 x^{k} / (k+1)! for k = 1
        for (int k = 1; k < 8; ++k) {
            sum += (k % 2 == 1) ? term : -term;
            term *= x / (k + 2);
        }
        return sum;
    }
    return 2.0 * (std::expm1(-x) + x) / x;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Fast: return "fast";
        case Regime::Critical: return "critical";
        case Regime::Slow: return "slow";
        case Regime::SlowH2: return "slow-h2";
    }
    return "unknown";
}

Regime classify_regime(int h, const Rational& delta) {
    require_h(h);
    if (delta <= 0 || delta >= 1) {
        throw ConfigError("delta must lie in (0, 1), got " + to_string(delta));
    }
    const Rational boundary(h - 1, h);
    if (delta > boundary) return Regime::Fast;
    if (delta == boundary) return Regime::Critical;
    return h == 2 ? Regime::SlowH2 : Regime::Slow;
}

double predicted_ex_k(int k, const SignedCombination& combo, double c, const Rational& delta,
                      std::int64_t N) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (!(c > 0.0)) throw ConfigError("c must be > 0");
    if (delta <= 0 || delta >= 1) throw ConfigError("delta must lie in (0, 1)");
    if (N < 1) throw ConfigError("N must be >= 1");
    const int h = combo.h();
    const double sym = static_cast<double>(combo.block_symmetry());
    const double exponent = (h - 1) * k + 1 - h * k * to_double(delta);
    return b_constant(h, k) * std::pow(c, h * k) / std::pow(sym, k) *
           std::pow(static_cast<double>(N), exponent);
}

double predicted_ratio(const SignedCombination& combo1, const SignedCombination& combo2,
                       Regime regime, double c, const SeriesOptions& opts) {
    if (combo1.h() != combo2.h()) throw ConfigError("ratio needs combinations with equal h");
    switch (regime) {
        case Regime::Fast:
            return static_cast<double>(combo2.block_symmetry()) /
                   static_cast<double>(combo1.block_symmetry());
        case Regime::Critical: {
            const PhaseConstants constants = phase_constants(combo1.h(), opts.k_max);
            return g_series(c, combo1, constants, opts.tol).value /
                   g_series(c, combo2, constants, opts.tol).value;
        }
        case Regime::Slow:
        case Regime::SlowH2:
            break;
    }
    throw ConfigError("no ratio prediction in the " + to_string(regime) + " regime");
}

double missing_sum_probability_h2(std::int64_t n, std::int64_t N, double p) {
    if (N < 0) throw ConfigError("N must be >= 0");
    if (n < 0 || n > 2 * N) throw ConfigError("n must lie in [0, 2N]");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0, 1)");
    const std::int64_t m = n > N ? 2 * N - n : n;
    const double q = 1.0 - p * p;
    if (m % 2 == 0) return std::pow(q, static_cast<double>(m / 2)) * (1.0 - p);
    return std::pow(q, static_cast<double>((m + 1) / 2));
}

double expected_missing_sums_h2(std::int64_t N, double p) {
    if (N < 0) throw ConfigError("N must be >= 0");
    double sum = 0.0;
    double comp = 0.0;
    for (std::int64_t n = 0; n <= 2 * N; ++n) {
        // Neumaier summation; terms span many magnitudes for large N.
        const double v = missing_sum_probability_h2(n, N, p);
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double asymptotic_missing_sums_h2(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0, 1)");
    return 4.0 / (p * p);
}

double asymptotic_missing_differences_h2(double p) {
    return asymptotic_missing_sums_h2(p) / 2.0;
}

}  // namespace gensum
