#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gensum/combinat.hpp"
#include "gensum/rational.hpp"

namespace gensum {

// Scaling limit of R(n, s, d) / N^(h-1) at u = (n + dN) / N:
//   f_h(u) = sum_{i=0}^{floor(u)} (-1)^i C(h, i) (u - i)^(h-1) / (h-1)!
// i.e. the density of a sum of h independent uniforms on [0, 1].
// Zero outside [0, h].
double limit_density(double u, int h);

// b_{h,k} = (1/k!) * integral_0^h f_h(u)^k du, by Gauss-Legendre on each unit
// interval with enough nodes to be exact for the degree (h-1)k integrand.
double b_constant(int h, int k);

// (s!d!)^k N^{-((h-1)k+1)} sum_n binom(R(n)/(s!d!), k), with the real
// falling-factorial binomial. Tends to b_{h,k} as N grows.
double b_constant_finite_n_oracle(int k, const SignedCombination& combo, std::int64_t N,
                                  const TableBudget& budget = {});

struct PhaseConstants {
    int h = 0;
    int k_max = 0;
    // b[k-1] = b_{h,k}
    std::vector<double> b;
    // Quadrature nodes per unit interval used for b[k-1].
    std::vector<int> quadrature_nodes;
};

PhaseConstants phase_constants(int h, int k_max);

struct SeriesOptions {
    int k_max = 120;
    double tol = 1e-14;
};

struct SeriesValue {
    double value = 0.0;
    int terms_used = 0;
};

// g(c; s, d) = sum_k (-1)^(k-1) b_{h,k} (c^h / (s!d!))^k, stopped at the
// first m where two consecutive terms fall below tol * |partial sum|.
// Throws SeriesNotConverged when k_max is reached first.
SeriesValue g_series(double c, const SignedCombination& combo, const SeriesOptions& opts = {});

// Same series with precomputed constants (constants.h must equal combo.h()).
SeriesValue g_series(double c, const SignedCombination& combo, const PhaseConstants& constants,
                     double tol);

// g(x) = 2 (e^{-x} - (1 - x)) / x, the two-summand critical-decay profile.
// g(0) = 0 by continuity.
double g_hm_closed_form(double x);

enum class Regime { Fast, Critical, Slow, SlowH2 };

std::string to_string(Regime r);

// Fast iff delta > (h-1)/h, Critical iff equal, otherwise Slow (SlowH2 when
// h == 2). delta must lie in (0, 1).
Regime classify_regime(int h, const Rational& delta);

// E(X_k) ~ b_{h,k} c^{hk} / (s!d!)^k * N^{(h-1)k + 1 - hk*delta}.
double predicted_ex_k(int k, const SignedCombination& combo, double c, const Rational& delta,
                      std::int64_t N);

// Limiting |A_{s1,d1}| / |A_{s2,d2}|. Fast: s2!d2! / (s1!d1!); Critical:
// g(c; combo1) / g(c; combo2). Slow regimes carry no prediction and throw.
double predicted_ratio(const SignedCombination& combo1, const SignedCombination& combo2,
                       Regime regime, double c, const SeriesOptions& opts = {});

// P(n not in A + A) for the binomial model on {0..N}: the pairs {a, n-a}
// are disjoint, so the events multiply. Values above N use n -> 2N - n.
double missing_sum_probability_h2(std::int64_t n, std::int64_t N, double p);

// E|{0..2N} \ (A + A)|, summed directly over n.
double expected_missing_sums_h2(std::int64_t N, double p);

// Slow-decay asymptotes for two summands: S^c ~ 4/p^2, D^c ~ 2/p^2.
double asymptotic_missing_sums_h2(double p);
double asymptotic_missing_differences_h2(double p);

// Reference values for uniformly random subsets (p = 1/2, large N): the
// fraction of sum-dominated sets and the mean numbers of missing sums and
// missing differences.
inline constexpr double kUniformSumDominatedFraction = 4.5e-4;
inline constexpr double kUniformMissingSums = 10.0;
inline constexpr double kUniformMissingDifferences = 6.0;

// Predicted value with its regime and source, attached to experiment rows.
enum class PredictionKind { CardinalityOverN, Ratio, ComplementCount };

struct Prediction {
    Regime regime;
    SignedCombination combo;
    PredictionKind kind;
    double predicted;
    std::string formula_id;
};

}  // namespace gensum
