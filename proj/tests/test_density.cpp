#include <cmath>
#include <random>

#include "doctest.h"

#include "gensum/density.hpp"
#include "gensum/errors.hpp"
#include "gensum/quadrature.hpp"

using namespace gensum;
using doctest::Approx;

namespace {

// Exact b_{h,k} from symbolic integration of the piecewise polynomial f_h^k.
struct ExactB {
    int h;
    int k;
    double value;
};

constexpr ExactB kExactB[] = {
    {2, 2, 1.0 / 3.0},       {2, 3, 1.0 / 12.0},          {2, 4, 1.0 / 60.0},
    {3, 1, 1.0},             {3, 2, 11.0 / 40.0},         {3, 3, 2.0 / 35.0},
    {3, 4, 379.0 / 40320.0}, {4, 2, 151.0 / 630.0},       {4, 3, 1979.0 / 45360.0},
    {4, 4, 40853.0 / 6486480.0}, {5, 2, 15619.0 / 72576.0}, {5, 3, 4393189.0 / 124540416.0},
};

double factorial_d(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials up to degree 2n-1 exactly") {
    for (int n = 1; n <= 40; ++n) {
        const QuadratureRule rule = gauss_legendre(n);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], deg);
            CAPTURE(n);
            CAPTURE(deg);
            CHECK(sum == Approx(1.0 / (deg + 1)).epsilon(1e-13));
        }
    }
    CHECK(gauss_legendre_points_for_degree(0) == 1);
    CHECK(gauss_legendre_points_for_degree(3) == 2);
    CHECK(gauss_legendre_points_for_degree(4) == 3);
}

TEST_CASE("limit_density examples") {
    CHECK(limit_density(1.0, 2) == Approx(1.0));
    CHECK(limit_density(0.5, 2) == Approx(0.5));
    CHECK(limit_density(-0.1, 3) == 0.0);
    CHECK(limit_density(3.5, 3) == 0.0);
    // Irwin-Hall h = 3 at its centre: 3/4.
    CHECK(limit_density(1.5, 3) == Approx(0.75));
}

TEST_CASE("limit_density is a symmetric unimodal probability density") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int h = 2; h <= 6; ++h) {
        const QuadratureRule rule = gauss_legendre(gauss_legendre_points_for_degree(h - 1));
        double total = 0.0;
        for (int j = 0; j < h; ++j) {
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                total += rule.weights[q] * limit_density(j + rule.nodes[q], h);
            }
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);

        const double peak = limit_density(h / 2.0, h);
        for (int i = 0; i < 100; ++i) {
            const double u = unit(rng) * h;
            CHECK(std::abs(limit_density(u, h) - limit_density(h - u, h)) <= 1e-12);
            CHECK(limit_density(u, h) <= peak + 1e-15);
            CHECK(limit_density(u, h) >= 0.0);
        }
    }
}

TEST_CASE("limit_density is the scaling limit of R(n)/N^{h-1}") {
    const std::int64_t N = 4000;
    for (const SignedCombination combo : {SignedCombination{1, 1}, SignedCombination{2, 1}}) {
        for (double u : {0.25, 0.5, 1.0, 1.4}) {
            const auto shifted = static_cast<std::int64_t>(u * N);
            const double r = rep_count(shifted - combo.d() * N, combo, N).convert_to<double>();
            CHECK(r / std::pow(double(N), combo.h() - 1) ==
                  Approx(limit_density(u, combo.h())).epsilon(2e-3));
        }
    }
}

TEST_CASE("b_constant matches exact rational values") {
    for (const auto& e : kExactB) {
        CAPTURE(e.h);
        CAPTURE(e.k);
        CHECK(std::abs(b_constant(e.h, e.k) - e.value) <= 1e-13);
    }
    for (int h = 2; h <= 6; ++h) CHECK(std::abs(b_constant(h, 1) - 1.0) <= 1e-12);
    for (int k = 1; k <= 10; ++k) {
        CHECK(std::abs(b_constant(2, k) - 2.0 / factorial_d(k + 1)) <= 1e-14);
    }
}

TEST_CASE("phase constants are positive and strictly decreasing") {
    for (int h = 2; h <= 6; ++h) {
        const PhaseConstants pc = phase_constants(h, 40);
        REQUIRE(pc.b.size() == 40);
        CHECK(pc.quadrature_nodes[0] == gauss_legendre_points_for_degree(h - 1));
        for (std::size_t k = 0; k < pc.b.size(); ++k) {
            CHECK(pc.b[k] > 0.0);
            if (k + 1 < pc.b.size()) CHECK(pc.b[k + 1] < pc.b[k]);
        }
    }
    CHECK_THROWS_AS(b_constant(1, 1), ConfigError);
    CHECK_THROWS_AS(b_constant(3, 0), ConfigError);
}

TEST_CASE("finite-N oracle approaches b_{h,k}") {
    CHECK(b_constant_finite_n_oracle(1, {1, 1}, 1000) == Approx(1.0).epsilon(0.01));
    CHECK(b_constant_finite_n_oracle(2, {1, 1}, 2000) == Approx(1.0 / 3.0).epsilon(0.01 * 3));
    CHECK(b_constant_finite_n_oracle(2, {2, 1}, 2000) == Approx(b_constant(3, 2)).epsilon(0.05));

    for (int h = 2; h <= 4; ++h) {
        const SignedCombination combo(h - 1, 1);
        for (int k = 1; k <= 3; ++k) {
            const double exact = b_constant(h, k);
            double previous = INFINITY;
            for (std::int64_t N : {250, 500, 1000, 2000}) {
                const double gap = std::abs(b_constant_finite_n_oracle(k, combo, N) - exact);
                CAPTURE(h);
                CAPTURE(k);
                CAPTURE(N);
                CHECK(gap < previous);
                previous = gap;
            }
        }
    }
}

TEST_CASE("g_hm closed form") {
    CHECK(g_hm_closed_form(1.0) == Approx(0.7357588823428847).epsilon(1e-15));
    CHECK(g_hm_closed_form(0.5) == Approx(0.4261226388505337).epsilon(1e-15));
    CHECK(g_hm_closed_form(0.0) == 0.0);
    for (double x : {1e-9, 1e-6, 1e-4, 9e-4}) CHECK(g_hm_closed_form(x) / x == Approx(1.0).epsilon(x));
    CHECK(g_hm_closed_form(1e-3 * (1 - 1e-12)) == Approx(g_hm_closed_form(1e-3)).epsilon(1e-11));
    CHECK(g_hm_closed_form(1e6) == Approx(2.0).epsilon(1e-5));
    double prev = 0.0;
    for (double x = 0.01; x < 50.0; x *= 1.3) {
        const double g = g_hm_closed_form(x);
        CHECK(g > prev);
        CHECK(g < 2.0);
        prev = g;
    }
    CHECK_THROWS_AS(g_hm_closed_form(-1.0), ConfigError);
}

TEST_CASE("g_series agrees with the two-summand closed form") {
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        CHECK(std::abs(g_series(c, {1, 1}).value - g_hm_closed_form(c * c)) <= 1e-8);
        CHECK(std::abs(g_series(c, {2, 0}).value - g_hm_closed_form(c * c / 2)) <= 1e-8);
    }
}

TEST_CASE("g_series for h = 3 matches the integral form of the limit") {
    // g(c; s, d) = integral_0^h (1 - exp(-c^h f_h(u) / (s!d!))) du, evaluated
    // independently with high-precision quadrature.
    CHECK(g_series(2.0, {2, 1}).value == Approx(1.7308908442055354).epsilon(1e-10));
    CHECK(g_series(2.0, {3, 0}).value == Approx(0.9548290001187972).epsilon(1e-10));
}

TEST_CASE("g_series small-c behaviour, monotonicity, and truncation") {
    for (const SignedCombination combo : {SignedCombination{2, 1}, SignedCombination{3, 0},
                                          SignedCombination{2, 2}}) {
        const double c = 1e-3;
        const double leading = std::pow(c, combo.h()) / combo.block_symmetry();
        CHECK(g_series(c, combo).value == Approx(leading).epsilon(1e-6));
        CHECK(g_series(c, combo).value <= combo.h() * leading);
        double prev = 0.0;
        for (double x = 0.1; x < 3.0; x += 0.1) {
            const double g = g_series(x, combo).value;
            CHECK(g > prev);
            prev = g;
        }
    }
    for (double c : {0.5, 1.0, 1.5, 2.0}) {
        CHECK(g_series(c, {2, 1}).value > g_series(c, {3, 0}).value);
        CHECK(g_series(c, {2, 2}).value > g_series(c, {3, 1}).value);
        CHECK(g_series(c, {3, 1}).value > g_series(c, {4, 0}).value);
    }
    const SeriesValue v = g_series(1.0, {1, 1});
    CHECK(v.terms_used > 2);
    CHECK(v.terms_used < 40);
    CHECK_THROWS_AS(g_series(4.0, {1, 1}, SeriesOptions{10, 1e-14}), SeriesNotConverged);
    CHECK_THROWS_AS(g_series(0.0, {1, 1}), ConfigError);
}

TEST_CASE("classify_regime uses exact rationals") {
    CHECK(classify_regime(3, Rational(7, 10)) == Regime::Fast);
    CHECK(classify_regime(3, Rational(2, 3)) == Regime::Critical);
    CHECK(classify_regime(3, parse_rational("4/6")) == Regime::Critical);
    CHECK(classify_regime(2, Rational(3, 10)) == Regime::SlowH2);
    CHECK(classify_regime(3, Rational(1, 2)) == Regime::Slow);
    CHECK(classify_regime(2, Rational(1, 2)) == Regime::Critical);
    CHECK_THROWS_AS(classify_regime(2, Rational(1)), ConfigError);
    CHECK_THROWS_AS(parse_rational("0.5"), ConfigError);
    CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
}

TEST_CASE("predicted_ex_k") {
    const double c = 1.3;
    const Rational delta(3, 4);
    const std::int64_t N = 10'000;
    const double scale = std::pow(double(N), 2.0 - 2.0 * 0.75);
    CHECK(predicted_ex_k(1, {2, 0}, c, delta, N) == Approx(c * c * scale / 2.0));
    CHECK(predicted_ex_k(1, {1, 1}, c, delta, N) == Approx(c * c * scale));
    CHECK(predicted_ex_k(1, {2, 1}, c, Rational(2, 3), N) == Approx(std::pow(c, 3) * N / 2.0));
    CHECK(predicted_ex_k(2, {1, 1}, c, Rational(1, 2), N) ==
          Approx(b_constant(2, 2) * std::pow(c, 4) * N));
}

TEST_CASE("predicted_ratio") {
    CHECK(predicted_ratio({2, 1}, {3, 0}, Regime::Fast, 1.0) == Approx(3.0));
    CHECK(predicted_ratio({1, 1}, {2, 0}, Regime::Fast, 1.0) == Approx(2.0));
    CHECK(predicted_ratio({1, 1}, {2, 0}, Regime::Critical, 1.3) ==
          Approx(g_hm_closed_form(1.69) / g_hm_closed_form(0.845)).epsilon(1e-10));
    for (const Regime r : {Regime::Fast, Regime::Critical}) {
        CHECK(predicted_ratio({2, 1}, {2, 1}, r, 0.7) == Approx(1.0));
    }
    // More minus signs never predicts a smaller set.
    CHECK(predicted_ratio({2, 2}, {3, 1}, Regime::Fast, 1.0) >= 1.0);
    CHECK(predicted_ratio({3, 1}, {4, 0}, Regime::Fast, 1.0) >= 1.0);
    CHECK_THROWS_AS(predicted_ratio({1, 1}, {2, 0}, Regime::SlowH2, 1.0), ConfigError);
    CHECK_THROWS_AS(predicted_ratio({1, 1}, {2, 1}, Regime::Fast, 1.0), ConfigError);
}

TEST_CASE("missing_sum_probability_h2 examples") {
    for (double p : {0.1, 0.5, 0.9}) {
        for (std::int64_t N : {0, 3, 50}) {
            CHECK(missing_sum_probability_h2(0, N, p) == Approx(1.0 - p));
            if (N >= 1) CHECK(missing_sum_probability_h2(1, N, p) == Approx(1.0 - p * p));
            CHECK(missing_sum_probability_h2(2 * N, N, p) == Approx(1.0 - p));
        }
    }
    CHECK_THROWS_AS(missing_sum_probability_h2(7, 3, 0.5), ConfigError);
}

TEST_CASE("missing_sum_probability_h2 equals exhaustive weighted enumeration") {
    for (double p : {0.2, 0.5, 0.73}) {
        for (int N = 0; N <= 12; ++N) {
            const int size = N + 1;
            std::vector<double> missing(static_cast<std::size_t>(2 * N + 1), 0.0);
            for (std::uint32_t mask = 0; mask < (1u << size); ++mask) {
                const int k = std::popcount(mask);
                const double w = std::pow(p, k) * std::pow(1.0 - p, size - k);
                std::vector<bool> present(missing.size(), false);
                for (int a = 0; a < size; ++a) {
                    if (!(mask >> a & 1u)) continue;
                    for (int b = a; b < size; ++b) {
                        if (mask >> b & 1u) present[static_cast<std::size_t>(a + b)] = true;
                    }
                }
                for (std::size_t n = 0; n < missing.size(); ++n) {
                    if (!present[n]) missing[n] += w;
                }
            }
            for (int n = 0; n <= 2 * N; ++n) {
                CHECK(std::abs(missing_sum_probability_h2(n, N, p) - missing[static_cast<std::size_t>(n)]) <=
                      1e-12);
            }
        }
    }
}

TEST_CASE("expected_missing_sums_h2") {
    CHECK(std::abs(expected_missing_sums_h2(100'000, 0.5) - 10.0) <= 0.01);
    CHECK(expected_missing_sums_h2(2'000'000, 0.01) == Approx(40'000.0).epsilon(0.01));
    for (double p : {0.2, 0.6}) CHECK(expected_missing_sums_h2(0, p) == Approx(1.0 - p));
    CHECK(asymptotic_missing_sums_h2(0.01) == Approx(40'000.0));
    CHECK(asymptotic_missing_differences_h2(0.01) == Approx(20'000.0));
}
