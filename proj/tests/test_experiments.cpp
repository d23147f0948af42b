#include <cmath>
#include <sstream>

#include "doctest.h"

#include "gensum/errors.hpp"
#include "gensum/experiments.hpp"

using namespace gensum;
using json = nlohmann::json;

namespace {

std::string dump(const ExperimentReport& r) { return report_to_json(r).dump(); }

std::string csv(const ExperimentReport& r) {
    std::ostringstream out;
    write_report_csv(out, r);
    return out.str();
}

}  // namespace

TEST_CASE("summarize") {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.count == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.stderr_mean == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(summarize({}).count == 0);
    CHECK(summarize({7.0}).stddev == 0.0);

    // Compensation keeps the small terms a naive left fold would drop.
    std::vector<double> v = {1e16};
    for (int i = 0; i < 1000; ++i) v.push_back(1.0);
    v.push_back(-1e16);
    CHECK(summarize(v).mean * static_cast<double>(v.size()) == doctest::Approx(1000.0));
}

TEST_CASE("parse_config accepts documented fields") {
    const auto c = parse_config(json::parse(R"({
        "kind": "critical-size", "combos": [[2,1], {"s":3,"d":0}], "N": [1000, 2000],
        "c": 2, "delta": "2/3", "trials": 5, "seed": 9})"));
    CHECK(c.kind == ExperimentKind::CriticalSize);
    CHECK(c.combos == std::vector<SignedCombination>{{2, 1}, {3, 0}});
    CHECK(c.Ns == std::vector<std::int64_t>{1000, 2000});
    CHECK(*c.delta == Rational(2, 3));
    CHECK(c.tolerance == 0.05);
    CHECK(c.trials == 5);
    CHECK(c.seed == 9);

    const auto m = parse_config(json::parse(R"({"kind": "mstd", "N": 100})"));
    CHECK(*m.p == 0.5);
    CHECK(m.combos.size() == 2);
    CHECK(m.tolerance == 0.10);

    // The echoed config parses back to itself.
    const json echoed = json::parse(config_to_json(c).dump());
    json round = echoed;
    round.erase("p");
    const auto again = parse_config(round);
    CHECK(config_to_json(again) == config_to_json(c));
}

TEST_CASE("parse_config rejects bad input naming the field") {
    auto error_for = [](const char* text) -> std::string {
        try {
            parse_config(json::parse(text));
        } catch (const ConfigError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(error_for(R"({"kind": "fast-ratio", "combos": [[2,1],[3,0]], "N": 100, "delta": "4/5", "bogus": 1})")
              .find("bogus") != std::string::npos);
    CHECK(error_for(R"({"kind": "warp", "N": 10})").find("kind") != std::string::npos);
    CHECK(error_for(R"({"kind": "critical-size", "combos": [[1,1]], "N": 100, "delta": 0.5})")
              .find("delta") != std::string::npos);
    CHECK(error_for(R"({"kind": "critical-size", "combos": [[1,1]], "N": 100, "delta": "0.5"})")
              .find("delta") != std::string::npos);
    // Regime mismatches.
    CHECK(error_for(R"({"kind": "critical-size", "combos": [[2,1]], "N": 100, "delta": "1/2"})")
              .find("regime") != std::string::npos);
    CHECK(error_for(R"({"kind": "fast-ratio", "combos": [[2,1],[3,0]], "N": 100, "delta": "2/3"})")
              .find("regime") != std::string::npos);
    CHECK(error_for(R"({"kind": "slow-h2", "N": 1000000, "delta": "1/2"})").find("regime") !=
          std::string::npos);
    // slow-h2 scale check: 4/p^2 must be small against 2N+1.
    CHECK(error_for(R"({"kind": "slow-h2", "N": 1000, "delta": "3/10"})").find("N") !=
          std::string::npos);
    CHECK(error_for(R"({"kind": "mstd", "N": 100, "delta": "1/2"})").find("p") != std::string::npos);
    CHECK(error_for(R"({"kind": "concentration", "combos": [[1,1]], "N": 1000, "delta": "1/2"})")
              .find("N") != std::string::npos);
    CHECK(error_for(R"({"kind": "b-convergence", "combos": [[3,2]], "N": [10, 20]})").find("h") !=
          std::string::npos);
    CHECK(error_for(R"({"kind": "b-convergence", "combos": [[1,1]], "N": [10, 20], "k": [4]})")
              .find("k") != std::string::npos);
    CHECK(error_for(R"({"kind": "fast-ratio", "combos": [[3,0],[2,1]], "N": 100, "delta": "4/5"})")
              .find("combos") != std::string::npos);
    CHECK(error_for(R"({"kind": "fast-ratio", "combos": [[2,1],[3,0]], "N": 100, "delta": "4/5", "trials": 0})")
              .find("trials") != std::string::npos);
    CHECK(error_for(R"({"kind": "critical-size", "combos": [[1,2]], "N": 100, "delta": "1/2"})")
              .find("combos") != std::string::npos);
    CHECK(error_for(R"([1, 2])") != "");
}

TEST_CASE("fast-ratio: a combination against itself gives ratio exactly 1") {
    auto c = parse_config(json::parse(
        R"({"kind": "fast-ratio", "combos": [[2,1],[2,1]], "N": 5000, "delta": "4/5", "trials": 20})"));
    const auto r = run_fast_ratio(c);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].predicted == 1.0);
    CHECK(r.rows[0].stats.mean == 1.0);
    CHECK(r.rows[0].stats.stddev == 0.0);
    CHECK(r.rows[0].pass);
    CHECK(r.rows[0].stats.count + r.excluded_empty_trials == 20);
}

TEST_CASE("fast-ratio at small scale points toward s2!d2!/(s1!d1!)") {
    auto c = parse_config(json::parse(
        R"({"kind": "fast-ratio", "combos": [[1,1],[2,0]], "N": 100000, "delta": "3/4", "trials": 40, "seed": 3})"));
    const auto r = run_fast_ratio(c);
    CHECK(r.rows[0].predicted == 2.0);
    CHECK(r.rows[0].stats.mean > 1.7);
    CHECK(r.rows[0].stats.mean <= 2.0);
    CHECK_THROWS_AS(run_critical_size(c), ConfigError);
}

TEST_CASE("critical-size (h=2) at small scale") {
    auto c = parse_config(json::parse(
        R"({"kind": "critical-size", "combos": [[1,1],[2,0]], "N": 20000, "delta": "1/2", "trials": 30, "seed": 1})"));
    const auto r = run_critical_size(c);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows[0].predicted == doctest::Approx(g_hm_closed_form(1.0)).epsilon(1e-9));
    CHECK(r.rows[1].predicted == doctest::Approx(g_hm_closed_form(0.5)).epsilon(1e-9));
    CHECK(r.rows[0].rel_err < 0.05);
    CHECK(r.rows[1].rel_err < 0.05);
    CHECK(r.rows[2].statistic == "dominance(1,1)>(2,0)");
    CHECK(r.rows[2].stats.mean >= 0.95);
    CHECK(r.pass);
}

TEST_CASE("slow-h2 at small scale") {
    auto c = parse_config(json::parse(
        R"({"kind": "slow-h2", "N": 200000, "delta": "3/10", "trials": 20, "seed": 4})"));
    const auto r = run_slow_h2(c);
    REQUIRE(r.rows.size() == 4);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.checks[0].values.size() == 20);
    // Exact expectation and asymptote agree closely in this regime.
    CHECK(r.rows[0].predicted == doctest::Approx(r.rows[1].predicted).epsilon(0.02));
    CHECK(r.rows[0].rel_err < 0.10);
    CHECK(r.rows[3].stats.mean == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("pointwise probes stay inside [0, N]") {
    const auto probes = pointwise_probe_values(1000, 0.1, 20);
    CHECK(probes.size() == 20);
    CHECK(probes.front() == 0);
    CHECK(probes.back() <= 400);
    for (auto n : pointwise_probe_values(30, 0.1, 20)) CHECK(n <= 30);
}

TEST_CASE("mstd at small scale") {
    auto c = parse_config(json::parse(R"({"kind": "mstd", "N": 100, "trials": 20000, "seed": 2})"));
    const auto r = run_mstd(c);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].bounds.has_value());
    CHECK(r.rows[1].stats.mean == doctest::Approx(10.0).epsilon(0.10));
    CHECK(r.rows[2].stats.mean == doctest::Approx(6.0).epsilon(0.10));

    auto biased = parse_config(json::parse(R"({"kind": "mstd", "N": 100, "p": 0.4, "trials": 50})"));
    const auto rb = run_mstd(biased);
    CHECK_FALSE(rb.rows[0].gating);
    CHECK_FALSE(rb.rows[2].gating);
}

TEST_CASE("concentration and b-convergence") {
    auto c = parse_config(json::parse(
        R"({"kind": "concentration", "combos": [[1,1]], "N": [1000, 10000, 100000], "delta": "1/2", "trials": 60})"));
    const auto r = run_concentration(c);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.checks[0].values.size() == 3);
    CHECK(r.checks[0].pass);

    auto b = parse_config(json::parse(
        R"({"kind": "b-convergence", "combos": [[1,1],[2,1]], "N": [100, 200, 400], "k": [1, 2]})"));
    const auto rb = run_b_convergence(b);
    CHECK(rb.rows.size() == 12);
    CHECK(rb.checks.size() == 8);
    CHECK(rb.pass);

    auto tight = parse_config(json::parse(
        R"({"kind": "b-convergence", "combos": [[2,1]], "N": [10, 20], "budgets": {"max_entries": 5}})"));
    CHECK_THROWS_AS(run_b_convergence(tight), BudgetExceeded);
}

TEST_CASE("reports are identical for any worker count") {
    for (const char* text :
         {R"({"kind": "critical-size", "combos": [[2,1],[3,0]], "N": [2000, 3000], "c": 2, "delta": "2/3", "trials": 13, "seed": 11})",
          R"({"kind": "slow-h2", "N": 100000, "delta": "1/4", "trials": 9, "seed": 5})",
          R"({"kind": "mstd", "N": 60, "trials": 500, "seed": 8})"}) {
        const auto c = parse_config(json::parse(text));
        const auto one = run_experiment(c, 1);
        for (unsigned w : {2u, 3u, 8u}) {
            const auto many = run_experiment(c, w);
            CHECK(dump(one) == dump(many));
            CHECK(csv(one) == csv(many));
        }
        CHECK(dump(one) == dump(run_experiment(c, 1)));
    }
}

TEST_CASE("report CSV layout") {
    auto c = parse_config(json::parse(
        R"({"kind": "fast-ratio", "combos": [[1,1],[1,1]], "N": 100000, "delta": "3/4", "trials": 3})"));
    const std::string out = csv(run_fast_ratio(c));
    CHECK(out.rfind("kind,s,d,N,trials,mean,stddev,stderr,predicted,rel_err,pass,statistic\n", 0) == 0);
    CHECK(out.find("fast-ratio,1,1,100000,3,1,0,0,1,0,true,ratio(1,1)/(1,1)\n") != std::string::npos);
}
