#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gensum/combinat.hpp"
#include "gensum/density.hpp"
#include "gensum/rational.hpp"
#include "gensum/sumset.hpp"

namespace gensum {

enum class ExperimentKind { FastRatio, CriticalSize, SlowH2, Mstd, Concentration, BConvergence };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

// Tolerances are engineering choices (the asymptotic statements carry no
// rates), so every one of them lives here and is echoed in the report.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::FastRatio;
    std::vector<SignedCombination> combos;
    std::vector<std::int64_t> Ns;
    double c = 1.0;
    std::optional<Rational> delta;
    std::optional<double> p;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;

    // Relative tolerance on the gating mean-vs-prediction rows.
    double tolerance = 0.10;
    // critical-size: minimum fraction of trials where the combination with
    // more minus signs gives the larger set.
    double dominance_fraction = 0.95;
    // slow-h2: pointwise missing-frequency check at `pointwise_points` values
    // of n, each within `pointwise_sigmas` standard errors.
    int pointwise_points = 20;
    double pointwise_sigmas = 5.0;
    // mstd: accepted bracket for the sum-dominated fraction.
    double mstd_fraction_lo = 2e-4;
    double mstd_fraction_hi = 9e-4;
    // b-convergence: which b_{h,k} to tabulate.
    std::vector<int> ks = {1, 2, 3};

    SumsetBudget sumset_budget;
    TableBudget table_budget;
};

// Default relative tolerance per kind, used when a config omits it.
double default_tolerance(ExperimentKind kind);

// Parses the JSON config (delta as a string rational such as "2/3"). Unknown
// keys and kind-specific violations throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

struct SampleStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double stderr_mean = 0.0;
};

// Mean and sample standard deviation with compensated summation in input
// order.
SampleStats summarize(const std::vector<double>& values);

struct AggregateRow {
    std::string statistic;
    int s = 0;
    int d = 0;
    std::int64_t N = 0;
    SampleStats stats;
    double predicted = 0.0;
    double rel_err = 0.0;
    double tolerance = 0.0;
    // When set, pass means lo <= mean <= hi instead of rel_err <= tolerance.
    std::optional<std::pair<double, double>> bounds;
    std::string formula;
    bool gating = true;
    bool pass = false;
};

struct ReportCheck {
    std::string name;
    std::vector<double> values;
    std::string detail;
    bool pass = false;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<AggregateRow> rows;
    std::vector<ReportCheck> checks;
    std::int64_t excluded_empty_trials = 0;
    bool pass = false;
};

nlohmann::ordered_json report_to_json(const ExperimentReport& report);
// kind,s,d,N,trials,mean,stddev,stderr,predicted,rel_err,pass,statistic
void write_report_csv(std::ostream& out, const ExperimentReport& report);

// Trial t of every experiment draws its set from sub-stream (seed, t).
// Results do not depend on `workers`.
ExperimentReport run_fast_ratio(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_critical_size(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_slow_h2(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_mstd(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_concentration(const ExperimentConfig& config, unsigned workers = 1);
ExperimentReport run_b_convergence(const ExperimentConfig& config, unsigned workers = 1);

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers = 1);

// Values of n probed by the slow-h2 pointwise check.
std::vector<std::int64_t> pointwise_probe_values(std::int64_t N, double p, int points);

}  // namespace gensum
