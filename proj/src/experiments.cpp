#include "gensum/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "gensum/errors.hpp"
#include "gensum/sampling.hpp"

namespace gensum {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Trial t always writes slot t, so the result vector is the same for any
// number of workers.
template <typename T, typename Fn>
std::vector<T> run_trials(std::int64_t trials, unsigned workers, Fn&& fn) {
    std::vector<T> out(static_cast<std::size_t>(trials));
    const auto threads = static_cast<std::int64_t>(std::min<std::int64_t>(workers, trials));
    if (threads <= 1) {
        for (std::int64_t t = 0; t < trials; ++t) out[static_cast<std::size_t>(t)] = fn(t);
        return out;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::int64_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::int64_t t = next.fetch_add(1);
                    if (t >= trials) return;
                    try {
                        out[static_cast<std::size_t>(t)] = fn(t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(trials);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string combo_label(const SignedCombination& c) {
    return "(" + std::to_string(c.s()) + "," + std::to_string(c.d()) + ")";
}

AggregateRow make_row(std::string statistic, const SignedCombination& combo, std::int64_t N,
                      const std::vector<double>& values, double predicted, double tolerance,
                      std::string formula, bool gating = true) {
    AggregateRow row;
    row.statistic = std::move(statistic);
    row.s = combo.s();
    row.d = combo.d();
    row.N = N;
    row.stats = summarize(values);
    row.predicted = predicted;
    row.rel_err = predicted != 0.0 ? std::abs(row.stats.mean - predicted) / std::abs(predicted)
                                   : std::abs(row.stats.mean);
    row.tolerance = tolerance;
    row.formula = std::move(formula);
    row.gating = gating;
    row.pass = row.stats.count > 0 && row.rel_err <= tolerance;
    return row;
}

void finalize(ExperimentReport& report) {
    report.pass = std::all_of(report.rows.begin(), report.rows.end(),
                              [](const AggregateRow& r) { return !r.gating || r.pass; }) &&
                  std::all_of(report.checks.begin(), report.checks.end(),
                              [](const ReportCheck& c) { return c.pass; });
}

SampleParameters decay_params(const ExperimentConfig& config, std::int64_t N) {
    return SampleParameters::decaying(N, config.c, *config.delta, config.seed);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void require_kind(const ExperimentConfig& config, ExperimentKind kind) {
    if (config.kind != kind) {
        throw ConfigError("kind: runner for " + to_string(kind) + " got a " +
                          to_string(config.kind) + " config");
    }
}

template <typename T>
T get_field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

SignedCombination parse_combo(const json& j) {
    try {
        if (j.is_array() && j.size() == 2) return {j[0].get<int>(), j[1].get<int>()};
        if (j.is_object()) return {j.at("s").get<int>(), j.at("d").get<int>()};
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field 'combos': ") + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("field 'combos': ") + e.what());
    }
    throw ConfigError("field 'combos': each entry must be [s, d] or {\"s\": s, \"d\": d}");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::FastRatio: return "fast-ratio";
        case ExperimentKind::CriticalSize: return "critical-size";
        case ExperimentKind::SlowH2: return "slow-h2";
        case ExperimentKind::Mstd: return "mstd";
        case ExperimentKind::Concentration: return "concentration";
        case ExperimentKind::BConvergence: return "b-convergence";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::FastRatio, ExperimentKind::CriticalSize, ExperimentKind::SlowH2,
                   ExperimentKind::Mstd, ExperimentKind::Concentration,
                   ExperimentKind::BConvergence}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("field 'kind': unknown experiment kind \"" + name + "\"");
}

double default_tolerance(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::CriticalSize: return 0.05;
        case ExperimentKind::BConvergence: return 0.05;
        default: return 0.10;
    }
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {
        "kind", "combos", "N", "c", "delta", "p", "trials", "seed", "tolerance",
        "dominance_fraction", "pointwise_points", "pointwise_sigmas", "mstd_fraction_bounds", "k",
        "budgets"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) throw ConfigError("unknown config field '" + item.key() + "'");
    }

    ExperimentConfig config;
    config.kind = parse_experiment_kind(get_field<std::string>(j, "kind"));
    config.tolerance = default_tolerance(config.kind);

    if (j.contains("combos")) {
        const json& combos = j.at("combos");
        if (!combos.is_array()) throw ConfigError("field 'combos': expected an array");
        for (const auto& c : combos) config.combos.push_back(parse_combo(c));
    } else if (config.kind == ExperimentKind::SlowH2 || config.kind == ExperimentKind::Mstd) {
        config.combos = {SignedCombination(2, 0), SignedCombination(1, 1)};
    }

    if (j.contains("N")) {
        const json& n = j.at("N");
        if (n.is_array()) {
            config.Ns = get_field<std::vector<std::int64_t>>(j, "N");
        } else {
            config.Ns = {get_field<std::int64_t>(j, "N")};
        }
    }
    if (j.contains("c")) config.c = get_field<double>(j, "c");
    if (j.contains("delta")) {
        if (!j.at("delta").is_string()) {
            throw ConfigError("field 'delta': must be a string rational such as \"2/3\"");
        }
        try {
            config.delta = parse_rational(j.at("delta").get<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("field 'delta': ") + e.what());
        }
    }
    if (j.contains("p")) config.p = get_field<double>(j, "p");
    if (config.kind == ExperimentKind::Mstd && !config.p && !config.delta) config.p = 0.5;
    if (j.contains("trials")) config.trials = get_field<std::int64_t>(j, "trials");
    if (j.contains("seed")) config.seed = get_field<std::uint64_t>(j, "seed");
    if (j.contains("tolerance")) config.tolerance = get_field<double>(j, "tolerance");
    if (j.contains("dominance_fraction")) {
        config.dominance_fraction = get_field<double>(j, "dominance_fraction");
    }
    if (j.contains("pointwise_points")) config.pointwise_points = get_field<int>(j, "pointwise_points");
    if (j.contains("pointwise_sigmas")) config.pointwise_sigmas = get_field<double>(j, "pointwise_sigmas");
    if (j.contains("mstd_fraction_bounds")) {
        const auto b = get_field<std::vector<double>>(j, "mstd_fraction_bounds");
        require(b.size() == 2, "field 'mstd_fraction_bounds': expected [lo, hi]");
        config.mstd_fraction_lo = b[0];
        config.mstd_fraction_hi = b[1];
    }
    if (j.contains("k")) config.ks = get_field<std::vector<int>>(j, "k");
    if (j.contains("budgets")) {
        const json& b = j.at("budgets");
        require(b.is_object(), "field 'budgets': expected an object");
        for (const auto& item : b.items()) {
            if (item.key() == "max_entries") {
                config.table_budget.max_entries = get_field<std::uint64_t>(b, "max_entries");
            } else if (item.key() == "max_bits") {
                config.sumset_budget.max_bits = get_field<std::uint64_t>(b, "max_bits");
            } else {
                throw ConfigError("unknown config field 'budgets." + item.key() + "'");
            }
        }
    }
    validate(config);
    return config;
}

ordered_json config_to_json(const ExperimentConfig& config) {
    ordered_json j;
    j["kind"] = to_string(config.kind);
    j["combos"] = ordered_json::array();
    for (const auto& c : config.combos) j["combos"].push_back({c.s(), c.d()});
    j["N"] = config.Ns;
    j["c"] = config.c;
    j["delta"] = config.delta ? ordered_json(to_string(*config.delta)) : ordered_json(nullptr);
    j["p"] = config.p ? ordered_json(*config.p) : ordered_json(nullptr);
    j["trials"] = config.trials;
    j["seed"] = config.seed;
    j["tolerance"] = config.tolerance;
    j["dominance_fraction"] = config.dominance_fraction;
    j["pointwise_points"] = config.pointwise_points;
    j["pointwise_sigmas"] = config.pointwise_sigmas;
    j["mstd_fraction_bounds"] = {config.mstd_fraction_lo, config.mstd_fraction_hi};
    j["k"] = config.ks;
    j["budgets"] = {{"max_entries", config.table_budget.max_entries},
                    {"max_bits", config.sumset_budget.max_bits}};
    return j;
}

void validate(const ExperimentConfig& config) {
    require(!config.Ns.empty(), "field 'N': at least one N is required");
    for (auto N : config.Ns) require(N >= 1, "field 'N': every N must be >= 1");
    require(config.trials >= 1, "field 'trials': must be >= 1");
    require(config.tolerance > 0.0, "field 'tolerance': must be > 0");
    require(config.c > 0.0, "field 'c': must be > 0");
    require(!config.combos.empty(), "field 'combos': at least one combination is required");
    require(!(config.delta && config.p), "fields 'delta' and 'p' are mutually exclusive");
    if (config.delta) {
        require(*config.delta > 0 && *config.delta < 1, "field 'delta': must lie in (0, 1)");
    }
    const int h = config.combos.front().h();
    const bool same_h = std::all_of(config.combos.begin(), config.combos.end(),
                                    [h](const SignedCombination& c) { return c.h() == h; });

    switch (config.kind) {
        case ExperimentKind::FastRatio:
            require(config.combos.size() == 2, "field 'combos': fast-ratio needs exactly two");
            require(same_h, "field 'combos': fast-ratio combinations must share h");
            require(config.combos[0].d() >= config.combos[1].d(),
                    "field 'combos': the first combination must have at least as many minus signs");
            require(config.delta.has_value(), "field 'delta': fast-ratio needs delta");
            require(classify_regime(h, *config.delta) == Regime::Fast,
                    "field 'delta': regime mismatch, fast-ratio needs delta > (h-1)/h");
            break;
        case ExperimentKind::CriticalSize:
            require(same_h, "field 'combos': critical-size combinations must share h");
            require(config.delta.has_value(), "field 'delta': critical-size needs delta");
            require(classify_regime(h, *config.delta) == Regime::Critical,
                    "field 'delta': regime mismatch, critical-size needs delta == (h-1)/h");
            require(config.dominance_fraction > 0.0 && config.dominance_fraction <= 1.0,
                    "field 'dominance_fraction': must lie in (0, 1]");
            break;
        case ExperimentKind::SlowH2:
            require(same_h && h == 2, "field 'combos': slow-h2 needs h = 2");
            require(config.delta.has_value(), "field 'delta': slow-h2 needs delta");
            require(classify_regime(2, *config.delta) == Regime::SlowH2,
                    "field 'delta': regime mismatch, slow-h2 needs delta < 1/2");
            for (auto N : config.Ns) {
                const double p = decay_probability(N, config.c, *config.delta);
                require(asymptotic_missing_sums_h2(p) < (2.0 * static_cast<double>(N) + 1.0) / 10.0,
                        "field 'N': slow-h2 needs 4/p^2 < (2N+1)/10 (N=" + std::to_string(N) + ")");
            }
            require(config.pointwise_points >= 1, "field 'pointwise_points': must be >= 1");
            require(config.pointwise_sigmas > 0.0, "field 'pointwise_sigmas': must be > 0");
            break;
        case ExperimentKind::Mstd:
            require(config.p.has_value(), "field 'p': mstd needs a fixed p");
            require(*config.p > 0.0 && *config.p < 1.0, "field 'p': must lie in (0, 1)");
            require(config.mstd_fraction_lo <= config.mstd_fraction_hi,
                    "field 'mstd_fraction_bounds': lo must not exceed hi");
            break;
        case ExperimentKind::Concentration: {
            require(config.delta.has_value(), "field 'delta': concentration needs delta");
            require(config.Ns.size() >= 2, "field 'N': concentration needs at least two values");
            require(std::is_sorted(config.Ns.begin(), config.Ns.end()) &&
                        std::adjacent_find(config.Ns.begin(), config.Ns.end()) == config.Ns.end(),
                    "field 'N': concentration needs strictly increasing N");
            for (const auto& combo : config.combos) {
                const Regime r = classify_regime(combo.h(), *config.delta);
                require(r == Regime::Fast || r == Regime::Critical,
                        "field 'delta': regime mismatch, concentration needs delta >= (h-1)/h");
            }
            break;
        }
        case ExperimentKind::BConvergence:
            for (const auto& combo : config.combos) {
                require(combo.h() <= 4, "field 'combos': b-convergence supports h <= 4");
            }
            require(!config.ks.empty(), "field 'k': at least one k is required");
            for (int k : config.ks) require(k >= 1 && k <= 3, "field 'k': values must lie in [1, 3]");
            require(std::is_sorted(config.Ns.begin(), config.Ns.end()),
                    "field 'N': b-convergence needs increasing N");
            break;
    }
}

SampleStats summarize(const std::vector<double>& values) {
    SampleStats s;
    s.count = static_cast<std::int64_t>(values.size());
    if (values.empty()) return s;
    auto compensated = [](const std::vector<double>& xs, auto&& f) {
        double sum = 0.0;
        double comp = 0.0;
        for (double x : xs) {
            const double v = f(x);
            const double t = sum + v;
            comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        return sum + comp;
    };
    const double n = static_cast<double>(values.size());
    s.mean = compensated(values, [](double x) { return x; }) / n;
    if (values.size() > 1) {
        const double m = s.mean;
        const double ss = compensated(values, [m](double x) { return (x - m) * (x - m); });
        s.stddev = std::sqrt(ss / (n - 1.0));
        s.stderr_mean = s.stddev / std::sqrt(n);
    }
    return s;
}

ordered_json report_to_json(const ExperimentReport& report) {
    ordered_json j;
    j["config"] = config_to_json(report.config);
    j["rows"] = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["kind"] = to_string(report.config.kind);
        row["statistic"] = r.statistic;
        row["s"] = r.s;
        row["d"] = r.d;
        row["N"] = r.N;
        row["trials"] = r.stats.count;
        row["mean"] = r.stats.mean;
        row["stddev"] = r.stats.stddev;
        row["stderr"] = r.stats.stderr_mean;
        row["predicted"] = r.predicted;
        row["rel_err"] = r.rel_err;
        if (r.bounds) {
            row["bounds"] = {r.bounds->first, r.bounds->second};
        } else {
            row["tolerance"] = r.tolerance;
        }
        row["formula"] = r.formula;
        row["gating"] = r.gating;
        row["pass"] = r.pass;
        j["rows"].push_back(std::move(row));
    }
    j["checks"] = ordered_json::array();
    for (const auto& c : report.checks) {
        j["checks"].push_back(
            {{"name", c.name}, {"values", c.values}, {"detail", c.detail}, {"pass", c.pass}});
    }
    j["excluded_empty_trials"] = report.excluded_empty_trials;
    j["pass"] = report.pass;
    return j;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    out << "kind,s,d,N,trials,mean,stddev,stderr,predicted,rel_err,pass,statistic\n";
    const std::string kind = to_string(report.config.kind);
    for (const auto& r : report.rows) {
        out << kind << ',' << r.s << ',' << r.d << ',' << r.N << ',' << r.stats.count << ','
            << format_double(r.stats.mean) << ',' << format_double(r.stats.stddev) << ','
            << format_double(r.stats.stderr_mean) << ',' << format_double(r.predicted) << ','
            << format_double(r.rel_err) << ',' << (r.pass ? "true" : "false") << ',' << r.statistic
            << '\n';
    }
}

ExperimentReport run_fast_ratio(const ExperimentConfig& config, unsigned workers) {
    require_kind(config, ExperimentKind::FastRatio);
    validate(config);
    const SignedCombination& more_minus = config.combos[0];
    const SignedCombination& fewer_minus = config.combos[1];
    const double predicted = predicted_ratio(more_minus, fewer_minus, Regime::Fast, config.c);

    struct Trial {
        double size1 = 0.0;
        double size2 = 0.0;
        bool empty = true;
    };

    ExperimentReport report{config, {}, {}, 0, false};
    for (auto N : config.Ns) {
        const SampleParameters params = decay_params(config, N);
        const auto trials = run_trials<Trial>(config.trials, workers, [&](std::int64_t t) {
            const SampledSet A = sample_set(params.with_trial(static_cast<std::uint64_t>(t)));
            if (A.empty()) return Trial{};
            return Trial{static_cast<double>(gen_sumset(A, more_minus, config.sumset_budget).cardinality),
                         static_cast<double>(gen_sumset(A, fewer_minus, config.sumset_budget).cardinality),
                         false};
        });
        std::vector<double> ratios;
        std::vector<double> sizes1;
        std::vector<double> sizes2;
        for (const auto& t : trials) {
            sizes1.push_back(t.size1);
            sizes2.push_back(t.size2);
            if (t.empty) {
                ++report.excluded_empty_trials;
                continue;
            }
            ratios.push_back(t.size1 / t.size2);
        }
        report.rows.push_back(make_row("ratio" + combo_label(more_minus) + "/" + combo_label(fewer_minus),
                                       more_minus, N, ratios, predicted, config.tolerance,
                                       "s2!d2!/(s1!d1!)"));
        for (const auto* combo : {&more_minus, &fewer_minus}) {
            const auto& sizes = combo == &more_minus ? sizes1 : sizes2;
            report.rows.push_back(make_row("size", *combo, N, sizes,
                                           predicted_ex_k(1, *combo, config.c, *config.delta, N),
                                           config.tolerance, "E(X_1)", false));
        }
    }
    finalize(report);
    return report;
}

ExperimentReport run_critical_size(const ExperimentConfig& config, unsigned workers) {
    require_kind(config, ExperimentKind::CriticalSize);
    validate(config);
    const int h = config.combos.front().h();
    const PhaseConstants constants = phase_constants(h, SeriesOptions{}.k_max);
    std::vector<double> g;
    for (const auto& combo : config.combos) {
        g.push_back(g_series(config.c, combo, constants, SeriesOptions{}.tol).value);
    }
    const bool compare = config.combos.size() >= 2 && config.combos[0].d() > config.combos[1].d();

    ExperimentReport report{config, {}, {}, 0, false};
    for (auto N : config.Ns) {
        const SampleParameters params = decay_params(config, N);
        const auto trials =
            run_trials<std::vector<double>>(config.trials, workers, [&](std::int64_t t) {
                const SampledSet A = sample_set(params.with_trial(static_cast<std::uint64_t>(t)));
                std::vector<double> sizes;
                for (const auto& combo : config.combos) {
                    sizes.push_back(
                        static_cast<double>(gen_sumset(A, combo, config.sumset_budget).cardinality));
                }
                return sizes;
            });
        for (std::size_t ci = 0; ci < config.combos.size(); ++ci) {
            std::vector<double> scaled;
            for (const auto& t : trials) scaled.push_back(t[ci] / static_cast<double>(N));
            report.rows.push_back(make_row("size_over_N", config.combos[ci], N, scaled, g[ci],
                                           config.tolerance, "g(c;s,d)"));
        }
        if (compare) {
            std::vector<double> wins;
            std::vector<double> ratios;
            for (const auto& t : trials) {
                wins.push_back(t[0] > t[1] ? 1.0 : 0.0);
                if (t[1] > 0.0) {
                    ratios.push_back(t[0] / t[1]);
                } else {
                    ++report.excluded_empty_trials;
                }
            }
            const std::string label = combo_label(config.combos[0]) + ">" + combo_label(config.combos[1]);
            report.rows.push_back(make_row("dominance" + label, config.combos[0], N, wins, 1.0,
                                           1.0 - config.dominance_fraction, "almost surely"));
            report.rows.push_back(make_row("ratio" + combo_label(config.combos[0]) + "/" +
                                               combo_label(config.combos[1]),
                                           config.combos[0], N, ratios, g[0] / g[1],
                                           config.tolerance, "g1/g2", false));
        }
    }
    finalize(report);
    return report;
}

std::vector<std::int64_t> pointwise_probe_values(std::int64_t N, double p, int points) {
    // Spread over [0, 4/p^2), where the missing probability falls from 1-p
    // to about e^{-2}.
    const double span = std::min(asymptotic_missing_sums_h2(p), static_cast<double>(N));
    const auto step = std::max<std::int64_t>(1, static_cast<std::int64_t>(span / points));
    std::vector<std::int64_t> out;
    for (int j = 0; j < points && j * step <= N; ++j) out.push_back(j * step);
    return out;
}

ExperimentReport run_slow_h2(const ExperimentConfig& config, unsigned workers) {
    require_kind(config, ExperimentKind::SlowH2);
    validate(config);
    const SignedCombination sums(2, 0);
    const SignedCombination diffs(1, 1);

    struct Trial {
        double sums_missing = 0.0;
        double diffs_missing = 0.0;
        std::vector<std::uint8_t> probe_missing;
    };

    ExperimentReport report{config, {}, {}, 0, false};
    for (auto N : config.Ns) {
        const SampleParameters params = decay_params(config, N);
        const double p = params.p();
        const auto probes = pointwise_probe_values(N, p, config.pointwise_points);
        const auto trials = run_trials<Trial>(config.trials, workers, [&](std::int64_t t) {
            const SampledSet A = sample_set(params.with_trial(static_cast<std::uint64_t>(t)));
            const GenSumsetResult S = gen_sumset(A, sums, config.sumset_budget);
            const GenSumsetResult D = gen_sumset(A, diffs, config.sumset_budget);
            Trial out{static_cast<double>(S.complement_count), static_cast<double>(D.complement_count),
                      {}};
            for (auto n : probes) out.probe_missing.push_back(S.contains(n) ? 0 : 1);
            return out;
        });

        std::vector<double> sc;
        std::vector<double> dc;
        std::vector<double> ratio;
        for (const auto& t : trials) {
            sc.push_back(t.sums_missing);
            dc.push_back(t.diffs_missing);
            if (t.diffs_missing > 0.0) {
                ratio.push_back(t.sums_missing / t.diffs_missing);
            } else {
                ++report.excluded_empty_trials;
            }
        }
        report.rows.push_back(make_row("missing_sums", sums, N, sc, expected_missing_sums_h2(N, p),
                                       config.tolerance, "sum_n P(n not in A+A)"));
        report.rows.push_back(make_row("missing_sums_asymptote", sums, N, sc,
                                       asymptotic_missing_sums_h2(p), config.tolerance, "4/p^2"));
        report.rows.push_back(make_row("missing_differences", diffs, N, dc,
                                       asymptotic_missing_differences_h2(p), config.tolerance,
                                       "2/p^2", false));
        report.rows.push_back(make_row("missing_ratio", sums, N, ratio, 2.0, config.tolerance,
                                       "S^c/D^c -> 2"));

        ReportCheck check;
        check.name = "pointwise_missing_sum_law:N=" + std::to_string(N);
        check.pass = true;
        const double T = static_cast<double>(trials.size());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            double hits = 0.0;
            for (const auto& t : trials) hits += t.probe_missing[i];
            const double freq = hits / T;
            const double q = missing_sum_probability_h2(probes[i], N, p);
            const double se = std::sqrt(q * (1.0 - q) / T);
            const double z = se > 0.0 ? (freq - q) / se : (freq == q ? 0.0 : INFINITY);
            check.values.push_back(z);
            if (!(std::abs(z) <= config.pointwise_sigmas)) check.pass = false;
        }
        check.detail = "z-scores of missing frequency at n = " + std::to_string(probes.size()) +
                       " probes, step " +
                       std::to_string(probes.size() > 1 ? probes[1] - probes[0] : 0);
        report.checks.push_back(std::move(check));
    }
    finalize(report);
    return report;
}

ExperimentReport run_mstd(const ExperimentConfig& config, unsigned workers) {
    require_kind(config, ExperimentKind::Mstd);
    validate(config);
    const double p = *config.p;
    const bool uniform = p == 0.5;
    const SignedCombination sums(2, 0);
    const SignedCombination diffs(1, 1);

    struct Trial {
        std::uint8_t sum_dominated = 0;
        std::uint32_t sums_missing = 0;
        std::uint32_t diffs_missing = 0;
    };

    ExperimentReport report{config, {}, {}, 0, false};
    for (auto N : config.Ns) {
        const SampleParameters params = SampleParameters::fixed(N, p, config.seed);
        const auto trials = run_trials<Trial>(config.trials, workers, [&](std::int64_t t) {
            const SampledSet A = sample_set(params.with_trial(static_cast<std::uint64_t>(t)));
            const GenSumsetResult S = gen_sumset(A, sums, config.sumset_budget);
            const GenSumsetResult D = gen_sumset(A, diffs, config.sumset_budget);
            return Trial{static_cast<std::uint8_t>(S.cardinality > D.cardinality ? 1 : 0),
                         static_cast<std::uint32_t>(S.complement_count),
                         static_cast<std::uint32_t>(D.complement_count)};
        });
        std::vector<double> dominated;
        std::vector<double> sc;
        std::vector<double> dc;
        for (const auto& t : trials) {
            dominated.push_back(t.sum_dominated);
            sc.push_back(t.sums_missing);
            dc.push_back(t.diffs_missing);
        }
        AggregateRow frac = make_row("sum_dominated_fraction", sums, N, dominated,
                                     kUniformSumDominatedFraction, config.tolerance,
                                     "p=1/2 reference limit", uniform);
        frac.bounds = std::make_pair(config.mstd_fraction_lo, config.mstd_fraction_hi);
        frac.pass = frac.stats.mean >= config.mstd_fraction_lo &&
                    frac.stats.mean <= config.mstd_fraction_hi;
        report.rows.push_back(std::move(frac));
        report.rows.push_back(make_row("missing_sums", sums, N, sc, expected_missing_sums_h2(N, p),
                                       config.tolerance, "sum_n P(n not in A+A)"));
        report.rows.push_back(make_row(
            "missing_differences", diffs, N, dc,
            uniform ? kUniformMissingDifferences : asymptotic_missing_differences_h2(p),
            config.tolerance, uniform ? "p=1/2 reference value" : "2/p^2", uniform));
    }
    finalize(report);
    return report;
}

ExperimentReport run_concentration(const ExperimentConfig& config, unsigned workers) {
    require_kind(config, ExperimentKind::Concentration);
    validate(config);
    ExperimentReport report{config, {}, {}, 0, false};
    std::vector<std::vector<double>> cvs(config.combos.size());
    for (auto N : config.Ns) {
        const SampleParameters params = decay_params(config, N);
        const auto trials =
            run_trials<std::vector<double>>(config.trials, workers, [&](std::int64_t t) {
                const SampledSet A = sample_set(params.with_trial(static_cast<std::uint64_t>(t)));
                std::vector<double> sizes;
                for (const auto& combo : config.combos) {
                    sizes.push_back(
                        static_cast<double>(gen_sumset(A, combo, config.sumset_budget).cardinality));
                }
                return sizes;
            });
        for (std::size_t ci = 0; ci < config.combos.size(); ++ci) {
            const auto& combo = config.combos[ci];
            std::vector<double> sizes;
            for (const auto& t : trials) sizes.push_back(t[ci]);
            const bool critical = classify_regime(combo.h(), *config.delta) == Regime::Critical;
            const double predicted = critical
                                         ? static_cast<double>(N) * g_series(config.c, combo).value
                                         : predicted_ex_k(1, combo, config.c, *config.delta, N);
            AggregateRow row = make_row("size", combo, N, sizes, predicted, config.tolerance,
                                        critical ? "N g(c;s,d)" : "E(X_1)", false);
            cvs[ci].push_back(row.stats.mean > 0.0 ? row.stats.stddev / row.stats.mean : INFINITY);
            report.rows.push_back(std::move(row));
        }
    }
    for (std::size_t ci = 0; ci < config.combos.size(); ++ci) {
        report.checks.push_back({"cv_decreasing" + combo_label(config.combos[ci]), cvs[ci],
                                 "coefficient of variation of |A_{s,d}| along N",
                                 strictly_decreasing(cvs[ci])});
    }
    finalize(report);
    return report;
}

ExperimentReport run_b_convergence(const ExperimentConfig& config, unsigned /*workers*/) {
    require_kind(config, ExperimentKind::BConvergence);
    validate(config);
    ExperimentReport report{config, {}, {}, 0, false};
    for (const auto& combo : config.combos) {
        for (int k : config.ks) {
            const double exact = b_constant(combo.h(), k);
            std::vector<double> gaps;
            for (auto N : config.Ns) {
                const double oracle = b_constant_finite_n_oracle(k, combo, N, config.table_budget);
                AggregateRow row = make_row("b_finite_N:k=" + std::to_string(k), combo, N, {oracle},
                                            exact, config.tolerance, "b_{h,k}", false);
                gaps.push_back(std::abs(oracle - exact));
                report.rows.push_back(std::move(row));
            }
            const std::string label = combo_label(combo) + ",k=" + std::to_string(k);
            report.checks.push_back({"b_gap_decreasing" + label, gaps,
                                     "absolute gap to quadrature value along N",
                                     strictly_decreasing(gaps)});
            const double final_rel = gaps.back() / exact;
            report.checks.push_back({"b_final_gap" + label, {final_rel},
                                     "relative gap at the largest N",
                                     final_rel <= config.tolerance});
        }
    }
    finalize(report);
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers) {
    switch (config.kind) {
        case ExperimentKind::FastRatio: return run_fast_ratio(config, workers);
        case ExperimentKind::CriticalSize: return run_critical_size(config, workers);
        case ExperimentKind::SlowH2: return run_slow_h2(config, workers);
        case ExperimentKind::Mstd: return run_mstd(config, workers);
        case ExperimentKind::Concentration: return run_concentration(config, workers);
        case ExperimentKind::BConvergence: return run_b_convergence(config, workers);
    }
    throw ConfigError("kind: unsupported experiment kind");
}

}  // namespace gensum
