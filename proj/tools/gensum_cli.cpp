#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gensum/combinat.hpp"
#include "gensum/density.hpp"
#include "gensum/errors.hpp"
#include "gensum/experiments.hpp"
#include "gensum/rational.hpp"
#include "gensum/sampling.hpp"
#include "gensum/sumset.hpp"

namespace {

using namespace gensum;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

ordered_json provenance(const std::string& command, const ordered_json& config) {
    ordered_json p;
    p["tool"] = "gensum";
    p["version"] = kVersion;
    p["command"] = command;
    p["config"] = config;
    if (config.contains("seed")) p["seed"] = config["seed"];
    return p;
}

std::string csv_provenance(const std::string& command, const ordered_json& config) {
    return "# gensum " + std::string(kVersion) + " " + command + "\n# config " + config.dump() + "\n";
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << text;
    if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

SampledSet load_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("field 'set': cannot open '" + path + "'");
    return read_set(in);
}

std::string big(const BigInt& v) { return v.str(); }

struct ConstantsArgs {
    int h = 3;
    int kmax = 8;
    int series_kmax = SeriesOptions{}.k_max;
    double tol = SeriesOptions{}.tol;
    std::vector<double> cs = {1.0};
    bool csv = false;
    std::string out;
};

void run_constants(const ConstantsArgs& a) {
    if (a.h < 2) throw ConfigError("field 'h': must be >= 2");
    if (a.kmax < 1) throw ConfigError("field 'kmax': must be >= 1");
    const PhaseConstants table = phase_constants(a.h, a.kmax);

    ordered_json config = {{"h", a.h}, {"kmax", a.kmax}, {"series_kmax", a.series_kmax},
                           {"tol", a.tol}, {"c", a.cs}};
    if (a.csv) {
        std::ostringstream out;
        out << csv_provenance("constants", config) << "k,b_hk\n";
        for (int k = 1; k <= a.kmax; ++k) {
            out << k << ',' << ordered_json(table.b[static_cast<std::size_t>(k - 1)]).dump() << '\n';
        }
        emit(a.out, out.str());
        return;
    }

    ordered_json j;
    j["provenance"] = provenance("constants", config);
    j["h"] = a.h;
    j["K_max"] = a.kmax;
    j["b"] = table.b;
    j["g"] = ordered_json::array();
    const SeriesOptions opts{a.series_kmax, a.tol};
    for (double c : a.cs) {
        for (int d = 0; 2 * d <= a.h; ++d) {
            const SignedCombination combo(a.h - d, d);
            const SeriesValue v = g_series(c, combo, opts);
            j["g"].push_back({{"c", c}, {"s", combo.s()}, {"d", combo.d()}, {"value", v.value},
                              {"terms_used", v.terms_used}});
        }
    }
    emit(a.out, j.dump(2) + "\n");
}

struct RcountArgs {
    std::int64_t N = 0;
    int s = 0;
    int d = 0;
    std::uint64_t max_entries = TableBudget{}.max_entries;
    bool json = false;
    std::string out;
};

void run_rcount(const RcountArgs& a) {
    if (a.N < 0) throw ConfigError("field 'N': must be >= 0");
    const SignedCombination combo(a.s, a.d);
    const RepresentationCounts counts = rep_counts_all(combo, a.N, TableBudget{a.max_entries});
    ordered_json config = {{"N", a.N}, {"s", a.s}, {"d", a.d}, {"max_entries", a.max_entries}};
    if (!a.json) {
        std::ostringstream out;
        out << csv_provenance("rcount", config);
        write_counts_csv(out, counts);
        emit(a.out, out.str());
        return;
    }
    ordered_json j;
    j["provenance"] = provenance("rcount", config);
    j["s"] = a.s;
    j["d"] = a.d;
    j["N"] = a.N;
    j["min_value"] = counts.min_value();
    j["counts"] = ordered_json::array();
    for (const auto& c : counts.counts) j["counts"].push_back(big(c));
    emit(a.out, j.dump(2) + "\n");
}

struct SampleArgs {
    std::int64_t N = 0;
    double c = 1.0;
    std::string delta;
    std::optional<double> p;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::string out;
};

void run_sample(const SampleArgs& a) {
    ordered_json config = {{"N", a.N}, {"seed", a.seed}, {"trial", a.trial}};
    SampleParameters params = [&] {
        if (a.p) {
            config["p"] = *a.p;
            return SampleParameters::fixed(a.N, *a.p, a.seed, a.trial);
        }
        if (a.delta.empty()) throw ConfigError("field 'delta': required unless --p is given");
        Rational delta;
        try {
            delta = parse_rational(a.delta);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("field 'delta': ") + e.what());
        }
        config["c"] = a.c;
        config["delta"] = to_string(delta);
        return SampleParameters::decaying(a.N, a.c, delta, a.seed, a.trial);
    }();
    config["effective_p"] = effective_p(params);
    const SampledSet set = sample_set(params);
    std::ostringstream out;
    write_set(out, set);
    emit(a.out, out.str());
    // The set file format has no room for comments, so provenance goes to
    // stderr.
    std::cerr << provenance("sample", config).dump() << '\n';
}

struct SumsetArgs {
    std::string set;
    int s = 0;
    int d = 0;
    std::uint64_t max_bits = SumsetBudget{}.max_bits;
    bool csv = false;
    std::string out;
};

void run_sumset(const SumsetArgs& a) {
    const SignedCombination combo(a.s, a.d);
    const SampledSet A = load_set(a.set);
    const GenSumsetResult r = gen_sumset(A, combo, SumsetBudget{a.max_bits});
    ordered_json config = {{"set", a.set}, {"s", a.s}, {"d", a.d}, {"max_bits", a.max_bits}};
    if (a.csv) {
        std::ostringstream out;
        out << csv_provenance("sumset", config);
        write_membership_csv(out, r);
        emit(a.out, out.str());
        return;
    }
    ordered_json j;
    j["provenance"] = provenance("sumset", config);
    const ordered_json summary = ordered_json::parse(sumset_summary_json(r));
    for (const auto& [k, v] : summary.items()) j[k] = v;
    emit(a.out, j.dump(2) + "\n");
}

struct XkArgs {
    std::string set;
    int s = 0;
    int d = 0;
    int kmax = 0;
    std::uint64_t max_tuples = EnumerationBudget{}.max_tuples;
    bool csv = false;
    std::string out;
};

void run_xk(const XkArgs& a) {
    if (a.kmax < 0) throw ConfigError("field 'kmax': must be >= 0");
    const SignedCombination combo(a.s, a.d);
    const SampledSet A = load_set(a.set);
    const TupleStatistics stats = tuple_statistics(A, combo, a.kmax, EnumerationBudget{a.max_tuples});
    const GenSumsetResult r = gen_sumset(A, combo);
    ordered_json config = {{"set", a.set}, {"s", a.s},       {"d", a.d},
                           {"kmax", a.kmax}, {"max_tuples", a.max_tuples}};
    if (a.csv) {
        std::ostringstream out;
        out << csv_provenance("xk", config) << "k,X_k,alternating_partial_sum\n";
        for (std::size_t k = 1; k <= stats.X.size(); ++k) {
            out << k << ',' << big(stats.X[k - 1]) << ','
                << big(stats.alternating_partial_sum(static_cast<int>(k))) << '\n';
        }
        emit(a.out, out.str());
        return;
    }
    ordered_json j;
    j["provenance"] = provenance("xk", config);
    j["s"] = a.s;
    j["d"] = a.d;
    j["N"] = A.N;
    j["set_size"] = A.size();
    j["cardinality"] = r.cardinality;
    j["max_multiplicity"] = stats.max_multiplicity();
    j["X"] = ordered_json::array();
    j["alternating_partial_sums"] = ordered_json::array();
    for (std::size_t k = 1; k <= stats.X.size(); ++k) {
        j["X"].push_back(big(stats.X[k - 1]));
        j["alternating_partial_sums"].push_back(big(stats.alternating_partial_sum(static_cast<int>(k))));
    }
    emit(a.out, j.dump(2) + "\n");
}

struct ExperimentArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::string out_json;
    std::string out_csv;
};

void run_experiment_cmd(const ExperimentArgs& a) {
    std::ifstream in(a.config);
    if (!in) throw ConfigError("field 'config': cannot open '" + a.config + "'");
    nlohmann::json raw;
    try {
        raw = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("field 'config': invalid JSON: " + std::string(e.what()));
    }
    if (a.seed && raw.is_object()) raw["seed"] = *a.seed;
    if (a.workers < 1) throw ConfigError("field 'workers': must be >= 1");
    const ExperimentConfig config = parse_config(raw);
    const ExperimentReport report = run_experiment(config, a.workers);

    const ordered_json resolved = config_to_json(config);
    ordered_json j;
    j["provenance"] = provenance("experiment", resolved);
    const ordered_json body = report_to_json(report);
    for (const auto& [k, v] : body.items()) j[k] = v;
    if (!a.out_csv.empty()) {
        std::ostringstream out;
        out << csv_provenance("experiment", resolved);
        write_report_csv(out, report);
        emit(a.out_csv, out.str());
    }
    if (!a.out_json.empty() || a.out_csv.empty()) emit(a.out_json, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized sumsets of random sets: exact counts, phase constants, Monte Carlo"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    ConstantsArgs constants_args;
    auto* constants = app.add_subcommand("constants", "Tabulate b_{h,k} and evaluate g(c;s,d)");
    // --h means h = s + d here, so help is long-form only.
    constants->set_help_flag("--help", "Print this help message and exit");
    constants->add_option("--h", constants_args.h, "h = s + d")->check(CLI::Range(2, 20));
    constants->add_option("--kmax", constants_args.kmax, "Number of b_{h,k} to tabulate")
        ->check(CLI::Range(1, 1000));
    constants->add_option("--series-kmax", constants_args.series_kmax, "Series term cap for g");
    constants->add_option("--tol", constants_args.tol, "Series stopping tolerance");
    constants->add_option("--c", constants_args.cs, "Values of c for g(c;s,d)");
    auto* cj = constants->add_flag("--json", "JSON output (default)");
    constants->add_flag("--csv", constants_args.csv, "CSV output (k,b_hk)")->excludes(cj);
    constants->add_option("--out", constants_args.out, "Output path (- for stdout)");

    RcountArgs rcount_args;
    auto* rcount = app.add_subcommand("rcount", "Exact representation counts R(n,s,d) for all n");
    rcount->add_option("--N", rcount_args.N, "Interval [0, N]")->required();
    rcount->add_option("--s", rcount_args.s, "Plus-block size")->required();
    rcount->add_option("--d", rcount_args.d, "Minus-block size")->required();
    rcount->add_option("--max-entries", rcount_args.max_entries, "Table budget");
    auto* rc = rcount->add_flag("--csv", "CSV output (default)");
    rcount->add_flag("--json", rcount_args.json, "JSON output")->excludes(rc);
    rcount->add_option("--out", rcount_args.out, "Output path (- for stdout)");

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "Draw a binomial random subset of [0, N]");
    sample->add_option("--N", sample_args.N, "Interval [0, N]")->required();
    auto* c_opt = sample->add_option("--c", sample_args.c, "Decay constant in p = c N^-delta");
    auto* delta_opt = sample->add_option("--delta", sample_args.delta, "Decay exponent as p/q");
    auto* p_opt = sample->add_option("--p", sample_args.p, "Fixed inclusion probability");
    p_opt->excludes(c_opt)->excludes(delta_opt);
    sample->add_option("--seed", sample_args.seed, "Master seed");
    sample->add_option("--trial", sample_args.trial, "Trial index (sub-stream)");
    sample->add_option("--out", sample_args.out, "Output path (- for stdout)");

    SumsetArgs sumset_args;
    auto* sumset = app.add_subcommand("sumset", "Compute A_{s,d} for a set file");
    sumset->add_option("--set", sumset_args.set, "Set file (N=<N> then elements)")->required();
    sumset->add_option("--s", sumset_args.s, "Plus-block size")->required();
    sumset->add_option("--d", sumset_args.d, "Minus-block size")->required();
    sumset->add_option("--max-bits", sumset_args.max_bits, "Bit-vector budget");
    auto* sj = sumset->add_flag("--json", "Summary JSON (default)");
    sumset->add_flag("--csv", sumset_args.csv, "Membership CSV (n,member)")->excludes(sj);
    sumset->add_option("--out", sumset_args.out, "Output path (- for stdout)");

    XkArgs xk_args;
    auto* xk = app.add_subcommand("xk", "Tuple statistics X_k and inclusion-exclusion partial sums");
    xk->add_option("--set", xk_args.set, "Set file")->required();
    xk->add_option("--s", xk_args.s, "Plus-block size")->required();
    xk->add_option("--d", xk_args.d, "Minus-block size")->required();
    xk->add_option("--kmax", xk_args.kmax, "Largest k (0 = up to the largest multiplicity)");
    xk->add_option("--max-tuples", xk_args.max_tuples, "Enumeration budget");
    auto* xj = xk->add_flag("--json", "JSON output (default)");
    xk->add_flag("--csv", xk_args.csv, "CSV output")->excludes(xj);
    xk->add_option("--out", xk_args.out, "Output path (- for stdout)");

    ExperimentArgs experiment_args;
    auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
    experiment->add_option("--config", experiment_args.config, "JSON config file")->required();
    experiment->add_option("--seed", experiment_args.seed, "Override the config seed");
    experiment->add_option("--workers", experiment_args.workers, "Worker threads (output is identical)")
        ->check(CLI::Range(1u, 1024u));
    experiment->add_option("--out-json", experiment_args.out_json, "JSON report path");
    experiment->add_option("--out-csv", experiment_args.out_csv, "CSV aggregate path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (constants->parsed()) run_constants(constants_args);
        if (rcount->parsed()) run_rcount(rcount_args);
        if (sample->parsed()) run_sample(sample_args);
        if (sumset->parsed()) run_sumset(sumset_args);
        if (xk->parsed()) run_xk(xk_args);
        if (experiment->parsed()) run_experiment_cmd(experiment_args);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const SeriesNotConverged& e) {
        std::cerr << "series did not converge: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
