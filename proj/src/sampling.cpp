#include "gensum/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gensum/errors.hpp"

namespace gensum {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kTrialSalt = 0xD1B54A32D192ED03ULL;

void check_p(double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "probability p=" << p << " lies outside (0, 1]";
        throw ConfigError(msg.str());
    }
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t substream_key(std::uint64_t seed, std::uint64_t trial_index) noexcept {
    return mix64(mix64(seed) ^ mix64(trial_index + kTrialSalt));
}

std::uint64_t substream_draw(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix64(key + (counter + 1) * kGolden);
}

double decay_probability(std::int64_t N, double c, const Rational& delta) {
    if (N < 1) throw ConfigError("N must be >= 1 for p = c N^-delta");
    if (!(c > 0.0)) throw ConfigError("c must be > 0");
    if (delta <= 0 || delta >= 1) throw ConfigError("delta must lie in (0, 1), got " + to_string(delta));
    const double p = c * std::pow(static_cast<double>(N), -to_double(delta));
    check_p(p);
    return p;
}

SampleParameters::SampleParameters(std::int64_t N, double p, std::optional<DecayProbability> decay,
                                   std::uint64_t seed, std::uint64_t trial)
    : N_(N), p_(p), decay_(std::move(decay)), seed_(seed), trial_(trial) {}

SampleParameters SampleParameters::decaying(std::int64_t N, double c, Rational delta,
                                            std::uint64_t seed, std::uint64_t trial_index) {
    const double p = decay_probability(N, c, delta);
    return SampleParameters(N, p, DecayProbability{c, delta}, seed, trial_index);
}

SampleParameters SampleParameters::fixed(std::int64_t N, double p, std::uint64_t seed,
                                         std::uint64_t trial_index) {
    if (N < 1) throw ConfigError("N must be >= 1");
    check_p(p);
    return SampleParameters(N, p, std::nullopt, seed, trial_index);
}

SampleParameters SampleParameters::with_trial(std::uint64_t trial_index) const {
    SampleParameters copy = *this;
    copy.trial_ = trial_index;
    return copy;
}

double effective_p(const SampleParameters& params) { return params.p(); }

SampledSet make_set(std::int64_t N, std::vector<std::int64_t> elements) {
    if (N < 0) throw ConfigError("N must be >= 0");
    std::sort(elements.begin(), elements.end());
    if (std::adjacent_find(elements.begin(), elements.end()) != elements.end()) {
        throw ConfigError("set elements must be distinct");
    }
    if (!elements.empty() && (elements.front() < 0 || elements.back() > N)) {
        throw ConfigError("set elements must lie in [0, N]");
    }
    return SampledSet{N, std::move(elements)};
}

SampledSet sample_set(const SampleParameters& params) {
    SampledSet out;
    out.N = params.N();
    const std::uint64_t key = substream_key(params.seed(), params.trial_index());
    const auto count = static_cast<std::uint64_t>(params.N()) + 1;
    if (params.p() >= 1.0) {
        out.elements.resize(count);
        for (std::uint64_t i = 0; i < count; ++i) out.elements[i] = static_cast<std::int64_t>(i);
        return out;
    }
    // p < 1, so p * 2^64 < 2^64 and the conversion is exact-floor.
    const auto threshold = static_cast<std::uint64_t>(std::ldexp(params.p(), 64));
    out.elements.reserve(static_cast<std::size_t>(static_cast<double>(count) * params.p() * 1.2) + 16);
    for (std::uint64_t i = 0; i < count; ++i) {
        if (substream_draw(key, i) < threshold) out.elements.push_back(static_cast<std::int64_t>(i));
    }
    return out;
}

void write_set(std::ostream& out, const SampledSet& set) {
    out << "N=" << set.N << '\n';
    for (std::size_t i = 0; i < set.elements.size(); ++i) {
        if (i) out << ' ';
        out << set.elements[i];
    }
    out << '\n';
}

SampledSet read_set(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("N=", 0) != 0) {
        throw ConfigError("set file must start with a line N=<N>");
    }
    std::int64_t N = 0;
    try {
        std::size_t used = 0;
        N = std::stoll(header.substr(2), &used);
        if (used != header.size() - 2) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ConfigError("malformed set header \"" + header + "\"");
    }
    std::string line;
    std::getline(in, line);
    std::istringstream body(line);
    std::vector<std::int64_t> elements;
    std::int64_t v = 0;
    while (body >> v) {
        if (!elements.empty() && v <= elements.back()) {
            throw ConfigError("set elements must be strictly increasing");
        }
        elements.push_back(v);
    }
    if (!body.eof()) throw ConfigError("set file contains a non-integer element");
    return make_set(N, std::move(elements));
}

}  // namespace gensum
