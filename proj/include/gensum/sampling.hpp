#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gensum/rational.hpp"

namespace gensum {

// p(N) = c * N^{-delta}.
struct DecayProbability {
    double c;
    Rational delta;
};

// Random subsets of {0, ..., N} under the binomial model. Validated on
// construction: the effective p must lie in (0, 1], and is never clamped.
class SampleParameters {
public:
    static SampleParameters decaying(std::int64_t N, double c, Rational delta, std::uint64_t seed,
                                     std::uint64_t trial_index = 0);
    static SampleParameters fixed(std::int64_t N, double p, std::uint64_t seed,
                                  std::uint64_t trial_index = 0);

    std::int64_t N() const noexcept { return N_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t trial_index() const noexcept { return trial_; }
    const std::optional<DecayProbability>& decay() const noexcept { return decay_; }
    double p() const noexcept { return p_; }

    SampleParameters with_trial(std::uint64_t trial_index) const;

private:
    SampleParameters(std::int64_t N, double p, std::optional<DecayProbability> decay,
                     std::uint64_t seed, std::uint64_t trial);

    std::int64_t N_;
    double p_;
    std::optional<DecayProbability> decay_;
    std::uint64_t seed_;
    std::uint64_t trial_;
};

double effective_p(const SampleParameters& params);

// c * N^{-delta}; throws ConfigError unless the result lies in (0, 1].
double decay_probability(std::int64_t N, double c, const Rational& delta);

struct SampledSet {
    std::int64_t N = 0;
    // Strictly increasing, all in [0, N].
    std::vector<std::int64_t> elements;

    std::size_t size() const noexcept { return elements.size(); }
    bool empty() const noexcept { return elements.empty(); }
    friend bool operator==(const SampledSet&, const SampledSet&) = default;
};

// Builds a SampledSet from arbitrary elements; sorts, rejects duplicates and
// values outside [0, N].
SampledSet make_set(std::int64_t N, std::vector<std::int64_t> elements);

// Sub-stream derivation. Trial t under seed s draws from the key
//   key = mix64(mix64(s) ^ mix64(t + 0xD1B54A32D192ED03))
// and element i is included iff mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
// < floor(p * 2^64) (always included when p == 1). mix64 is the SplitMix64
// finalizer. Every element has its own counter, so sets do not depend on
// how trials are scheduled.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t trial_index) noexcept;
std::uint64_t substream_draw(std::uint64_t key, std::uint64_t counter) noexcept;

SampledSet sample_set(const SampleParameters& params);

// Set file: "N=<N>\n" then the elements space-separated in increasing order.
void write_set(std::ostream& out, const SampledSet& set);
SampledSet read_set(std::istream& in);

}  // namespace gensum
