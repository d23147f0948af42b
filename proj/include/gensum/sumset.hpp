#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gensum/combinat.hpp"
#include "gensum/sampling.hpp"

namespace gensum {

// Finite integer set stored as a bit-vector over [lo, lo + bits).
class DenseSet {
public:
    DenseSet() = default;
    DenseSet(std::int64_t lo, std::uint64_t bits);

    static DenseSet from_elements(std::span<const std::int64_t> sorted_elements);
    // {-x : x in sorted_elements}
    static DenseSet negated(std::span<const std::int64_t> sorted_elements);

    std::int64_t lo() const noexcept { return lo_; }
    std::uint64_t bit_count() const noexcept { return bits_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }
    std::span<std::uint64_t> words() noexcept { return words_; }

    bool contains(std::int64_t v) const noexcept;
    void insert(std::int64_t v);
    std::uint64_t count() const noexcept;
    bool empty() const noexcept { return bits_ == 0 || count() == 0; }
    std::vector<std::int64_t> elements() const;

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t word = words_[w];
            while (word) {
                const int b = std::countr_zero(word);
                fn(lo_ + static_cast<std::int64_t>(w * 64 + static_cast<std::size_t>(b)));
                word &= word - 1;
            }
        }
    }

private:
    std::int64_t lo_ = 0;
    std::uint64_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

// dst |= src << shift, on little-endian bit order (bit i of the vector is
// bit i % 64 of word i / 64). Bits past the end of dst are dropped.
void or_shifted(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src,
                std::uint64_t shift) noexcept;

// X + Y. The operand with fewer elements drives one shifted OR of the other
// per element.
DenseSet set_add(const DenseSet& x, const DenseSet& y);

struct SumsetBudget {
    std::uint64_t max_bits = std::uint64_t{1} << 34;
};

struct GenSumsetResult {
    SignedCombination combo;
    std::int64_t N;
    // Bit i stands for the value -dN + i; h*N + 1 bits.
    std::vector<std::uint64_t> membership;
    std::uint64_t cardinality = 0;
    std::uint64_t complement_count = 0;

    std::int64_t min_value() const noexcept { return combo.min_value(N); }
    std::int64_t max_value() const noexcept { return combo.max_value(N); }
    bool contains(std::int64_t n) const noexcept;
    std::vector<std::int64_t> members() const;
};

// A + ... + A (s times) - A - ... - A (d times), folded left to right on
// bit-vectors.
GenSumsetResult gen_sumset(const SampledSet& A, const SignedCombination& combo,
                           const SumsetBudget& budget = {});

// Exhaustive enumeration over all |A|^h ordered tuples.
GenSumsetResult gen_sumset_naive(const SampledSet& A, const SignedCombination& combo,
                                 const EnumerationBudget& budget = {});

// Summary {s, d, N, cardinality, complement_count} as a JSON object.
std::string sumset_summary_json(const GenSumsetResult& r);
// "n,member" rows over the full range [-dN, sN].
void write_membership_csv(std::ostream& out, const GenSumsetResult& r);

struct TupleStatistics {
    SignedCombination combo;
    std::int64_t N;
    // value -> number of representation classes of that value over A
    std::map<std::int64_t, std::uint64_t> class_counts;
    // X[k-1] = X_k = sum_v C(r_v, k), for k = 1..k_max
    std::vector<BigInt> X;

    std::uint64_t max_multiplicity() const;
    // sum_{k<=m} (-1)^{k-1} X_k
    BigInt alternating_partial_sum(int m) const;
};

// Enumerates representation classes over A (sorted plus block, sorted minus
// block) and tallies them per generated value. k_max <= 0 means up to the
// largest multiplicity, which makes the alternating sum of all X_k equal
// |A_{s,d}|.
TupleStatistics tuple_statistics(const SampledSet& A, const SignedCombination& combo, int k_max,
                                 const EnumerationBudget& budget = {});

enum class MstdClass { SumDominated, Balanced, DifferenceDominated };

std::string to_string(MstdClass c);

// Compares |A + A| with |A - A|.
MstdClass mstd_classify(const SampledSet& A);

}  // namespace gensum
