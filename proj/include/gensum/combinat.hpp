#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gensum {

using BigInt = boost::multiprecision::cpp_int;

// Which generalized sumset A + ... + A - ... - A is meant: s plus signs,
// d minus signs, h = s + d summands. Always d <= s and h >= 2.
class SignedCombination {
public:
    SignedCombination(int s, int d);

    int s() const noexcept { return s_; }
    int d() const noexcept { return d_; }
    int h() const noexcept { return s_ + d_; }

    // s! * d!, the number of block permutations of a tuple with distinct
    // entries that leave its generated value unchanged.
    std::uint64_t block_symmetry() const noexcept;

    // Generated values lie in [min_value(N), max_value(N)] = [-dN, sN].
    std::int64_t min_value(std::int64_t N) const noexcept { return -std::int64_t{d_} * N; }
    std::int64_t max_value(std::int64_t N) const noexcept { return std::int64_t{s_} * N; }

    friend bool operator==(const SignedCombination&, const SignedCombination&) = default;

private:
    int s_;
    int d_;
};

std::uint64_t factorial(int n);

// Budgets for oracle-scale enumeration and bulk tables. Oracles throw
// BudgetExceeded rather than silently truncating.
struct EnumerationBudget {
    std::uint64_t max_tuples = 100'000'000;
};

struct TableBudget {
    std::uint64_t max_entries = std::uint64_t{1} << 26;
};

// Binomial coefficient extended by zero: C(a, b) = 0 for a < b, including
// negative a. Requires b >= 0.
BigInt ext_binom(std::int64_t a, std::int64_t b);

// Ordered k-tuples of non-negative integers summing to n: C(n+k-1, k-1).
BigInt stars_and_bars(std::int64_t n, std::int64_t k);

// R(n, s, d): ordered h-tuples from {0..N} whose first s entries minus last
// d entries equal n. Inclusion-exclusion over the number of entries that
// exceed N after the substitution a -> N - a on the minus block; all h+1
// terms are summed and the extended binomial zeroes the empty ones.
BigInt rep_count(std::int64_t n, const SignedCombination& combo, std::int64_t N);

struct RepresentationCounts {
    SignedCombination combo;
    std::int64_t N;
    // counts[i] = R(min_value + i); size h*N + 1.
    std::vector<BigInt> counts;

    std::int64_t min_value() const noexcept { return combo.min_value(N); }
    std::int64_t max_value() const noexcept { return combo.max_value(N); }
    const BigInt& at(std::int64_t n) const;
};

RepresentationCounts rep_counts_all(const SignedCombination& combo, std::int64_t N,
                                    const TableBudget& budget = {});

// Writes "n,count" followed by one row per n in increasing order.
void write_counts_csv(std::ostream& out, const RepresentationCounts& counts);

// Exhaustive enumeration of all (N+1)^h ordered tuples.
BigInt rep_count_bruteforce(std::int64_t n, const SignedCombination& combo, std::int64_t N,
                            const EnumerationBudget& budget = {});

// Representation classes of n: tuples up to permutation inside the plus
// block and inside the minus block. Canonical form is a sorted s-multiset
// paired with a sorted d-multiset.
BigInt distinct_class_count(std::int64_t n, const SignedCombination& combo, std::int64_t N,
                            const EnumerationBudget& budget = {});

// Class counts for every n at once, indexed like RepresentationCounts. With
// all_distinct set, only classes whose h entries are pairwise distinct are
// counted.
std::vector<std::uint64_t> class_counts_all(const SignedCombination& combo, std::int64_t N,
                                            bool all_distinct,
                                            const EnumerationBudget& budget = {});

}  // namespace gensum
