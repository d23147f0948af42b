#include "gensum/sumset.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

#include "json.hpp"

#include "gensum/errors.hpp"

namespace gensum {

namespace {

std::size_t words_for(std::uint64_t bits) { return static_cast<std::size_t>((bits + 63) / 64); }

std::uint64_t popcount_all(std::span<const std::uint64_t> words) {
    std::uint64_t n = 0;
    for (auto w : words) n += static_cast<std::uint64_t>(std::popcount(w));
    return n;
}

std::uint64_t full_range_bits(const SignedCombination& combo, std::int64_t N) {
    return static_cast<std::uint64_t>(combo.h()) * static_cast<std::uint64_t>(N) + 1;
}

GenSumsetResult empty_result(const SignedCombination& combo, std::int64_t N) {
    GenSumsetResult r{combo, N, {}, 0, 0};
    const std::uint64_t bits = full_range_bits(combo, N);
    r.membership.assign(words_for(bits), 0);
    r.complement_count = bits;
    return r;
}

void finish(GenSumsetResult& r) {
    r.cardinality = popcount_all(r.membership);
    r.complement_count = full_range_bits(r.combo, r.N) - r.cardinality;
}

// Visits every non-decreasing index tuple of length k over [0, n).
template <typename Fn>
void for_each_multiset_index(int k, std::size_t n, Fn&& fn) {
    std::vector<std::size_t> t(static_cast<std::size_t>(k), 0);
    if (k == 0) {
        fn(t);
        return;
    }
    if (n == 0) return;
    while (true) {
        fn(t);
        int i = k - 1;
        while (i >= 0 && t[i] == n - 1) --i;
        if (i < 0) return;
        ++t[i];
        for (int j = i + 1; j < k; ++j) t[j] = t[i];
    }
}

void require_enumeration(std::size_t set_size, int h, const EnumerationBudget& budget,
                         const char* what) {
    BigInt tuples = 1;
    for (int i = 0; i < h; ++i) tuples *= set_size;
    if (tuples > budget.max_tuples) {
        throw BudgetExceeded(std::string(what) + ": |A|^h = " + tuples.str() +
                             " exceeds enumeration budget max_tuples=" +
                             std::to_string(budget.max_tuples));
    }
}

}  // namespace

DenseSet::DenseSet(std::int64_t lo, std::uint64_t bits)
    : lo_(lo), bits_(bits), words_(words_for(bits), 0) {}

DenseSet DenseSet::from_elements(std::span<const std::int64_t> sorted) {
    if (sorted.empty()) return {};
    DenseSet out(sorted.front(), static_cast<std::uint64_t>(sorted.back() - sorted.front()) + 1);
    for (auto v : sorted) out.insert(v);
    return out;
}

DenseSet DenseSet::negated(std::span<const std::int64_t> sorted) {
    if (sorted.empty()) return {};
    DenseSet out(-sorted.back(), static_cast<std::uint64_t>(sorted.back() - sorted.front()) + 1);
    for (auto v : sorted) out.insert(-v);
    return out;
}

bool DenseSet::contains(std::int64_t v) const noexcept {
    if (v < lo_) return false;
    const auto i = static_cast<std::uint64_t>(v - lo_);
    if (i >= bits_) return false;
    return (words_[i / 64] >> (i % 64)) & 1U;
}

void DenseSet::insert(std::int64_t v) {
    if (v < lo_ || static_cast<std::uint64_t>(v - lo_) >= bits_) {
        throw std::out_of_range("DenseSet::insert outside range");
    }
    const auto i = static_cast<std::uint64_t>(v - lo_);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
}

std::uint64_t DenseSet::count() const noexcept { return popcount_all(words_); }

std::vector<std::int64_t> DenseSet::elements() const {
    std::vector<std::int64_t> out;
    for_each([&](std::int64_t v) { out.push_back(v); });
    return out;
}

void or_shifted(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src,
                std::uint64_t shift) noexcept {
    const std::size_t q = static_cast<std::size_t>(shift / 64);
    const unsigned r = static_cast<unsigned>(shift % 64);
    if (src.empty() || q >= dst.size()) return;
    const std::size_t room = dst.size() - q;
    const std::size_t n = std::min(src.size(), room);
    std::uint64_t* d = dst.data() + q;
    const std::uint64_t* s = src.data();
    if (r == 0) {
        for (std::size_t i = 0; i < n; ++i) d[i] |= s[i];
        return;
    }
    const unsigned back = 64 - r;
    d[0] |= s[0] << r;
    for (std::size_t i = 1; i < n; ++i) d[i] |= (s[i] << r) | (s[i - 1] >> back);
    if (n < room) d[n] |= s[n - 1] >> back;
}

DenseSet set_add(const DenseSet& x, const DenseSet& y) {
    const std::uint64_t cx = x.count();
    const std::uint64_t cy = y.count();
    if (cx == 0 || cy == 0) return {};
    const DenseSet& driver = cx <= cy ? x : y;
    const DenseSet& other = cx <= cy ? y : x;
    DenseSet out(x.lo() + y.lo(), x.bit_count() + y.bit_count() - 1);
    driver.for_each([&](std::int64_t e) {
        or_shifted(out.words(), other.words(), static_cast<std::uint64_t>(e - driver.lo()));
    });
    return out;
}

bool GenSumsetResult::contains(std::int64_t n) const noexcept {
    if (n < min_value() || n > max_value()) return false;
    const auto i = static_cast<std::uint64_t>(n - min_value());
    return (membership[i / 64] >> (i % 64)) & 1U;
}

std::vector<std::int64_t> GenSumsetResult::members() const {
    std::vector<std::int64_t> out;
    out.reserve(cardinality);
    for (std::size_t w = 0; w < membership.size(); ++w) {
        std::uint64_t word = membership[w];
        while (word) {
            const int b = std::countr_zero(word);
            out.push_back(min_value() + static_cast<std::int64_t>(w * 64 + static_cast<std::size_t>(b)));
            word &= word - 1;
        }
    }
    return out;
}

GenSumsetResult gen_sumset(const SampledSet& A, const SignedCombination& combo,
                           const SumsetBudget& budget) {
    if (A.N < 0) throw ConfigError("N must be >= 0");
    const std::uint64_t bits = full_range_bits(combo, A.N);
    if (bits > budget.max_bits) {
        throw BudgetExceeded("sumset range needs " + std::to_string(bits) +
                             " bits, budget max_bits=" + std::to_string(budget.max_bits));
    }
    GenSumsetResult result = empty_result(combo, A.N);
    if (A.empty()) return result;

    const DenseSet plus = DenseSet::from_elements(A.elements);
    DenseSet acc = plus;
    for (int i = 1; i < combo.s(); ++i) acc = set_add(acc, plus);
    if (combo.d() > 0) {
        const DenseSet minus = DenseSet::negated(A.elements);
        for (int i = 0; i < combo.d(); ++i) acc = set_add(acc, minus);
    }
    or_shifted(result.membership, acc.words(),
               static_cast<std::uint64_t>(acc.lo() - result.min_value()));
    finish(result);
    return result;
}

GenSumsetResult gen_sumset_naive(const SampledSet& A, const SignedCombination& combo,
                                 const EnumerationBudget& budget) {
    const int h = combo.h();
    require_enumeration(A.size(), h, budget, "gen_sumset_naive");
    GenSumsetResult result = empty_result(combo, A.N);
    if (A.empty()) return result;

    const std::size_t n = A.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(h), 0);
    while (true) {
        std::int64_t v = 0;
        for (int i = 0; i < h; ++i) v += i < combo.s() ? A.elements[idx[i]] : -A.elements[idx[i]];
        const auto bit = static_cast<std::uint64_t>(v - result.min_value());
        result.membership[bit / 64] |= std::uint64_t{1} << (bit % 64);
        int i = h - 1;
        while (i >= 0 && idx[i] == n - 1) idx[i--] = 0;
        if (i < 0) break;
        ++idx[i];
    }
    finish(result);
    return result;
}

std::string sumset_summary_json(const GenSumsetResult& r) {
    nlohmann::ordered_json j;
    j["s"] = r.combo.s();
    j["d"] = r.combo.d();
    j["N"] = r.N;
    j["cardinality"] = r.cardinality;
    j["complement_count"] = r.complement_count;
    return j.dump();
}

void write_membership_csv(std::ostream& out, const GenSumsetResult& r) {
    out << "n,member\n";
    for (std::int64_t n = r.min_value(); n <= r.max_value(); ++n) {
        out << n << ',' << (r.contains(n) ? 1 : 0) << '\n';
    }
}

std::uint64_t TupleStatistics::max_multiplicity() const {
    std::uint64_t m = 0;
    for (const auto& [v, r] : class_counts) m = std::max(m, r);
    return m;
}

BigInt TupleStatistics::alternating_partial_sum(int m) const {
    BigInt sum = 0;
    for (int k = 1; k <= m && k <= static_cast<int>(X.size()); ++k) {
        if (k % 2 == 1) {
            sum += X[k - 1];
        } else {
            sum -= X[k - 1];
        }
    }
    return sum;
}

TupleStatistics tuple_statistics(const SampledSet& A, const SignedCombination& combo, int k_max,
                                 const EnumerationBudget& budget) {
    require_enumeration(A.size(), combo.h(), budget, "tuple_statistics");
    TupleStatistics stats{combo, A.N, {}, {}};
    const std::size_t n = A.size();

    std::vector<std::int64_t> minus_sums;
    for_each_multiset_index(combo.d(), n, [&](const std::vector<std::size_t>& t) {
        std::int64_t sum = 0;
        for (auto i : t) sum += A.elements[i];
        minus_sums.push_back(sum);
    });
    for_each_multiset_index(combo.s(), n, [&](const std::vector<std::size_t>& t) {
        std::int64_t sum = 0;
        for (auto i : t) sum += A.elements[i];
        for (auto m : minus_sums) ++stats.class_counts[sum - m];
    });

    const int top = k_max > 0 ? k_max : static_cast<int>(stats.max_multiplicity());
    stats.X.assign(static_cast<std::size_t>(top), 0);
    for (const auto& [v, r] : stats.class_counts) {
        BigInt binom = 1;
        for (int k = 1; k <= top && static_cast<std::uint64_t>(k) <= r; ++k) {
            binom *= r - static_cast<std::uint64_t>(k) + 1;
            binom /= k;
            stats.X[k - 1] += binom;
        }
    }
    return stats;
}

std::string to_string(MstdClass c) {
    switch (c) {
        case MstdClass::SumDominated: return "sum-dominated";
        case MstdClass::Balanced: return "balanced";
        case MstdClass::DifferenceDominated: return "difference-dominated";
    }
    return "unknown";
}

MstdClass mstd_classify(const SampledSet& A) {
    const auto sums = gen_sumset(A, SignedCombination(2, 0)).cardinality;
    const auto diffs = gen_sumset(A, SignedCombination(1, 1)).cardinality;
    if (sums > diffs) return MstdClass::SumDominated;
    if (sums < diffs) return MstdClass::DifferenceDominated;
    return MstdClass::Balanced;
}

}  // namespace gensum
