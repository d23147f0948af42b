#include "gensum/combinat.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <string>

#include "gensum/errors.hpp"

namespace gensum {

namespace {

// Visits every non-decreasing (strict: increasing) k-tuple over {0..N}.
template <typename Fn>
void for_each_sorted_tuple(int k, std::int64_t N, bool strict, Fn&& fn) {
    std::vector<std::int64_t> t(static_cast<std::size_t>(k));
    if (k == 0) {
        fn(t);
        return;
    }
    const std::int64_t step = strict ? 1 : 0;
    for (int i = 0; i < k; ++i) t[i] = step * i;
    if (t[k - 1] > N) return;
    while (true) {
        fn(t);
        // Advance the rightmost position that still has room.
        int i = k - 1;
        while (i >= 0 && t[i] >= N - step * (k - 1 - i)) --i;
        if (i < 0) return;
        ++t[i];
        for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + step;
    }
}

std::uint64_t checked_pow(std::uint64_t base, int exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > cap / base) return cap + 1;
        r *= base;
    }
    return r;
}

void require_budget(const BigInt& needed, std::uint64_t cap, const char* what) {
    if (needed > cap) {
        throw BudgetExceeded(std::string(what) + " needs " + needed.str() +
                             " steps, enumeration budget max_tuples=" + std::to_string(cap));
    }
}

std::size_t table_size(const SignedCombination& combo, std::int64_t N) {
    return static_cast<std::size_t>(combo.h()) * static_cast<std::size_t>(N) + 1;
}

}  // namespace

SignedCombination::SignedCombination(int s, int d) : s_(s), d_(d) {
    if (s < 1) throw ConfigError("s must be >= 1, got " + std::to_string(s));
    if (d < 0) throw ConfigError("d must be >= 0, got " + std::to_string(d));
    if (d > s) {
        throw ConfigError("d must not exceed s (got s=" + std::to_string(s) +
                          ", d=" + std::to_string(d) + ")");
    }
    if (s + d < 2) throw ConfigError("h = s + d must be >= 2");
    if (s + d > 20) throw ConfigError("h = s + d must be <= 20");
}

std::uint64_t SignedCombination::block_symmetry() const noexcept {
    return factorial(s_) * factorial(d_);
}

std::uint64_t factorial(int n) {
    if (n < 0 || n > 20) throw ConfigError("factorial argument out of range");
    std::uint64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
    return r;
}

BigInt ext_binom(std::int64_t a, std::int64_t b) {
    if (b < 0) throw ConfigError("ext_binom: b must be >= 0");
    if (a < b) return 0;
    const std::int64_t k = std::min(b, a - b);
    BigInt r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r *= (a - k + i);
        r /= i;  // exact: r is C(a-k+i, i) here
    }
    return r;
}

BigInt stars_and_bars(std::int64_t n, std::int64_t k) {
    if (n < 0) throw ConfigError("stars_and_bars: n must be >= 0");
    if (k < 1) throw ConfigError("stars_and_bars: k must be >= 1");
    return ext_binom(n + k - 1, k - 1);
}

BigInt rep_count(std::int64_t n, const SignedCombination& combo, std::int64_t N) {
    if (N < 0) throw ConfigError("N must be >= 0");
    if (n < combo.min_value(N) || n > combo.max_value(N)) return 0;
    const int h = combo.h();
    const std::int64_t shifted = n + std::int64_t{combo.d()} * N;
    BigInt total = 0;
    for (int i = 0; i <= h; ++i) {
        const std::int64_t top = shifted - std::int64_t{i} * (N + 1) + h - 1;
        if (top < h - 1) break;  // this and every later term vanishes
        BigInt term = ext_binom(h, i) * ext_binom(top, h - 1);
        if (i % 2 == 0) {
            total += term;
        } else {
            total -= term;
        }
    }
    return total;
}

const BigInt& RepresentationCounts::at(std::int64_t n) const {
    if (n < min_value() || n > max_value()) {
        throw std::out_of_range("RepresentationCounts::at: n=" + std::to_string(n));
    }
    return counts[static_cast<std::size_t>(n - min_value())];
}

RepresentationCounts rep_counts_all(const SignedCombination& combo, std::int64_t N,
                                    const TableBudget& budget) {
    if (N < 0) throw ConfigError("N must be >= 0");
    const auto entries = static_cast<std::uint64_t>(combo.h()) * static_cast<std::uint64_t>(N) + 1;
    if (entries > budget.max_entries) {
        throw BudgetExceeded("representation table needs " + std::to_string(entries) +
                             " entries, budget max_entries=" + std::to_string(budget.max_entries));
    }
    RepresentationCounts out{combo, N, {}};
    out.counts.resize(table_size(combo, N));
    // R depends only on h and n + dN, and is symmetric about the centre.
    const std::size_t size = out.counts.size();
    for (std::size_t i = 0; i <= (size - 1) / 2; ++i) {
        out.counts[i] = rep_count(out.min_value() + static_cast<std::int64_t>(i), combo, N);
        out.counts[size - 1 - i] = out.counts[i];
    }
    return out;
}

void write_counts_csv(std::ostream& out, const RepresentationCounts& counts) {
    out << "n,count\n";
    for (std::size_t i = 0; i < counts.counts.size(); ++i) {
        out << counts.min_value() + static_cast<std::int64_t>(i) << ',' << counts.counts[i].str()
            << '\n';
    }
}

BigInt rep_count_bruteforce(std::int64_t n, const SignedCombination& combo, std::int64_t N,
                            const EnumerationBudget& budget) {
    if (N < 0) throw ConfigError("N must be >= 0");
    const int h = combo.h();
    const std::uint64_t tuples = checked_pow(static_cast<std::uint64_t>(N + 1), h, budget.max_tuples);
    require_budget(tuples, budget.max_tuples, "rep_count_bruteforce");

    std::vector<std::int64_t> a(static_cast<std::size_t>(h), 0);
    std::uint64_t hits = 0;
    while (true) {
        std::int64_t value = 0;
        for (int i = 0; i < h; ++i) value += (i < combo.s()) ? a[i] : -a[i];
        if (value == n) ++hits;
        int i = h - 1;
        while (i >= 0 && a[i] == N) a[i--] = 0;
        if (i < 0) break;
        ++a[i];
    }
    return hits;
}

std::vector<std::uint64_t> class_counts_all(const SignedCombination& combo, std::int64_t N,
                                            bool all_distinct, const EnumerationBudget& budget) {
    if (N < 0) throw ConfigError("N must be >= 0");
    const BigInt classes = ext_binom(N + combo.s(), combo.s()) * ext_binom(N + combo.d(), combo.d());
    require_budget(classes, budget.max_tuples, "class enumeration");

    std::vector<std::uint64_t> tally(table_size(combo, N), 0);
    const std::int64_t offset = std::int64_t{combo.d()} * N;

    // Minus blocks are materialized once; plus blocks are streamed.
    const int d = combo.d();
    std::vector<std::int64_t> minus_elems;
    std::vector<std::int64_t> minus_sums;
    for_each_sorted_tuple(d, N, all_distinct, [&](const std::vector<std::int64_t>& t) {
        std::int64_t sum = 0;
        for (auto x : t) sum += x;
        minus_elems.insert(minus_elems.end(), t.begin(), t.end());
        minus_sums.push_back(sum);
    });

    for_each_sorted_tuple(combo.s(), N, all_distinct, [&](const std::vector<std::int64_t>& plus) {
        std::int64_t plus_sum = 0;
        for (auto x : plus) plus_sum += x;
        for (std::size_t m = 0; m < minus_sums.size(); ++m) {
            if (all_distinct) {
                const auto* mb = minus_elems.data() + m * static_cast<std::size_t>(d);
                bool clash = false;
                for (int j = 0; j < d && !clash; ++j) {
                    clash = std::binary_search(plus.begin(), plus.end(), mb[j]);
                }
                if (clash) continue;
            }
            ++tally[static_cast<std::size_t>(plus_sum - minus_sums[m] + offset)];
        }
    });
    return tally;
}

BigInt distinct_class_count(std::int64_t n, const SignedCombination& combo, std::int64_t N,
                            const EnumerationBudget& budget) {
    if (n < combo.min_value(N) || n > combo.max_value(N)) {
        if (N < 0) throw ConfigError("N must be >= 0");
        return 0;
    }
    const auto all = class_counts_all(combo, N, false, budget);
    return all[static_cast<std::size_t>(n - combo.min_value(N))];
}

}  // namespace gensum
