#pragma once

// Segmented bit sieve over odd integers. Shared by the prime scans, the
// rough-number scans and the period scan behind the Jacobsthal function.

#include <algorithm>
#include <bit>
#include <future>
#include <span>
#include <thread>
#include <vector>

#include "gapforge/arith.hpp"
#include "gapforge/sieve.hpp"

namespace gapforge::detail {

/// Odd primes <= limit from a dense byte sieve (index i <-> 2i+1).
std::vector<u64> small_odd_primes(u64 limit);

/// Rough upper bound on the number of primes <= n (Rosser-Schoenfeld).
u64 prime_count_upper_bound(u64 n);

void require_budget(u64 bytes, const SieveConfig& config, const char* what);

enum class StrikeFrom { Square, Prime };

/// Visits, in ascending order, every odd v in [first, last] that is not an odd
/// multiple of any listed odd prime. With StrikeFrom::Square striking for p
/// starts at p*p (primes survive); with StrikeFrom::Prime it starts at p.
template <class Visit>
void scan_unmarked_odds(u64 first, u64 last, std::span<const u64> odd_primes, StrikeFrom from,
                        u64 segment_bits, Visit&& visit) {
    if ((first & 1) == 0) {
        if (first == ~u64{0}) return;
        ++first;
    }
    if ((last & 1) == 0) {
        if (last == 0) return;
        --last;
    }
    if (first > last) return;
    const u64 count = (last - first) / 2 + 1;
    segment_bits = std::max<u64>(64, segment_bits);

    // next[i]: odd-index (relative to first) of the next multiple of odd_primes[i] to strike.
    std::vector<u64> next(odd_primes.size(), count);
    for (std::size_t i = 0; i < odd_primes.size(); ++i) {
        const u64 p = odd_primes[i];
        const u128 start = from == StrikeFrom::Square ? static_cast<u128>(p) * p : static_cast<u128>(p);
        if (start > last) {
            if (from == StrikeFrom::Square) break;
            continue;
        }
        u128 m = std::max<u128>(start, first);
        const u128 r = m % p;
        if (r != 0) m += p - r;
        if ((m & 1) == 0) m += p;
        if (m <= last) next[i] = static_cast<u64>((m - first) / 2);
    }

    std::vector<u64> words((segment_bits + 63) / 64);
    for (u64 seg_begin = 0; seg_begin < count; seg_begin += segment_bits) {
        const u64 nbits = std::min(segment_bits, count - seg_begin);
        const u64 seg_end = seg_begin + nbits;
        const u64 nwords = (nbits + 63) / 64;
        std::fill_n(words.begin(), nwords, 0);
        for (std::size_t i = 0; i < odd_primes.size(); ++i) {
            u64 g = next[i];
            if (g >= seg_end) continue;
            const u64 p = odd_primes[i];
            for (; g < seg_end; g += p) {
                const u64 k = g - seg_begin;
                words[k >> 6] |= u64{1} << (k & 63);
            }
            next[i] = g;
        }
        const u64 base_value = first + 2 * seg_begin;
        for (u64 w = 0; w < nwords; ++w) {
            u64 open = ~words[w];
            if (w == nwords - 1 && (nbits & 63) != 0) open &= (u64{1} << (nbits & 63)) - 1;
            while (open != 0) {
                const int bit = std::countr_zero(open);
                open &= open - 1;
                visit(base_value + 2 * (w * 64 + static_cast<u64>(bit)));
            }
        }
    }
}

/// Visits every prime in [first, last] in ascending order.
template <class Visit>
void scan_primes(u64 first, u64 last, std::span<const u64> base_odd_primes, u64 segment_bits, Visit&& visit) {
    if (first > last) return;
    if (first <= 2 && last >= 2) visit(u64{2});
    // Base primes are struck from p*p, so they survive; starting at 3 drops 1.
    scan_unmarked_odds(std::max<u64>(first, 3), last, base_odd_primes, StrikeFrom::Square, segment_bits, visit);
}

/// Splits [first, last] into `parts` contiguous chunks and runs fn(chunk_first, chunk_last)
/// on each, concurrently when parts > 1. Results come back in ascending chunk order.
template <class Fn>
auto run_chunked(u64 first, u64 last, unsigned parts, Fn&& fn) {
    using Result = decltype(fn(first, last));
    std::vector<Result> results;
    if (first > last) return results;
    const u64 span_len = last - first;
    parts = static_cast<unsigned>(std::clamp<u64>(parts, 1, span_len / 2 + 1));
    if (parts == 1) {
        results.push_back(fn(first, last));
        return results;
    }
    const u64 step = span_len / parts + 1;
    std::vector<std::future<Result>> futures;
    for (unsigned i = 0; i < parts; ++i) {
        const u64 lo = first + static_cast<u64>(i) * step;
        if (lo > last || lo < first) break;
        const u64 hi = (last - lo < step - 1) ? last : lo + step - 1;
        futures.push_back(std::async(std::launch::async, [&fn, lo, hi] { return fn(lo, hi); }));
    }
    for (auto& f : futures) results.push_back(f.get());
    return results;
}

/// Running maximum gap over an ascending stream of members.
struct GapAccumulator {
    bool any = false;
    u64 first = 0;
    u64 last = 0;
    GapRecord best{};

    void push(u64 v) {
        if (!any) {
            any = true;
            first = v;
        } else if (v - last > best.gap) {
            best = GapRecord{v - last, last, v};
        }
        last = v;
    }

    /// Combines two adjacent accumulators (this one to the left of `right`).
    void append(const GapAccumulator& right) {
        if (!right.any) return;
        if (!any) {
            *this = right;
            return;
        }
        const GapRecord boundary{right.first - last, last, right.first};
        if (boundary.gap > best.gap) best = boundary;
        if (right.best.gap > best.gap) best = right.best;
        last = right.last;
    }
};

}  // namespace gapforge::detail
