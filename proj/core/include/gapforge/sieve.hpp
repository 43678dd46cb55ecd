#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gapforge/arith.hpp"

namespace gapforge {

/// Resource knobs for the segmented sieves.
struct SieveConfig {
    /// Upper bound on bytes any single operation may allocate.
    u64 memory_budget = u64{1} << 30;
    /// Odd numbers per segment (one bit each).
    u64 segment_bits = u64{1} << 20;
    /// Worker threads for range scans. Results do not depend on this value.
    unsigned threads = 1;
};

/// Difference between consecutive members of a set (primes, or u-rough integers).
struct GapRecord {
    u64 gap = 0;
    u64 lo = 0;
    u64 hi = 0;

    friend bool operator==(const GapRecord&, const GapRecord&) = default;
};

/// Measured count of primes p <= x with p = b (mod q), and delta = count * phi(q) / x.
struct ProgressionStats {
    u64 q = 0;
    u64 b = 0;
    u64 x = 0;
    u64 count = 0;
    Rational delta;
};

std::vector<u64> primes_up_to(u64 n, const SieveConfig& config = {});

/// Primes p with lo < p <= hi, ascending.
std::vector<u64> primes_in_range(u64 lo, u64 hi, const SieveConfig& config = {});

/// Number of primes <= x.
u64 prime_count(u64 x, const SieveConfig& config = {});

ProgressionStats prime_count_ap(u64 x, u64 q, u64 b, const SieveConfig& config = {});

/// counts[r] = #{p <= x prime : p = r (mod q)} for every r in [0, q).
std::vector<u64> progression_counts(u64 x, u64 q, const SieveConfig& config = {});

/// Largest p' - p over consecutive primes p < p' <= x; ties go to the smallest p.
GapRecord max_prime_gap(u64 x, const SieveConfig& config = {});

/// Smallest prime p = b (mod q) with p <= limit.
std::optional<u64> least_prime_ap(u64 q, u64 b, u64 limit);

/// Largest difference between consecutive u-rough integers in [lo, hi]. 1 counts as u-rough.
GapRecord rough_gap_scan(u64 u, u64 lo, u64 hi, const SieveConfig& config = {});

/// True iff n has no prime factor <= u (so 1 is rough and 0 is not).
bool is_rough(u64 n, u64 u);

}  // namespace gapforge
