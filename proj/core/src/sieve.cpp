#include "gapforge/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "odd_sieve.hpp"

namespace gapforge {

namespace detail {

std::vector<u64> small_odd_primes(u64 limit) {
    std::vector<u64> out;
    if (limit < 3) return out;
    const u64 n = (limit - 1) / 2;  // index i in [1, n] <-> 2i+1 <= limit
    std::vector<unsigned char> composite(n + 1, 0);
    for (u64 i = 1; i <= n; ++i) {
        if (composite[i]) continue;
        const u64 p = 2 * i + 1;
        out.push_back(p);
        for (u64 j = (p * p - 1) / 2; j <= n; j += p) composite[j] = 1;
    }
    return out;
}

u64 prime_count_upper_bound(u64 n) {
    if (n < 17) return 6;
    const long double x = static_cast<long double>(n);
    return static_cast<u64>(1.25506L * x / std::log(x)) + 1;
}

void require_budget(u64 bytes, const SieveConfig& config, const char* what) {
    if (bytes > config.memory_budget) {
        throw Error(Errc::ResourceLimit, std::string(what) + " needs about " + std::to_string(bytes) +
                                             " bytes, over the memory budget of " +
                                             std::to_string(config.memory_budget));
    }
}

}  // namespace detail

namespace {

using detail::GapAccumulator;

std::vector<u64> base_primes_for(u64 hi, const SieveConfig& config) {
    const u64 root = isqrt(hi);
    detail::require_budget(root / 2 + 8 * detail::prime_count_upper_bound(root), config, "base prime table");
    return detail::small_odd_primes(root);
}

void check_segment(const SieveConfig& config) {
    detail::require_budget((std::max<u64>(config.segment_bits, 64) / 8) * std::max(1u, config.threads), config,
                           "segment buffers");
}

void check_progression(u64 q, u64 b) {
    if (b == 0 || b >= q) {
        throw Error(Errc::BadProgression, "need 0 < b < q (got b=" + std::to_string(b) + ", q=" + std::to_string(q) + ")");
    }
    if (gcd(b, q) != 1) {
        throw Error(Errc::BadProgression, "gcd(" + std::to_string(b) + ", " + std::to_string(q) + ") = " +
                                              std::to_string(gcd(b, q)) + " > 1");
    }
}

}  // namespace

std::vector<u64> primes_in_range(u64 lo, u64 hi, const SieveConfig& config) {
    if (lo > hi) throw Error(Errc::InvalidArgument, "primes_in_range requires lo <= hi");
    std::vector<u64> out;
    if (lo == hi) return out;
    const u64 estimate = std::min(detail::prime_count_upper_bound(hi), (hi - lo) / 2 + 2);
    detail::require_budget(8 * estimate, config, "prime list");
    check_segment(config);
    const auto base = base_primes_for(hi, config);
    auto chunks = detail::run_chunked(lo + 1, hi, config.threads, [&](u64 a, u64 b) {
        std::vector<u64> part;
        detail::scan_primes(a, b, base, config.segment_bits, [&](u64 p) { part.push_back(p); });
        return part;
    });
    for (auto& part : chunks) out.insert(out.end(), part.begin(), part.end());
    return out;
}

std::vector<u64> primes_up_to(u64 n, const SieveConfig& config) {
    if (n < 2) return {};
    return primes_in_range(0, n, config);
}

u64 prime_count(u64 x, const SieveConfig& config) {
    if (x < 2) return 0;
    check_segment(config);
    const auto base = base_primes_for(x, config);
    const auto parts = detail::run_chunked(2, x, config.threads, [&](u64 a, u64 b) {
        u64 n = 0;
        detail::scan_primes(a, b, base, config.segment_bits, [&](u64) { ++n; });
        return n;
    });
    return std::accumulate(parts.begin(), parts.end(), u64{0});
}

std::vector<u64> progression_counts(u64 x, u64 q, const SieveConfig& config) {
    if (q == 0) throw Error(Errc::ZeroModulus, "modulus must be positive");
    detail::require_budget(8 * q * std::max(1u, config.threads), config, "residue tally");
    check_segment(config);
    std::vector<u64> counts(q, 0);
    if (x < 2) return counts;
    const auto base = base_primes_for(x, config);
    const auto parts = detail::run_chunked(2, x, config.threads, [&](u64 a, u64 b) {
        std::vector<u64> local(q, 0);
        detail::scan_primes(a, b, base, config.segment_bits, [&](u64 p) { ++local[p % q]; });
        return local;
    });
    for (const auto& local : parts) {
        for (u64 r = 0; r < q; ++r) counts[r] += local[r];
    }
    return counts;
}

ProgressionStats prime_count_ap(u64 x, u64 q, u64 b, const SieveConfig& config) {
    check_progression(q, b);
    if (q >= x) throw Error(Errc::BadProgression, "need q < x (got q=" + std::to_string(q) + ", x=" + std::to_string(x) + ")");
    check_segment(config);
    const auto base = base_primes_for(x, config);
    const auto parts = detail::run_chunked(2, x, config.threads, [&](u64 lo, u64 hi) {
        u64 n = 0;
        detail::scan_primes(lo, hi, base, config.segment_bits, [&](u64 p) { n += (p % q == b); });
        return n;
    });
    const u64 count = std::accumulate(parts.begin(), parts.end(), u64{0});
    const Rational delta = Rational::reduce(static_cast<u128>(count) * totient(q), x);
    return ProgressionStats{q, b, x, count, delta};
}

GapRecord max_prime_gap(u64 x, const SieveConfig& config) {
    if (x < 5) throw Error(Errc::InvalidArgument, "max_prime_gap requires x >= 5");
    check_segment(config);
    const auto base = base_primes_for(x, config);
    const auto parts = detail::run_chunked(2, x, config.threads, [&](u64 a, u64 b) {
        GapAccumulator acc;
        detail::scan_primes(a, b, base, config.segment_bits, [&](u64 p) { acc.push(p); });
        return acc;
    });
    GapAccumulator total;
    for (const auto& part : parts) total.append(part);
    return total.best;
}

std::optional<u64> least_prime_ap(u64 q, u64 b, u64 limit) {
    check_progression(q, b);
    if (limit < q) throw Error(Errc::BadProgression, "need limit >= q");
    for (u64 n = b; n <= limit; n += q) {
        if (is_prime(n)) return n;
        if (limit - n < q) break;
    }
    return std::nullopt;
}

bool is_rough(u64 n, u64 u) {
    if (n == 0) return false;
    if (n == 1) return true;
    if (n <= u) return false;
    for (u64 p = 2; p <= u && p <= n / p; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) return false;
    }
    // No factor <= min(u, sqrt n): either n is prime (> u) or its least factor exceeds u.
    return true;
}

GapRecord rough_gap_scan(u64 u, u64 lo, u64 hi, const SieveConfig& config) {
    if (u < 2) throw Error(Errc::InvalidArgument, "rough_gap_scan requires u >= 2");
    if (lo >= hi) throw Error(Errc::InvalidArgument, "rough_gap_scan requires lo < hi");
    detail::require_budget((hi - lo) / 16 + 1, config, "rough scan window");
    detail::require_budget(u / 2 + 8 * detail::prime_count_upper_bound(u), config, "rough scan prime table");
    check_segment(config);
    // Every even number is divisible by 2 <= u, so only odd numbers can be rough.
    const auto strike = detail::small_odd_primes(u);
    const auto parts = detail::run_chunked(lo, hi, config.threads, [&](u64 a, u64 b) {
        GapAccumulator acc;
        detail::scan_unmarked_odds(a, b, strike, detail::StrikeFrom::Prime, config.segment_bits,
                                   [&](u64 v) { acc.push(v); });
        return acc;
    });
    GapAccumulator total;
    for (const auto& part : parts) total.append(part);
    if (!total.any || total.first == total.last) {
        throw Error(Errc::EmptyRange, "fewer than two " + std::to_string(u) + "-rough integers in [" +
                                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return total.best;
}

}  // namespace gapforge
