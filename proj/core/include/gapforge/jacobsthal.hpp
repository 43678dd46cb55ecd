#pragma once

#include <optional>

#include "gapforge/arith.hpp"
#include "gapforge/covering.hpp"
#include "gapforge/sieve.hpp"

namespace gapforge {

/// Default upper limit on primorial(u) for the full-period scan (admits u <= 23).
inline constexpr u64 kDefaultPeriodCap = 250'000'000;

/// J(u), or a lower bound for it, with the two consecutive u-rough integers that realise it.
struct JacobsthalValue {
    u64 u = 0;
    u64 value = 0;
    bool exact = false;
    /// Flanking u-rough integers. For exact values witness_hi - witness_lo == value;
    /// for certificate bounds the difference is at least value.
    BigNat witness_lo;
    BigNat witness_hi;
    /// (x - b) / q for bounds read off a covering certificate.
    std::optional<Rational> stated_bound;

    /// The witness as a 64-bit record; throws Overflow if an endpoint does not fit.
    GapRecord witness() const;
};

/// Exact J(u) by marking one full period [0, primorial(u) + 1] of a bit array.
JacobsthalValue jacobsthal_exact(u64 u, u64 period_cap = kDefaultPeriodCap, const SieveConfig& config = {});

/// J(u) >= y + 2 from a certificate covering [0, y], with the flanking rough integers
/// around its CRT witness run.
JacobsthalValue jacobsthal_bound_from_certificate(const CoveringCertificate& cert, const SieveConfig& config = {});

}  // namespace gapforge
