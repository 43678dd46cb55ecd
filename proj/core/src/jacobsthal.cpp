#include "gapforge/jacobsthal.hpp"

#include <bit>
#include <string>
#include <vector>

#include "odd_sieve.hpp"

namespace gapforge {

GapRecord JacobsthalValue::witness() const {
    const u64 lo = witness_lo.to_u64();
    const u64 hi = witness_hi.to_u64();
    return GapRecord{hi - lo, lo, hi};
}

JacobsthalValue jacobsthal_exact(u64 u, u64 period_cap, const SieveConfig& config) {
    if (u < 2) throw Error(Errc::InvalidArgument, "jacobsthal_exact requires u >= 2");
    const BigNat period_big = primorial(u);
    if (period_big > BigNat(period_cap)) {
        throw Error(Errc::PeriodTooLarge, "primorial(" + std::to_string(u) + ") = " + period_big.to_decimal() +
                                              " exceeds the period cap " + std::to_string(period_cap));
    }
    const u64 period = period_big.to_u64();
    const u64 last = period + 1;  // scan positions [0, P + 1]
    detail::require_budget(last / 8 + 8, config, "Jacobsthal period bitmap");

    std::vector<u64> marked(last / 64 + 1, 0);
    for (u64 p = 2; p <= u; ++p) {
        if (!is_prime(p)) continue;
        for (u64 m = 0; m <= last; m += p) marked[m >> 6] |= u64{1} << (m & 63);
    }

    detail::GapAccumulator acc;
    for (u64 w = 0; w < marked.size(); ++w) {
        u64 open = ~marked[w];
        while (open != 0) {
            const u64 pos = w * 64 + static_cast<u64>(std::countr_zero(open));
            open &= open - 1;
            if (pos > last) break;
            acc.push(pos);
        }
    }
    JacobsthalValue out;
    out.u = u;
    out.value = acc.best.gap;
    out.exact = true;
    out.witness_lo = BigNat(acc.best.lo);
    out.witness_hi = BigNat(acc.best.hi);
    return out;
}

JacobsthalValue jacobsthal_bound_from_certificate(const CoveringCertificate& cert, const SieveConfig& config) {
    const VerificationReport report = verify_covering(cert, config);
    if (!report.ok()) {
        const auto failed = report.failures().front();
        throw Error(Errc::InvalidCertificate, "certificate fails '" + failed.check + "': " + failed.detail);
    }
    const CrtWitness w = crt_witness(cert);

    // Residues of T modulo every prime <= u decide u-roughness of T + offset.
    const auto primes = primes_up_to(cert.u, config);
    std::vector<u64> residues;
    residues.reserve(primes.size());
    for (u64 p : primes) residues.push_back(w.T.mod(p));
    auto rough_below = [&](u64 k) {  // is T - k rough?
        for (std::size_t i = 0; i < primes.size(); ++i) {
            if ((residues[i] + primes[i] - k % primes[i]) % primes[i] == 0) return false;
        }
        return true;
    };
    auto rough_above = [&](u64 k) {  // is T + k rough?
        for (std::size_t i = 0; i < primes.size(); ++i) {
            if ((residues[i] + k % primes[i]) % primes[i] == 0) return false;
        }
        return true;
    };

    // T >= 1 and 1 is rough, so the downward search stops by T - k = 1.
    u64 down = 1;
    while (!rough_below(down)) ++down;
    u64 up = cert.y + 1;
    while (!rough_above(up)) ++up;

    JacobsthalValue out;
    out.u = cert.u;
    out.value = cert.y + 2;
    out.exact = false;
    mpz_class lo = w.T.mpz() - BigNat(down).mpz();
    mpz_class hi = w.T.mpz() + BigNat(up).mpz();
    out.witness_lo = BigNat(std::move(lo));
    out.witness_hi = BigNat(std::move(hi));
    if (cert.q != 0 && cert.x >= cert.b) out.stated_bound = cert.gap_lower_rational();
    return out;
}

}  // namespace gapforge
