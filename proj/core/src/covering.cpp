#include "gapforge/covering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include <mpfr.h>

#include "odd_sieve.hpp"

namespace gapforge {

namespace {

std::string str(u64 v) { return std::to_string(v); }

/// floor(sqrt(n)) for 128-bit n.
u128 isqrt128(u128 n) {
    if (n == 0) return 0;
    u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// Sign of u*q*den - 10*num*x*ln(u) at `bits` of precision, or 2 when the
/// difference is within rounding error.
int threshold_sign_mpfr(u64 u, u64 x, u64 q, const Rational& delta, mpfr_prec_t bits) {
    const mpz_class lhs_int = BigNat(u).mpz() * BigNat(q).mpz() * BigNat(delta.den()).mpz();
    const mpz_class coef_int = BigNat(delta.num()).mpz() * BigNat(x).mpz() * 10;
    mpfr_t l, r, lg;
    mpfr_inits2(bits, l, r, lg, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_z(l, lhs_int.get_mpz_t(), MPFR_RNDN);
    mpfr_set_z(r, coef_int.get_mpz_t(), MPFR_RNDN);
    mpfr_set_ui(lg, u, MPFR_RNDN);
    mpfr_log(lg, lg, MPFR_RNDN);
    mpfr_mul(r, r, lg, MPFR_RNDN);
    mpfr_sub(l, l, r, MPFR_RNDN);
    int sign = mpfr_sgn(l);
    if (sign != 0) {
        mpfr_abs(l, l, MPFR_RNDN);
        mpfr_div(l, l, r, MPFR_RNDN);
        if (mpfr_get_exp(l) <= -static_cast<mpfr_exp_t>(bits) + 8) sign = 2;
    } else {
        sign = 2;
    }
    mpfr_clears(l, r, lg, static_cast<mpfr_ptr>(nullptr));
    return sign;
}

/// Whether u / ln u >= 10 * num * x / (q * den), i.e. u*q*den >= 10*num*x*ln u.
bool u_threshold_holds(u64 u, u64 x, u64 q, const Rational& delta) {
    if (delta.num() == 0) return true;
    const long double l = static_cast<long double>(u) * static_cast<long double>(q) * static_cast<long double>(delta.den());
    const long double r = 10.0L * static_cast<long double>(delta.num()) * static_cast<long double>(x) *
                          std::log(static_cast<long double>(u));
    // long double carries 64 mantissa bits; anything this close is settled with MPFR.
    if (std::fabs(l - r) > 1e-15L * std::max(l, r)) return l >= r;
    for (mpfr_prec_t bits = 256; bits <= 8192; bits *= 2) {
        const int sign = threshold_sign_mpfr(u, x, q, delta, bits);
        if (sign != 2) return sign > 0;
    }
    // ln u is transcendental for u >= 2, so an exact tie cannot occur.
    throw Error(Errc::DomainError, "u threshold comparison did not resolve at u=" + str(u));
}

}  // namespace

u64 compute_u(u64 x, u64 q, const Rational& delta) {
    if (q == 0 || x <= q) throw Error(Errc::InvalidArgument, "compute_u requires x > q >= 1");
    const u128 four_x = static_cast<u128>(x) * 4;
    const u128 first = std::max<u128>(3, isqrt128(four_x) + 1);
    if (first > ~u64{0}) throw Error(Errc::Overflow, "u exceeds 64 bits");
    u64 lo = static_cast<u64>(first);
    if (u_threshold_holds(lo, x, q, delta)) return lo;
    // Exponential then binary search; u / ln u is increasing for u >= 3.
    u64 hi = lo;
    while (!u_threshold_holds(hi, x, q, delta)) {
        lo = hi;
        if (hi > (~u64{0}) / 2) {
            if (hi == ~u64{0} || !u_threshold_holds(~u64{0}, x, q, delta)) {
                throw Error(Errc::Overflow, "u exceeds 64 bits");
            }
            hi = ~u64{0};
            break;
        }
        hi *= 2;
    }
    // Invariant: threshold fails at lo, holds at hi.
    while (hi - lo > 1) {
        const u64 mid = lo + (hi - lo) / 2;
        (u_threshold_holds(mid, x, q, delta) ? hi : lo) = mid;
    }
    return hi;
}

std::vector<ResidueClass> forced_classes(u64 u, u64 q, u64 b) {
    if (u < 3) throw Error(Errc::InvalidArgument, "forced_classes requires u >= 3");
    if (q == 0 || gcd(b, q) != 1) throw Error(Errc::BadProgression, "forced_classes requires gcd(b, q) = 1");
    std::vector<ResidueClass> out;
    for (u64 p : primes_up_to(u / 2)) {
        if (q % p == 0) continue;
        const u64 minus_b = (p - b % p) % p;
        out.push_back(ResidueClass{p, mulmod(minus_b, mod_inverse(q % p, p), p), ClassKind::Forced});
    }
    return out;
}

std::vector<u64> sieve_survivors(u64 y, std::span<const ResidueClass> forced, const SieveConfig& config) {
    detail::require_budget(y / 8 + 1, config, "survivor bitmap");
    std::set<u64> seen;
    for (const auto& c : forced) {
        if (!seen.insert(c.p).second) throw Error(Errc::DuplicateModulus, "modulus " + str(c.p) + " appears twice");
    }
    std::vector<bool> struck(y + 1, false);
    for (const auto& c : forced) {
        for (u64 n = c.a; n <= y; n += c.p) {
            struck[n] = true;
            if (y - n < c.p) break;
        }
    }
    std::vector<u64> out;
    for (u64 n = 0; n <= y; ++n) {
        if (!struck[n]) out.push_back(n);
        if (n == y) break;
    }
    return out;
}

GreedyResult greedy_cover(std::span<const u64> survivors, u64 q, u64 u) {
    GreedyResult result;
    result.remaining.assign(survivors.begin(), survivors.end());
    for (u64 p : prime_divisors(q)) {
        if (p > u / 2) break;
        u64 best_a = 0;
        if (!result.remaining.empty()) {
            std::map<u64, u64> tally;
            for (u64 n : result.remaining) ++tally[n % p];
            u64 best_count = 0;
            for (const auto& [a, count] : tally) {
                if (count > best_count) {
                    best_count = count;
                    best_a = a;
                }
            }
        }
        result.classes.push_back(ResidueClass{p, best_a, ClassKind::Greedy});
        std::erase_if(result.remaining, [&](u64 n) { return n % p == best_a; });
    }
    return result;
}

bool matching_condition_holds(u64 remaining, u64 u) {
    if (u < 2) return remaining == 0;
    const long double bound = static_cast<long double>(u) / (5.0L * std::log(static_cast<long double>(u)));
    return static_cast<long double>(remaining) <= bound;
}

std::vector<ResidueClass> match_large_primes(std::span<const u64> remaining, u64 u, const SieveConfig& config) {
    const auto fresh = primes_in_range(u / 2, u, config);
    if (remaining.size() > fresh.size()) {
        throw InsufficientPrimesError(remaining.size(), fresh.size(), matching_condition_holds(remaining.size(), u));
    }
    std::vector<ResidueClass> out;
    out.reserve(remaining.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        out.push_back(ResidueClass{fresh[i], remaining[i] % fresh[i], ClassKind::Matched});
    }
    return out;
}

namespace {

void check_progression(u64 x, u64 q, u64 b) {
    if (!(0 < b && b < q && q < x)) {
        throw Error(Errc::BadProgression, "need 0 < b < q < x (got x=" + str(x) + ", q=" + str(q) + ", b=" + str(b) + ")");
    }
    if (gcd(b, q) != 1) {
        throw Error(Errc::BadProgression, "gcd(" + str(b) + ", " + str(q) + ") = " + str(gcd(b, q)) + " > 1");
    }
}

std::vector<ResidueClass> of_kind(const std::vector<ResidueClass>& classes, ClassKind kind) {
    std::vector<ResidueClass> out;
    std::copy_if(classes.begin(), classes.end(), std::back_inserter(out), [&](const auto& c) { return c.kind == kind; });
    return out;
}

std::string describe(const ResidueClass& c) {
    return "(" + str(c.p) + ", " + str(c.a) + ", " + std::string(to_string(c.kind)) + ")";
}

/// First position where two class lists differ, described for a report.
std::string first_difference(const std::vector<ResidueClass>& got, const std::vector<ResidueClass>& want) {
    const std::size_t n = std::min(got.size(), want.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!(got[i] == want[i])) return "entry " + str(i) + ": have " + describe(got[i]) + ", expected " + describe(want[i]);
    }
    return "have " + str(got.size()) + " classes, expected " + str(want.size());
}

class ReportBuilder {
public:
    void add(std::string check, bool pass, std::string detail) {
        report_.checks.push_back(CheckResult{std::move(check), pass, std::move(detail)});
    }
    VerificationReport take() { return std::move(report_); }

private:
    VerificationReport report_;
};

/// Returns whether the certificate is well-formed enough to re-derive from.
/// Without `pipeline`, only the covering-system checks run (moduli, residues, coverage).
bool structural_checks(const CoveringCertificate& c, ReportBuilder& out, const SieveConfig& config, bool pipeline) {
    const bool progression_ok = 0 < c.b && c.b < c.q && c.q < c.x && gcd(c.b, c.q) == 1;
    if (pipeline) out.add("progression", progression_ok,
            progression_ok ? "0 < b < q < x and gcd(b, q) = 1"
                           : "need 0 < b < q < x with gcd(b, q) = 1 (x=" + str(c.x) + ", q=" + str(c.q) + ", b=" + str(c.b) + ")");

    const u64 expected_y = (c.q != 0 && c.x >= c.b) ? (c.x - c.b) / c.q : 0;
    if (pipeline) out.add("y_value", c.q != 0 && c.x >= c.b && c.y == expected_y,
            "y=" + str(c.y) + ", floor((x-b)/q)=" + str(expected_y));

    const bool u_ok = static_cast<u128>(c.u) * c.u > static_cast<u128>(c.x) * 4;
    if (pipeline) out.add("u_exceeds_2sqrt_x", u_ok, "u=" + str(c.u) + (u_ok ? " satisfies" : " violates") + " u^2 > 4x");

    std::string residue_detail = "all residues in [0, p)";
    bool residues_ok = true;
    std::string prime_detail = "all moduli prime and <= u";
    bool primes_ok = true;
    std::string placement_detail = "forced/greedy p <= u/2, matched p in (u/2, u], greedy p | q, forced p does not divide q";
    bool placement_ok = true;
    std::set<u64> moduli;
    std::string distinct_detail = "all moduli distinct";
    bool distinct_ok = true;
    for (const auto& cls : c.classes) {
        if (residues_ok && cls.a >= cls.p) {
            residues_ok = false;
            residue_detail = "class " + describe(cls) + " has a >= p";
        }
        if (primes_ok && (!is_prime(cls.p) || cls.p > c.u)) {
            primes_ok = false;
            prime_detail = "class " + describe(cls) + (is_prime(cls.p) ? " has p > u" : " has composite modulus");
        }
        if (distinct_ok && !moduli.insert(cls.p).second) {
            distinct_ok = false;
            distinct_detail = "modulus " + str(cls.p) + " repeated";
        }
        if (placement_ok) {
            const bool small = cls.p <= c.u / 2;
            const bool divides = c.q != 0 && cls.p != 0 && c.q % cls.p == 0;
            bool ok = true;
            switch (cls.kind) {
                case ClassKind::Forced: ok = small && !divides; break;
                case ClassKind::Greedy: ok = small && divides; break;
                case ClassKind::Matched: ok = !small && cls.p <= c.u; break;
            }
            if (!ok) {
                placement_ok = false;
                placement_detail = "class " + describe(cls) + " is misplaced for u=" + str(c.u) + ", q=" + str(c.q);
            }
        }
    }
    out.add("class_residues", residues_ok, residue_detail);
    out.add("class_primes", primes_ok, prime_detail);
    out.add("distinct_primes", distinct_ok, distinct_detail);
    if (pipeline) out.add("kind_placement", placement_ok, placement_detail);

    const bool counts_ok = c.survivors_after_greedy <= c.survivors_initial && c.survivors_initial <= c.y + 1;
    if (pipeline) out.add("survivor_counts", counts_ok,
            "survivors_initial=" + str(c.survivors_initial) + ", survivors_after_greedy=" + str(c.survivors_after_greedy));

    // Exhaustive coverage of [0, y].
    if (c.y / 8 + 1 > config.memory_budget) {
        out.add("coverage", false, "y=" + str(c.y) + " exceeds the memory budget for the coverage bitmap");
        return false;
    }
    std::vector<bool> covered(c.y + 1, false);
    for (const auto& cls : c.classes) {
        if (cls.p == 0 || cls.a >= cls.p) continue;
        for (u64 n = cls.a; n <= c.y; n += cls.p) {
            covered[n] = true;
            if (c.y - n < cls.p) break;
        }
    }
    u64 uncovered = 0;
    std::optional<u64> first_uncovered;
    for (u64 n = 0; n <= c.y; ++n) {
        if (!covered[n]) {
            ++uncovered;
            if (!first_uncovered) first_uncovered = n;
        }
        if (n == c.y) break;
    }
    out.add("coverage", uncovered == 0,
            uncovered == 0 ? "every n in [0, " + str(c.y) + "] is covered"
                           : "n=" + str(*first_uncovered) + " is uncovered (" + str(uncovered) + " uncovered in total)");
    return progression_ok && u_ok;
}

void strict_checks(const CoveringCertificate& c, ReportBuilder& out, const SieveConfig& config) {
    const auto forced = of_kind(c.classes, ClassKind::Forced);

    // Forced congruence, class by class.
    std::string congruence_detail = "q*a + b = 0 (mod p) for every forced class";
    bool congruence_ok = true;
    for (const auto& cls : forced) {
        if (cls.p < 2) continue;
        const u64 lhs = (mulmod(c.q % cls.p, cls.a % cls.p, cls.p) + c.b % cls.p) % cls.p;
        if (lhs != 0) {
            congruence_ok = false;
            congruence_detail = "forced class " + describe(cls) + " gives q*a + b = " + str(lhs) + " (mod p)";
            break;
        }
    }
    out.add("forced_congruence", congruence_ok, congruence_detail);

    const ProgressionStats stats = prime_count_ap(c.x, c.q, c.b, config);
    // pi(x;q,b) <= delta * x / phi(q)  <=>  count * phi(q) * den <= num * x
    const BigNat lhs = BigNat(stats.count) * BigNat(totient(c.q)) * BigNat(c.delta.den());
    const BigNat rhs = BigNat(c.delta.num()) * BigNat(c.x);
    out.add("delta_hypothesis", lhs <= rhs,
            "pi(x;q,b)=" + str(stats.count) + ", measured delta=" + stats.delta.to_string() +
                ", certificate delta=" + c.delta.to_string());

    std::string u_detail;
    bool u_ok = false;
    try {
        const u64 expected = compute_u(c.x, c.q, c.delta);
        u_ok = expected == c.u;
        u_detail = "certificate u=" + str(c.u) + ", least admissible u=" + str(expected);
    } catch (const Error& e) {
        u_detail = std::string("compute_u failed: ") + e.what();
    }
    out.add("u_minimal", u_ok, u_detail);

    const auto expected_forced = forced_classes(c.u, c.q, c.b);
    out.add("forced_classes", forced == expected_forced,
            forced == expected_forced ? str(forced.size()) + " forced classes match" : first_difference(forced, expected_forced));

    const auto survivors = sieve_survivors(c.y, expected_forced, config);
    out.add("survivors_initial", survivors.size() == c.survivors_initial,
            "recomputed |N|=" + str(survivors.size()) + ", certificate says " + str(c.survivors_initial));

    const GreedyResult greedy = greedy_cover(survivors, c.q, c.u);
    const auto cert_greedy = of_kind(c.classes, ClassKind::Greedy);
    out.add("greedy_classes", cert_greedy == greedy.classes,
            cert_greedy == greedy.classes ? str(cert_greedy.size()) + " greedy classes match"
                                          : first_difference(cert_greedy, greedy.classes));
    out.add("survivors_after_greedy", greedy.remaining.size() == c.survivors_after_greedy,
            "recomputed |N'|=" + str(greedy.remaining.size()) + ", certificate says " + str(c.survivors_after_greedy));

    const auto cert_matched = of_kind(c.classes, ClassKind::Matched);
    out.add("matched_count", cert_matched.size() == c.survivors_after_greedy,
            str(cert_matched.size()) + " matched classes for |N'|=" + str(c.survivors_after_greedy));
    std::vector<ResidueClass> expected_all = expected_forced;
    try {
        const auto matched = match_large_primes(greedy.remaining, c.u, config);
        out.add("matched_classes", cert_matched == matched,
                cert_matched == matched ? str(matched.size()) + " matched classes match" : first_difference(cert_matched, matched));
        expected_all.insert(expected_all.end(), greedy.classes.begin(), greedy.classes.end());
        expected_all.insert(expected_all.end(), matched.begin(), matched.end());
        out.add("class_sequence", c.classes == expected_all,
                c.classes == expected_all ? "class list is the canonical construction" : first_difference(c.classes, expected_all));
    } catch (const InsufficientPrimesError& e) {
        out.add("matched_classes", false, e.what());
    }
}

}  // namespace

CoveringCertificate build_certificate(u64 x, u64 q, u64 b, std::optional<Rational> delta_override,
                                      const SieveConfig& config) {
    check_progression(x, q, b);
    CoveringCertificate cert;
    cert.x = x;
    cert.q = q;
    cert.b = b;
    cert.delta = delta_override ? *delta_override : prime_count_ap(x, q, b, config).delta;
    cert.u = compute_u(x, q, cert.delta);
    cert.y = (x - b) / q;

    auto forced = forced_classes(cert.u, q, b);
    const auto survivors = sieve_survivors(cert.y, forced, config);
    GreedyResult greedy = greedy_cover(survivors, q, cert.u);
    const auto matched = match_large_primes(greedy.remaining, cert.u, config);

    cert.survivors_initial = survivors.size();
    cert.survivors_after_greedy = greedy.remaining.size();
    cert.classes = std::move(forced);
    cert.classes.insert(cert.classes.end(), greedy.classes.begin(), greedy.classes.end());
    cert.classes.insert(cert.classes.end(), matched.begin(), matched.end());

    const VerificationReport report = verify_certificate(cert, false, config);
    if (!report.ok()) {
        throw Error(Errc::InvalidCertificate, "constructed certificate failed check '" + report.failures().front().check +
                                                  "': " + report.failures().front().detail);
    }
    return cert;
}

bool VerificationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<CheckResult> VerificationReport::failures() const {
    std::vector<CheckResult> out;
    std::copy_if(checks.begin(), checks.end(), std::back_inserter(out), [](const CheckResult& c) { return !c.pass; });
    return out;
}

const CheckResult* VerificationReport::find(std::string_view check) const {
    const auto it = std::find_if(checks.begin(), checks.end(), [&](const CheckResult& c) { return c.check == check; });
    return it == checks.end() ? nullptr : &*it;
}

VerificationReport verify_certificate(const CoveringCertificate& cert, bool strict, const SieveConfig& config) {
    ReportBuilder out;
    const bool can_rederive = structural_checks(cert, out, config, true);
    if (strict) {
        if (!can_rederive) {
            out.add("rederivation", false, "skipped: progression or u is malformed");
        } else {
            try {
                strict_checks(cert, out, config);
            } catch (const Error& e) {
                out.add("rederivation", false, e.what());
            }
        }
    }
    return out.take();
}

VerificationReport verify_covering(const CoveringCertificate& cert, const SieveConfig& config) {
    ReportBuilder out;
    structural_checks(cert, out, config, false);
    return out.take();
}

CrtWitness crt_witness(const CoveringCertificate& cert) {
    const VerificationReport report = verify_covering(cert);
    if (!report.ok()) {
        const auto failed = report.failures().front();
        throw Error(Errc::InvalidCertificate, "certificate fails '" + failed.check + "': " + failed.detail);
    }
    CrtWitness w = crt_combine(cert.classes);
    if (w.T.is_zero()) w.T = w.P;
    w.y = cert.y;

    // P is squarefree over the class primes, so gcd(T + n, P) > 1 iff some class prime divides T + n.
    std::vector<bool> hit(cert.y + 1, false);
    for (const auto& cls : cert.classes) {
        const u64 r = w.T.mod(cls.p);
        for (u64 n = (cls.p - r) % cls.p; n <= cert.y; n += cls.p) {
            hit[n] = true;
            if (cert.y - n < cls.p) break;
        }
    }
    for (u64 n = 0; n <= cert.y; ++n) {
        if (!hit[n]) throw Error(Errc::InvalidCertificate, "gcd(T + " + str(n) + ", P) = 1");
        if (n == cert.y) break;
    }
    return w;
}

ScenarioResult scenario_bound(double log_q, double delta, double B) {
    if (!std::isfinite(log_q) || !(log_q > 0)) throw Error(Errc::DomainError, "log_q must be positive and finite");
    if (!std::isfinite(delta) || !(delta > 0 && delta < 1)) throw Error(Errc::DomainError, "delta must lie in (0, 1)");
    if (!std::isfinite(B) || !(B > 1)) throw Error(Errc::DomainError, "B must exceed 1");
    ScenarioResult r{log_q, delta, B, 0, 0, 0};
    r.log_x = B * log_q;
    if (!(r.log_x > 0)) throw Error(Errc::DomainError, "log_x must be positive");
    r.log_u = std::log(delta) + r.log_x + std::log(r.log_x) - log_q;
    if (!(r.log_u > 0)) throw Error(Errc::DomainError, "log_u must be positive (u > 1) for the gap bound");
    r.log_gap_bound = r.log_u - std::log(delta) - std::log(r.log_u);
    if (!std::isfinite(r.log_gap_bound)) throw Error(Errc::DomainError, "non-finite gap bound");
    return r;
}

}  // namespace gapforge
