#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gapforge/arith.hpp"
#include "gapforge/residue_class.hpp"
#include "gapforge/sieve.hpp"

namespace gapforge {

/// A covering of [0, y] by residue classes to distinct primes <= u, built from a
/// progression b mod q that has few primes up to x. It certifies J(u) >= y + 2.
struct CoveringCertificate {
    u64 x = 0;
    u64 q = 0;
    u64 b = 0;
    Rational delta;
    u64 u = 0;
    u64 y = 0;
    std::vector<ResidueClass> classes;
    u64 survivors_initial = 0;
    u64 survivors_after_greedy = 0;

    /// (x - b) / q, the bound in the form J(u) >= (x - b) / q.
    Rational gap_lower_rational() const { return Rational(x - b, q); }

    friend bool operator==(const CoveringCertificate&, const CoveringCertificate&) = default;
};

struct ScenarioResult {
    double log_q = 0;
    double delta = 0;
    double B = 0;
    double log_x = 0;
    double log_u = 0;
    double log_gap_bound = 0;
};

struct CheckResult {
    std::string check;
    bool pass = false;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool ok() const;
    std::vector<CheckResult> failures() const;
    const CheckResult* find(std::string_view check) const;
};

/// Least u >= 3 with u^2 > 4x and u / ln u >= 10 * delta * x / q.
u64 compute_u(u64 x, u64 q, const Rational& delta);

/// For each prime p <= u/2 not dividing q, the class a with q*a + b = 0 (mod p).
std::vector<ResidueClass> forced_classes(u64 u, u64 q, u64 b);

/// Ascending n in [0, y] that avoid every given class.
std::vector<u64> sieve_survivors(u64 y, std::span<const ResidueClass> forced, const SieveConfig& config = {});

struct GreedyResult {
    std::vector<ResidueClass> classes;
    std::vector<u64> remaining;
};

/// For each prime p | q with p <= u/2 (ascending), picks the residue hitting the most
/// remaining survivors (ties and the empty case go to the smallest residue).
GreedyResult greedy_cover(std::span<const u64> survivors, u64 q, u64 u);

/// Whether |N'| <= u / (5 ln u), the large-u sufficient condition for matching.
bool matching_condition_holds(u64 remaining, u64 u);

/// Pairs the i-th remaining survivor with the i-th prime in (u/2, u].
/// Throws InsufficientPrimesError when there are more survivors than primes.
std::vector<ResidueClass> match_large_primes(std::span<const u64> remaining, u64 u,
                                             const SieveConfig& config = {});

/// Runs the whole construction for the progression b mod q up to x. Delta is measured
/// exactly unless an override is given.
CoveringCertificate build_certificate(u64 x, u64 q, u64 b, std::optional<Rational> delta_override = std::nullopt,
                                      const SieveConfig& config = {});

/// Structural checks always; `strict` also re-derives every class, delta and u.
VerificationReport verify_certificate(const CoveringCertificate& cert, bool strict, const SieveConfig& config = {});

/// Only the covering-system checks: moduli are distinct primes <= u, residues are
/// reduced, and the classes cover [0, y]. Pipeline bookkeeping is not examined.
VerificationReport verify_covering(const CoveringCertificate& cert, const SieveConfig& config = {});

/// CRT integer T with T + n sharing a factor with P for every n in [0, y]. T is never 0.
CrtWitness crt_witness(const CoveringCertificate& cert);

/// Log-space evaluation of the exceptional-zero scenario: x = q^B, u = delta x log x / q,
/// gap bound u / (delta log u).
ScenarioResult scenario_bound(double log_q, double delta, double B);

// ---------------------------------------------------------------------------
// Serialization

/// Certificate file contents. `witness` is present when written with one.
struct CertificateDocument {
    CoveringCertificate certificate;
    std::optional<CrtWitness> witness;
    u64 bound_jacobsthal_u = 0;
    Rational bound_gap_lower;
};

std::string certificate_to_json(const CoveringCertificate& cert, const std::optional<CrtWitness>& witness = std::nullopt);
/// Throws Error(InvalidArgument) on malformed input.
CertificateDocument certificate_from_json(std::string_view text);

std::string report_to_json(const VerificationReport& report);

}  // namespace gapforge
