#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "gapforge/error.hpp"
#include "gapforge/residue_class.hpp"

namespace gapforge {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Arbitrary-precision natural number. Holds primorials and CRT witnesses.
class BigNat {
public:
    BigNat() = default;
    BigNat(u64 value);  // NOLINT(google-explicit-constructor)
    explicit BigNat(mpz_class value);

    /// Parses a non-empty string of decimal digits.
    static BigNat from_decimal(std::string_view digits);
    std::string to_decimal() const { return value_.get_str(10); }

    bool is_zero() const { return value_ == 0; }
    bool fits_u64() const;
    u64 to_u64() const;
    /// Remainder modulo a machine-word modulus.
    u64 mod(u64 m) const;
    std::size_t bit_length() const;

    const mpz_class& mpz() const noexcept { return value_; }

    friend BigNat operator+(const BigNat& a, const BigNat& b) { return BigNat(mpz_class(a.value_ + b.value_)); }
    friend BigNat operator*(const BigNat& a, const BigNat& b) { return BigNat(mpz_class(a.value_ * b.value_)); }
    friend bool operator==(const BigNat& a, const BigNat& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const BigNat& a, const BigNat& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

private:
    mpz_class value_;
};

BigNat gcd(const BigNat& a, const BigNat& b);

/// Exact non-negative rational with 64-bit parts, always in lowest terms.
class Rational {
public:
    Rational() = default;
    Rational(u64 num, u64 den);
    /// Reduces num/den given as 128-bit values; throws Overflow if the reduced form does not fit.
    static Rational reduce(u128 num, u128 den);

    u64 num() const noexcept { return num_; }
    u64 den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    long double to_long_double() const noexcept {
        return static_cast<long double>(num_) / static_cast<long double>(den_);
    }
    std::string to_string() const;

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        return static_cast<u128>(a.num_) * b.den_ <=> static_cast<u128>(b.num_) * a.den_;
    }

private:
    u64 num_ = 0;
    u64 den_ = 1;
};

/// Result of a Chinese-remainder combination: T in [0, P) and the covered length y.
struct CrtWitness {
    BigNat T;
    BigNat P;
    u64 y = 0;
};

u64 gcd(u64 a, u64 b) noexcept;
u64 mulmod(u64 a, u64 b, u64 m) noexcept;
u64 powmod(u64 base, u64 exp, u64 m) noexcept;
/// floor(sqrt(n)), exact for every 64-bit input.
u64 isqrt(u64 n) noexcept;

u64 mod_inverse(u64 a, u64 m);

/// Deterministic for all 64-bit n: trial division, then Miller-Rabin on a fixed 7-base set.
bool is_prime(u64 n) noexcept;

/// Prime factorization as (prime, exponent) pairs in ascending prime order.
std::vector<std::pair<u64, unsigned>> factorize(u64 n);
/// Distinct prime divisors of n, ascending.
std::vector<u64> prime_divisors(u64 n);

u64 totient(u64 q);

/// Product of all primes <= u.
BigNat primorial(u64 u);

/// Builds T with T = -a (mod p) for every class. Moduli must be distinct primes.
CrtWitness crt_combine(std::span<const ResidueClass> classes);

}  // namespace gapforge
