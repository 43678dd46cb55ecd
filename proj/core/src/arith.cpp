#include "gapforge/arith.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <unordered_set>

namespace gapforge {

std::string_view to_string(ClassKind kind) noexcept {
    switch (kind) {
        case ClassKind::Forced: return "forced";
        case ClassKind::Greedy: return "greedy";
        case ClassKind::Matched: return "matched";
    }
    return "unknown";
}

std::optional<ClassKind> parse_class_kind(std::string_view text) noexcept {
    if (text == "forced") return ClassKind::Forced;
    if (text == "greedy") return ClassKind::Greedy;
    if (text == "matched") return ClassKind::Matched;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// BigNat

BigNat::BigNat(u64 value) {
    // mpz_class has no unsigned long long constructor on every platform.
    mpz_import(value_.get_mpz_t(), 1, -1, sizeof(value), 0, 0, &value);
}

BigNat::BigNat(mpz_class value) : value_(std::move(value)) {
    if (value_ < 0) throw Error(Errc::InvalidArgument, "BigNat must be non-negative");
}

BigNat BigNat::from_decimal(std::string_view digits) {
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(Errc::InvalidArgument, "not a decimal natural number: '" + std::string(digits) + "'");
    }
    return BigNat(mpz_class(std::string(digits), 10));
}

bool BigNat::fits_u64() const { return mpz_sizeinbase(value_.get_mpz_t(), 2) <= 64; }

u64 BigNat::to_u64() const {
    if (!fits_u64()) throw Error(Errc::Overflow, "BigNat does not fit in 64 bits");
    u64 out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, value_.get_mpz_t());
    return out;
}

u64 BigNat::mod(u64 m) const {
    if (m == 0) throw Error(Errc::ZeroModulus, "modulus must be positive");
    static_assert(sizeof(unsigned long) == sizeof(u64));
    return mpz_fdiv_ui(value_.get_mpz_t(), m);
}

std::size_t BigNat::bit_length() const { return is_zero() ? 0 : mpz_sizeinbase(value_.get_mpz_t(), 2); }

BigNat gcd(const BigNat& a, const BigNat& b) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.mpz().get_mpz_t(), b.mpz().get_mpz_t());
    return BigNat(std::move(g));
}

// ---------------------------------------------------------------------------
// Rational

namespace {
u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}
}  // namespace

Rational::Rational(u64 num, u64 den) {
    if (den == 0) throw Error(Errc::DomainError, "rational with zero denominator");
    const u64 g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Rational Rational::reduce(u128 num, u128 den) {
    if (den == 0) throw Error(Errc::DomainError, "rational with zero denominator");
    const u128 g = gcd128(num, den);
    num /= g;
    den /= g;
    constexpr u128 kMax = ~u64{0};
    if (num > kMax || den > kMax) throw Error(Errc::Overflow, "rational does not fit in 64-bit parts");
    return Rational(static_cast<u64>(num), static_cast<u64>(den));
}

std::string Rational::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

// ---------------------------------------------------------------------------
// Word-size arithmetic

u64 gcd(u64 a, u64 b) noexcept { return std::gcd(a, b); }

u64 mulmod(u64 a, u64 b, u64 m) noexcept { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) noexcept {
    u64 result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

u64 isqrt(u64 n) noexcept {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(n)));
    while (static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u64 mod_inverse(u64 a, u64 m) {
    if (m < 2) throw Error(Errc::ZeroModulus, "modulus must be at least 2");
    // Extended Euclid on signed 128-bit values.
    __int128 old_r = a % m, r = m;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        const __int128 quot = old_r / r;
        old_r -= quot * r;
        std::swap(old_r, r);
        old_s -= quot * s;
        std::swap(old_s, s);
    }
    if (old_r != 1) {
        throw Error(Errc::NotInvertible,
                    std::to_string(a) + " is not invertible modulo " + std::to_string(m));
    }
    __int128 v = old_s % static_cast<__int128>(m);
    if (v < 0) v += m;
    return static_cast<u64>(v);
}

namespace {

constexpr std::array<u64, 12> kSmallPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool miller_rabin(u64 n, u64 base) noexcept {
    base %= n;
    if (base == 0) return true;
    u64 d = n - 1;
    const int s = std::countr_zero(d);
    d >>= s;
    u64 x = powmod(base, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

bool is_prime(u64 n) noexcept {
    if (n < 2) return false;
    for (u64 p : kSmallPrimes) {
        if (n % p == 0) return n == p;
    }
    if (n < 41 * 41) return true;
    // Sinclair's base set, deterministic below 2^64.
    constexpr std::array<u64, 7> kBases{2, 325, 9375, 28178, 450775, 9780504, 1795265022};
    for (u64 base : kBases) {
        if (!miller_rabin(n, base)) return false;
    }
    return true;
}

namespace {

u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 r = 1;
        constexpr u64 kBlock = 128;
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(kBlock, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += kBlock;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_into(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    const u64 d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<u64, unsigned>> factorize(u64 n) {
    if (n == 0) throw Error(Errc::InvalidArgument, "cannot factor 0");
    std::vector<u64> primes;
    for (u64 p = 2; p < 1000 && p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            primes.push_back(p);
            n /= p;
        }
    }
    factor_into(n, primes);
    std::sort(primes.begin(), primes.end());
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 p : primes) {
        if (!out.empty() && out.back().first == p) {
            ++out.back().second;
        } else {
            out.emplace_back(p, 1);
        }
    }
    return out;
}

std::vector<u64> prime_divisors(u64 n) {
    std::vector<u64> out;
    for (const auto& [p, e] : factorize(n)) out.push_back(p);
    return out;
}

u64 totient(u64 q) {
    if (q == 0) throw Error(Errc::InvalidArgument, "totient(0) is undefined");
    u64 phi = q;
    for (const auto& [p, e] : factorize(q)) phi = phi / p * (p - 1);
    return phi;
}

BigNat primorial(u64 u) {
    if (u < 2) throw Error(Errc::InvalidArgument, "primorial requires u >= 2");
    if (u > ~0UL) throw Error(Errc::Overflow, "primorial argument too large");
    mpz_class out;
    mpz_primorial_ui(out.get_mpz_t(), static_cast<unsigned long>(u));
    return BigNat(std::move(out));
}

CrtWitness crt_combine(std::span<const ResidueClass> classes) {
    std::unordered_set<u64> seen;
    mpz_class t = 0;
    mpz_class modulus = 1;
    for (const ResidueClass& c : classes) {
        if (c.p < 2) throw Error(Errc::ZeroModulus, "class modulus must be at least 2");
        if (!seen.insert(c.p).second) {
            throw Error(Errc::DuplicateModulus, "modulus " + std::to_string(c.p) + " appears twice");
        }
        const u64 target = (c.p - c.a % c.p) % c.p;
        const u64 t_mod_p = mpz_fdiv_ui(t.get_mpz_t(), c.p);
        const u64 m_mod_p = mpz_fdiv_ui(modulus.get_mpz_t(), c.p);
        // t + modulus * k = target (mod p)
        const u64 k = mulmod((target + c.p - t_mod_p) % c.p, mod_inverse(m_mod_p, c.p), c.p);
        mpz_addmul_ui(t.get_mpz_t(), modulus.get_mpz_t(), k);
        mpz_mul_ui(modulus.get_mpz_t(), modulus.get_mpz_t(), c.p);
    }
    return CrtWitness{BigNat(std::move(t)), BigNat(std::move(modulus)), 0};
}

}  // namespace gapforge
