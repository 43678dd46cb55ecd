#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gapforge {

enum class Errc {
    NotInvertible,
    ZeroModulus,
    DuplicateModulus,
    ResourceLimit,
    BadProgression,
    EmptyRange,
    PeriodTooLarge,
    Overflow,
    InsufficientPrimes,
    InvalidCertificate,
    DomainError,
    InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised by the matching step when there are not enough primes in (u/2, u].
class InsufficientPrimesError : public Error {
public:
    InsufficientPrimesError(std::uint64_t needed, std::uint64_t available, bool sufficient_condition_holds);

    std::uint64_t needed() const noexcept { return needed_; }
    std::uint64_t available() const noexcept { return available_; }
    /// Whether |N'| <= u / (5 ln u) held for this instance.
    bool sufficient_condition_holds() const noexcept { return sufficient_condition_holds_; }

private:
    std::uint64_t needed_;
    std::uint64_t available_;
    bool sufficient_condition_holds_;
};

}  // namespace gapforge
