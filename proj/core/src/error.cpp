#include "gapforge/error.hpp"

namespace gapforge {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NotInvertible: return "NotInvertible";
        case Errc::ZeroModulus: return "ZeroModulus";
        case Errc::DuplicateModulus: return "DuplicateModulus";
        case Errc::ResourceLimit: return "ResourceLimit";
        case Errc::BadProgression: return "BadProgression";
        case Errc::EmptyRange: return "EmptyRange";
        case Errc::PeriodTooLarge: return "PeriodTooLarge";
        case Errc::Overflow: return "Overflow";
        case Errc::InsufficientPrimes: return "InsufficientPrimes";
        case Errc::InvalidCertificate: return "InvalidCertificate";
        case Errc::DomainError: return "DomainError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

InsufficientPrimesError::InsufficientPrimesError(std::uint64_t needed, std::uint64_t available,
                                                 bool sufficient_condition_holds)
    : Error(Errc::InsufficientPrimes,
            "insufficient primes in (u/2, u]: need " + std::to_string(needed) + ", have " +
                std::to_string(available) + " (|N'| <= u/(5 ln u) " +
                (sufficient_condition_holds ? "holds" : "fails") + ")"),
      needed_(needed),
      available_(available),
      sufficient_condition_holds_(sufficient_condition_holds) {}

}  // namespace gapforge
