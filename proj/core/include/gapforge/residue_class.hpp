#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace gapforge {

enum class ClassKind { Forced, Greedy, Matched };

std::string_view to_string(ClassKind kind) noexcept;
std::optional<ClassKind> parse_class_kind(std::string_view text) noexcept;

/// The residue class a mod p, with p prime and a in [0, p).
struct ResidueClass {
    std::uint64_t p = 0;
    std::uint64_t a = 0;
    ClassKind kind = ClassKind::Forced;

    bool covers(std::uint64_t n) const noexcept { return n % p == a; }

    friend bool operator==(const ResidueClass&, const ResidueClass&) = default;
};

}  // namespace gapforge
