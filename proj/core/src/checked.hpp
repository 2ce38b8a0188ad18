#pragma once

#include <cstdint>
#include <optional>

namespace sideinfo::detail {

// base^exp, or nullopt once the result would exceed `cap`.
inline std::optional<std::uint64_t> capped_pow(std::uint64_t base, std::uint64_t exp,
                                               std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return std::nullopt;
    r *= base;
  }
  if (r > cap) return std::nullopt;
  return r;
}

// a * b, or nullopt once the product would exceed `cap`.
inline std::optional<std::uint64_t> capped_mul(std::uint64_t a, std::uint64_t b,
                                               std::uint64_t cap) {
  if (a != 0 && b > cap / a) return std::nullopt;
  return a * b;
}

}  // namespace sideinfo::detail
