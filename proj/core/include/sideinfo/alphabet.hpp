#pragma once

#include <cstdint>

namespace sideinfo {

/// X1 x X2 at a fixed blocklength. Pair index = x1 * x2_size + x2.
struct PairAlphabet {
  std::uint64_t x1_size = 1;
  std::uint64_t x2_size = 1;

  std::uint64_t total() const { return x1_size * x2_size; }
  std::uint64_t index(std::uint64_t x1, std::uint64_t x2) const { return x1 * x2_size + x2; }
  std::uint64_t x1_of(std::uint64_t pair) const { return pair / x2_size; }
  std::uint64_t x2_of(std::uint64_t pair) const { return pair % x2_size; }

  /// Block alphabet X1^n x X2^n. Throws ResourceError past the dense cap.
  PairAlphabet block(unsigned n) const;

  friend bool operator==(const PairAlphabet&, const PairAlphabet&) = default;
};

}  // namespace sideinfo
