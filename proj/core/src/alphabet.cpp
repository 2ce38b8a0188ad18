#include "sideinfo/alphabet.hpp"

#include <string>

#include "checked.hpp"
#include "sideinfo/errors.hpp"
#include "sideinfo/measures.hpp"

namespace sideinfo {

PairAlphabet PairAlphabet::block(unsigned n) const {
  if (n == 0) throw ArgumentError("blocklength must be positive");
  const auto total_n = detail::capped_pow(total(), n, kMaxOutcomes);
  if (!total_n)
    throw ResourceError("block alphabet at n=" + std::to_string(n) + " exceeds 2^24 outcomes");
  return {*detail::capped_pow(x1_size, n, kMaxOutcomes), *detail::capped_pow(x2_size, n, kMaxOutcomes)};
}

}  // namespace sideinfo
