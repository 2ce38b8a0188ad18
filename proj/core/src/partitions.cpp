#include "sideinfo/partitions.hpp"

#include <algorithm>
#include <limits>

#include "sideinfo/errors.hpp"

namespace sideinfo {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

}  // namespace

SetPartitions::SetPartitions(std::size_t items, std::size_t max_blocks)
    : items_(items), max_blocks_(max_blocks) {
  if (items == 0) throw ArgumentError("set partitions need at least one item");
  if (max_blocks == 0) throw ArgumentError("set partitions need at least one block");
  const std::size_t width = max_blocks_ + 1;
  completions_.assign((items_ + 1) * width, 0);
  for (std::size_t used = 0; used <= max_blocks_; ++used) completions_[items_ * width + used] = 1;
  for (std::size_t pos = items_; pos-- > 0;) {
    for (std::size_t used = 0; used <= max_blocks_; ++used) {
      std::uint64_t c = sat_mul(used, completions_[(pos + 1) * width + used]);
      if (used < max_blocks_) c = sat_add(c, completions_[(pos + 1) * width + used + 1]);
      completions_[pos * width + used] = c;
    }
  }
}

std::uint64_t SetPartitions::completions(std::size_t pos, std::size_t used) const {
  return completions_[pos * (max_blocks_ + 1) + used];
}

std::uint64_t SetPartitions::count() const { return completions(1, 1); }

std::vector<std::uint32_t> SetPartitions::unrank(std::uint64_t rank) const {
  if (rank >= count()) throw ArgumentError("partition rank out of range");
  std::vector<std::uint32_t> rgs(items_, 0);
  std::size_t used = 1;
  for (std::size_t pos = 1; pos < items_; ++pos) {
    const std::size_t top = std::min(used, max_blocks_ - 1);
    for (std::size_t v = 0; v <= top; ++v) {
      const std::uint64_t c = completions(pos + 1, std::max(used, v + 1));
      if (rank < c) {
        rgs[pos] = static_cast<std::uint32_t>(v);
        used = std::max(used, v + 1);
        break;
      }
      rank -= c;
    }
  }
  return rgs;
}

bool SetPartitions::next(std::vector<std::uint32_t>& rgs) const {
  std::vector<std::uint32_t> prefix_max(items_, 0);
  for (std::size_t i = 1; i < items_; ++i) prefix_max[i] = std::max(prefix_max[i - 1], rgs[i - 1]);
  for (std::size_t i = items_; i-- > 1;) {
    if (rgs[i] <= prefix_max[i] && rgs[i] + 1 < max_blocks_) {
      ++rgs[i];
      std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0U);
      return true;
    }
  }
  return false;
}

}  // namespace sideinfo
