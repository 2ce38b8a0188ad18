#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sideinfo {

/// Set partitions of {0..items-1} into at most `max_blocks` blocks, encoded as
/// restricted growth strings (a[0] = 0, a[i] <= 1 + max(a[0..i-1])) and ranked
/// in lexicographic order.
class SetPartitions {
 public:
  SetPartitions(std::size_t items, std::size_t max_blocks);

  /// Number of partitions, saturating at UINT64_MAX.
  std::uint64_t count() const;
  std::vector<std::uint32_t> unrank(std::uint64_t rank) const;
  /// Advances to the lexicographic successor; false after the last string.
  bool next(std::vector<std::uint32_t>& rgs) const;

  std::size_t items() const { return items_; }
  std::size_t max_blocks() const { return max_blocks_; }

 private:
  std::uint64_t completions(std::size_t pos, std::size_t used) const;

  std::size_t items_;
  std::size_t max_blocks_;
  // completions_[pos * (max_blocks_ + 1) + used]
  std::vector<std::uint64_t> completions_;
};

}  // namespace sideinfo
