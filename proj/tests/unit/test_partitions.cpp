#include <doctest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "sideinfo/errors.hpp"
#include "sideinfo/partitions.hpp"

using sideinfo::SetPartitions;

namespace {

// Stirling numbers of the second kind summed over block counts <= k.
std::uint64_t bell_prefix(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::uint64_t>> s(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  s[0][0] = 1;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= i; ++j) s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= std::min(n, k); ++j) total += s[n][j];
  return total;
}

bool is_rgs(const std::vector<std::uint32_t>& a, std::size_t max_blocks) {
  std::uint32_t top = 0;
  if (a.empty() || a[0] != 0) return false;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i] > top + 1) return false;
    top = std::max(top, a[i]);
  }
  return top < max_blocks;
}

}  // namespace

TEST_CASE("partition counts match Stirling sums") {
  for (std::size_t n = 1; n <= 9; ++n)
    for (std::size_t k = 1; k <= n + 1; ++k) CHECK(SetPartitions(n, k).count() == bell_prefix(n, k));
  CHECK(SetPartitions(3, 2).count() == 4);
  CHECK(SetPartitions(4, 4).count() == 15);
}

TEST_CASE("next walks every string in rank order") {
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t k = 1; k <= n; ++k) {
      const SetPartitions parts(n, k);
      std::set<std::vector<std::uint32_t>> seen;
      auto rgs = parts.unrank(0);
      std::uint64_t rank = 0;
      do {
        CHECK(is_rgs(rgs, k));
        CHECK(rgs == parts.unrank(rank));
        seen.insert(rgs);
        ++rank;
      } while (parts.next(rgs));
      CHECK(rank == parts.count());
      CHECK(seen.size() == parts.count());
    }
}

TEST_CASE("ranking is lexicographic") {
  const SetPartitions parts(4, 3);
  for (std::uint64_t r = 1; r < parts.count(); ++r) CHECK(parts.unrank(r - 1) < parts.unrank(r));
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(SetPartitions(0, 1), sideinfo::ArgumentError);
  CHECK_THROWS_AS(SetPartitions(3, 0), sideinfo::ArgumentError);
  CHECK_THROWS(SetPartitions(3, 2).unrank(4));
}

TEST_CASE("count saturates instead of wrapping") {
  CHECK(SetPartitions(60, 60).count() == UINT64_MAX);
}
