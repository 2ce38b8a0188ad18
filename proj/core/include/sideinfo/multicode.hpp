#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sideinfo/codes.hpp"

namespace sideinfo {

enum class SearchMode { exhaustive, stochastic };

const char* to_string(SearchMode mode);

struct MultiCodeResult {
  std::vector<BCode> codes;
  double miss_probability;
  SearchMode search_mode;
  std::uint64_t seed;
};

/// Mass of the pairs that every code in `codes` decodes incorrectly.
double joint_miss_probability(std::span<const BCode> codes, const Dist& joint, const PairAlphabet& alphabet);

/// Jointly optimal decoders for fixed encoders of equal size M: for each x2
/// the decoders choose one representative per (code, message) so as to cover
/// the most mass. Throws ResourceError if the per-x2 branch-and-bound grows
/// past its node cap.
std::vector<BCode> optimal_joint_decoders(std::span<const std::vector<Message>> encoders, const Dist& joint,
                                          const PairAlphabet& alphabet, std::uint64_t size);

/// Number of evaluations used when none is given.
inline constexpr std::uint64_t kDefaultSearchBudget = 1'000'000;
/// Restarts of the stochastic search; each owns the stream mix_seed(seed, r).
inline constexpr std::uint64_t kStochasticRestarts = 8;

/// Minimum joint miss probability of k+1 B-codes of size M. Exhaustive when
/// the ordered tuple space partitions^(k+1) fits in `budget`, otherwise a
/// seeded local search whose result is an upper bound.
MultiCodeResult best_multi_b(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size, std::uint64_t k,
                             std::uint64_t budget, std::uint64_t seed, Parallelism par = {});

/// Smallest k <= k_max with e_B(|c|; k) <= error(c), or nullopt when it
/// exceeds k_max. Exhaustive regime only (ResourceError otherwise).
std::optional<std::uint64_t> k_index(const ACode& code, const Dist& joint, const PairAlphabet& alphabet,
                                     std::uint64_t k_max, Parallelism par = {});

}  // namespace sideinfo
