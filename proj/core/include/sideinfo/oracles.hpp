#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sideinfo/codes.hpp"
#include "sideinfo/measures.hpp"

namespace sideinfo {

/// Brute-force certifiers. Nothing here shares code paths with the optimized
/// constructions they check.
namespace oracle {

inline constexpr std::uint64_t kMaxACodePairs = 100'000'000;
inline constexpr std::uint64_t kMaxBTuples = 10'000'000;

/// min error over every (encoder, decoder) table pair of an A-code of size M.
/// Cap: M^{|X1||X2|} * |X1|^{M |X2|} <= 10^8.
double enumerate_a_codes(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size);

/// e_B(M; k) by listing every B-code (all encoder functions and all decoder
/// tables) and every (k+1)-multiset of their correct sets.
/// Cap: partitions^{k+1} <= 10^7; also at most 64 pairs.
double enumerate_b_tuples(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size, std::uint64_t k);

struct VariationalReport {
  std::uint64_t trials = 0;
  /// 1 / mu(B) and -log2 mu(B).
  double g_bound = 0.0;
  double d_bound = 0.0;
  /// G and D of the conditional restriction mu(.|B).
  double g_at_restriction = 0.0;
  double d_at_restriction = 0.0;
  /// Smallest observed G(nu||mu) - g_bound and D(nu||mu) - d_bound over samples.
  double worst_g_margin = 0.0;
  double worst_d_margin = 0.0;
  /// Samples that beat a bound by more than 1e-9.
  std::uint64_t violations = 0;
};

/// Samples nu supported on B (normalized unit exponentials) and checks
/// G(nu||mu) >= 1/mu(B) and D(nu||mu) >= -log2 mu(B).
VariationalReport sample_variational_identity(const Dist& mu, const EventSet& event, std::uint64_t trials,
                                              std::uint64_t seed);

enum class ProbeVerdict { all_hold, counterexample_found, inconclusive };

const char* to_string(ProbeVerdict verdict);

struct ProbeWitness {
  /// T(c1) u T(c2), the target correct set no B-code reproduced.
  CorrectSet target;
  std::uint64_t size_bound;
  std::uint64_t partitions_tried;
  std::string explanation;
};

struct ProbeCounterexample {
  BCode c1;
  BCode c2;
  ProbeWitness witness;
};

struct ProbeReport {
  std::uint64_t instances_checked = 0;
  std::optional<ProbeCounterexample> counterexample;
  ProbeVerdict verdict = ProbeVerdict::inconclusive;
};

/// For pairs (c1, c2) of B-codes of sizes <= 2, searches every B-code c with
/// |c| <= |c1| + |c2| for T(c) = T(c1) u T(c2). All pairs of distinct correct
/// sets are checked when there are at most `trials` of them; otherwise
/// `trials` pairs are drawn with the seed. Requires |X1| <= 4 and |X2| <= 3
/// (otherwise the report is inconclusive).
ProbeReport b_subadditivity_probe(const PairAlphabet& alphabet, std::uint64_t trials, std::uint64_t seed);

/// Whether some B-code of size <= size_bound has correct set exactly `target`.
/// Returns the number of binnings examined and, on success, one such code.
struct RealizeResult {
  std::optional<BCode> code;
  std::uint64_t partitions_tried;
};
RealizeResult realize_b_correct_set(const CorrectSet& target, std::uint64_t size_bound);

}  // namespace oracle
}  // namespace sideinfo
