#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sideinfo/alphabet.hpp"
#include "sideinfo/bitset.hpp"

namespace sideinfo {

/// Absolute tolerance on the total mass of a Dist.
inline constexpr double kSumTolerance = 1e-12;
/// Default absolute tolerance for comparing probabilities.
inline constexpr double kProbTolerance = 1e-9;
/// Largest number of outcomes any dense Dist may hold (2^24).
inline constexpr std::uint64_t kMaxOutcomes = std::uint64_t{1} << 24;

/// Subset of an indexed alphabet.
using EventSet = BitSet;

/// A nonnegative real or +infinity. Never NaN.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  explicit ExtReal(double v);

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
  bool is_finite() const { return !is_infinite(); }
  /// The finite value, or +inf as a double.
  double value() const { return value_; }

  friend auto operator<=>(const ExtReal&, const ExtReal&) = default;

 private:
  double value_ = 0.0;
};

/// Probability mass table over outcomes {0, ..., size-1}.
class Dist {
 public:
  /// Validates nonnegativity and unit mass within `tolerance`.
  explicit Dist(std::vector<double> probs, double tolerance = kSumTolerance);

  static Dist uniform(std::size_t size);
  static Dist point_mass(std::size_t size, std::size_t outcome);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  double mass(const EventSet& event) const;

  /// Entrywise comparison within an absolute tolerance.
  bool approx_equal(const Dist& other, double tolerance = kProbTolerance) const;

  friend bool operator==(const Dist&, const Dist&) = default;

 private:
  std::vector<double> probs_;
};

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

/// Appends one zero-mass outcome to the alphabet (the "extra" sample point that
/// lets an empty event be replaced by a null one of equal mass).
Dist with_padding_outcome(const Dist& d);

/// D(nu || mu) in bits; +inf when nu is not absolutely continuous w.r.t. mu.
ExtReal kl_divergence(const Dist& nu, const Dist& mu);

/// G(nu || mu) = sum nu(x)^2 / mu(x); +inf when nu is not absolutely continuous.
ExtReal g_functional(const Dist& nu, const Dist& mu);

/// mu( . | B), or `fallback` when mu(B) == 0.
Dist conditional_restriction(const Dist& mu, const EventSet& event, const Dist& fallback);

struct TiltLevel {
  Dist measure;
  EventSet event;
  double mass;
};

struct TiltTrace {
  std::vector<TiltLevel> levels;
  Dist terminal;
  /// D(terminal || mu). Accumulated as -sum log2(mass) while no fallback fired;
  /// after a fallback it is kl_divergence(u, mu).
  ExtReal divergence_bits;
  /// First level whose step replaced the measure by u, if any.
  std::optional<std::size_t> fallback_level;
};

/// Iterated conditional restriction through `events`, falling back to `u`
/// whenever the current measure gives the event zero mass or already equals u.
TiltTrace recursive_tilt(const Dist& mu, const Dist& u, std::span<const EventSet> events);

/// n-fold product over the symbol alphabet of `p`, lexicographic with the first
/// position most significant.
Dist iid_extension(const Dist& p, unsigned n);

/// alpha * p1^n + (1 - alpha) * p2^n in the same layout as iid_extension.
Dist mixture_extension(double alpha, const Dist& p1, const Dist& p2, unsigned n);

/// Reorders a sequence-of-pairs distribution (iid_extension layout over a pair
/// alphabet `letter`) into block-pair layout over letter.block(n):
/// index = x1_block * x2_size^n + x2_block.
Dist regroup_pair_blocks(const Dist& sequence_dist, const PairAlphabet& letter, unsigned n);

/// H(X1 | X2) in bits for a joint indexed x1-major.
double conditional_entropy(const Dist& q, std::uint64_t x1_size, std::uint64_t x2_size);

}  // namespace sideinfo
