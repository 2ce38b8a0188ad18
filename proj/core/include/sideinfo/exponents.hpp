#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sideinfo/alphabet.hpp"
#include "sideinfo/measures.hpp"
#include "sideinfo/parallel.hpp"

namespace sideinfo {

/// A stationary memoryless source or a two-component mixture of them, given
/// by single-letter joints over a pair alphabet (x1-major).
class SingleLetterModel {
 public:
  enum class Kind { iid, mixture };

  static SingleLetterModel iid(Dist p, PairAlphabet alphabet);
  static SingleLetterModel mixture(double alpha, Dist p1, Dist p2, PairAlphabet alphabet);

  Kind kind() const { return kind_; }
  const PairAlphabet& alphabet() const { return alphabet_; }
  /// The single-letter joint of an iid model (first component of a mixture).
  const Dist& p() const { return p1_; }
  const Dist& p1() const { return p1_; }
  const Dist& p2() const { return p2_; }
  /// Weight of p1; 1 for iid models.
  double alpha() const { return alpha_; }

 private:
  SingleLetterModel(Kind kind, double alpha, Dist p1, Dist p2, PairAlphabet alphabet);

  Kind kind_;
  double alpha_;
  Dist p1_;
  Dist p2_;
  PairAlphabet alphabet_;
};

/// Doubly symmetric binary source: X1 uniform, X2 = X1 flipped w.p. crossover.
Dist dsbs(double crossover);

/// Block joint at blocklength n in block-pair layout over alphabet().block(n).
Dist block_joint(const SingleLetterModel& model, unsigned n);

/// Smallest M >= 2^{nR}, with nR within 1e-9 of an integer treated as exact.
std::uint64_t message_count(unsigned n, double rate);

/// Minimizer record of a constrained divergence minimization.
struct ConstrainedMinimum {
  /// D(Q*||P) in bits; +inf when no Q << P satisfies the constraint.
  double value;
  /// Q* over the pair alphabet (empty when infeasible).
  std::vector<double> minimizer;
};

/// min { D(Q||P) : H_Q(X1|X2) >= R } by grid search plus coordinate descent.
ConstrainedMinimum minimize_high_rate(const SingleLetterModel& model, double rate, double grid_step);
/// min { D(Q||P) : H_Q(X1|X2) <= R } by the same method.
ConstrainedMinimum minimize_low_rate(const SingleLetterModel& model, double rate, double grid_step);

/// Reliability function of the error probability (high-rate case), bits.
double rho_high_rate(const SingleLetterModel& model, double rate, double grid_step);
/// Exponent of the correct-decoding probability (low-rate case), bits.
double rho_low_rate(const SingleLetterModel& model, double rate, double grid_step);

struct ExponentCurve {
  enum class Kind { high_rate, low_rate };
  Kind kind;
  std::vector<std::pair<double, double>> points;
};

/// Samples rho at strictly increasing rates; points are in input order.
ExponentCurve exponent_curve(const SingleLetterModel& model, ExponentCurve::Kind kind, std::span<const double> rates,
                             double grid_step, Parallelism par = {});

/// Indices i such that the step from point i-1 to i exceeds `threshold` bits.
std::vector<std::size_t> detect_jumps(const ExponentCurve& curve, double threshold);

/// Limiting error probability of the optimal A-code for a two-component mixture:
/// one minus the weight of the components whose H(X1|X2) is below R.
double predicted_eps_mixed(const SingleLetterModel& model, double rate);

struct SweepPoint {
  unsigned n;
  std::uint64_t size;
  double e_a;
  /// -(1/n) log2 e_A; +inf when e_A = 0.
  ExtReal exponent;
};

/// e_A(ceil(2^{nR})) on the materialized block joint for each n.
std::vector<SweepPoint> empirical_exponent_sweep(const SingleLetterModel& model, double rate,
                                                 std::span<const unsigned> n_values, Parallelism par = {});

}  // namespace sideinfo
