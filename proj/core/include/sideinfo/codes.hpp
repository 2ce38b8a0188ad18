#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sideinfo/alphabet.hpp"
#include "sideinfo/bitset.hpp"
#include "sideinfo/measures.hpp"
#include "sideinfo/parallel.hpp"

namespace sideinfo {

using Message = std::uint32_t;
using Symbol = std::uint32_t;

/// Largest number of set partitions optimal_b_code will enumerate.
inline constexpr std::uint64_t kMaxBinnings = 10'000'000;

/// Fixed-length code whose encoder sees (x1, x2). Messages are 0-based.
class ACode {
 public:
  /// encoder: pair index -> message; decoder: message * x2_size + x2 -> x1.
  ACode(PairAlphabet alphabet, std::uint64_t size, std::vector<Message> encoder, std::vector<Symbol> decoder);

  const PairAlphabet& alphabet() const { return alphabet_; }
  std::uint64_t size() const { return size_; }
  Message encode(std::uint64_t x1, std::uint64_t x2) const { return encoder_[alphabet_.index(x1, x2)]; }
  Symbol decode(Message m, std::uint64_t x2) const { return decoder_[m * alphabet_.x2_size + x2]; }
  /// c(x1, x2) = decoder(encoder(x1, x2), x2).
  Symbol reproduce(std::uint64_t x1, std::uint64_t x2) const { return decode(encode(x1, x2), x2); }

  std::span<const Message> encoder() const { return encoder_; }
  std::span<const Symbol> decoder() const { return decoder_; }

 private:
  PairAlphabet alphabet_;
  std::uint64_t size_;
  std::vector<Message> encoder_;
  std::vector<Symbol> decoder_;
};

/// Fixed-length code whose encoder sees x1 only.
class BCode {
 public:
  /// encoder: x1 -> message; decoder: message * x2_size + x2 -> x1.
  BCode(PairAlphabet alphabet, std::uint64_t size, std::vector<Message> encoder, std::vector<Symbol> decoder);

  const PairAlphabet& alphabet() const { return alphabet_; }
  std::uint64_t size() const { return size_; }
  Message encode(std::uint64_t x1) const { return encoder_[x1]; }
  Symbol decode(Message m, std::uint64_t x2) const { return decoder_[m * alphabet_.x2_size + x2]; }
  Symbol reproduce(std::uint64_t x1, std::uint64_t x2) const { return decode(encode(x1), x2); }

  std::span<const Message> encoder() const { return encoder_; }
  std::span<const Symbol> decoder() const { return decoder_; }

 private:
  PairAlphabet alphabet_;
  std::uint64_t size_;
  std::vector<Message> encoder_;
  std::vector<Symbol> decoder_;
};

/// Set of pairs a code reproduces (exactly, or within a distortion level).
struct CorrectSet {
  BitSet bits;
  PairAlphabet alphabet;

  double mass(const Dist& joint) const;
  friend bool operator==(const CorrectSet&, const CorrectSet&) = default;
};

/// The abstract (size, correct set) view used for subadditivity checks.
struct CodingSystemView {
  std::uint64_t size;
  CorrectSet correct;
};

CorrectSet correct_set(const ACode& code, const PairAlphabet& alphabet);
CorrectSet correct_set(const BCode& code, const PairAlphabet& alphabet);

CodingSystemView view(const ACode& code, const PairAlphabet& alphabet);
CodingSystemView view(const BCode& code, const PairAlphabet& alphabet);

/// 1 - joint(T(c)).
double error_probability(const ACode& code, const Dist& joint, const PairAlphabet& alphabet);
double error_probability(const BCode& code, const Dist& joint, const PairAlphabet& alphabet);

struct OptimalACode {
  ACode code;
  double error;
};

/// Per x2 keeps the M most probable x1 (ties to the smaller x1).
OptimalACode optimal_a_code(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size);

/// e_A(M) without materializing the code tables.
double min_a_error(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size);

/// e_A(M) for M = 1..x1_size; entry M-1 holds e_A(M).
std::vector<double> min_a_error_profile(const Dist& joint, const PairAlphabet& alphabet);

struct OptimalBCode {
  BCode code;
  double error;
};

/// Exhaustive search over binnings of X1 into at most M bins with MAP decoding.
/// Ties go to the lexicographically smallest restricted growth string.
OptimalBCode optimal_b_code(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size,
                            Parallelism par = {});

/// Error of the MAP decoder for a fixed binning, without building the code.
double binning_error(std::span<const Message> encoder, const Dist& joint, const PairAlphabet& alphabet,
                     std::uint64_t size);

/// MAP decoder for a fixed binning; empty bins decode to x1 = 0.
BCode map_decoder(std::span<const Message> encoder, const Dist& joint, const PairAlphabet& alphabet,
                  std::uint64_t size);

/// Code of size |c1| + |c2| whose correct set is T(c1) u T(c2).
ACode merge_a_codes(const ACode& c1, const ACode& c2, const PairAlphabet& alphabet);

/// Embeds a B-code as an A-code whose encoder ignores x2.
ACode b_to_a(const BCode& code);

/// (1/n) log2 M* with M* the smallest M such that e_A(M) <= 1 - a.
double min_size_for_error(const Dist& joint, const PairAlphabet& alphabet, double a, unsigned n = 1);

/// Pairs whose reproduction lies within distortion D. `distortion` is the
/// x1_size x x1_size table d(x, x') in row-major order.
CorrectSet lossy_correct_set(const ACode& code, std::span<const double> distortion, double max_distortion,
                             const PairAlphabet& alphabet);

}  // namespace sideinfo
