#include "sideinfo/codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "checked.hpp"
#include "sideinfo/errors.hpp"
#include "sideinfo/partitions.hpp"

namespace sideinfo {

namespace {

constexpr std::uint64_t kMaxMessages = std::numeric_limits<Message>::max();

void validate_tables(const PairAlphabet& alphabet, std::uint64_t size, std::size_t encoder_len,
                     std::uint64_t expected_encoder_len, std::span<const Message> encoder,
                     std::span<const Symbol> decoder, const char* kind) {
  const std::string k(kind);
  if (alphabet.x1_size == 0 || alphabet.x2_size == 0) throw ArgumentError(k + ": empty alphabet");
  if (size == 0) throw ArgumentError(k + ": size must be positive");
  if (size > kMaxMessages) throw ResourceError(k + ": size exceeds the message range");
  if (encoder_len != expected_encoder_len) throw ArgumentError(k + ": encoder table is not total");
  if (decoder.size() != size * alphabet.x2_size) throw ArgumentError(k + ": decoder table is not total");
  for (auto m : encoder)
    if (m >= size) throw ArgumentError(k + ": encoder emits a message outside {0..M-1}");
  for (auto x : decoder)
    if (x >= alphabet.x1_size) throw ArgumentError(k + ": decoder emits a symbol outside X1");
}

void require_alphabet(const PairAlphabet& code, const PairAlphabet& given) {
  if (!(code == given)) throw ArgumentError("code tables do not match the pair alphabet");
}

void require_joint(const Dist& joint, const PairAlphabet& alphabet) {
  if (joint.size() != alphabet.total()) throw ArgumentError("joint distribution does not match the pair alphabet");
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

std::uint64_t decoder_rows(const PairAlphabet& alphabet, std::uint64_t size) {
  const auto rows = detail::capped_mul(size, alphabet.x2_size, kMaxOutcomes * 4);
  if (!rows || size > kMaxMessages) throw ResourceError("decoder table for M=" + std::to_string(size) + " is too large");
  return *rows;
}

}  // namespace

ACode::ACode(PairAlphabet alphabet, std::uint64_t size, std::vector<Message> encoder, std::vector<Symbol> decoder)
    : alphabet_(alphabet), size_(size), encoder_(std::move(encoder)), decoder_(std::move(decoder)) {
  validate_tables(alphabet_, size_, encoder_.size(), alphabet_.total(), encoder_, decoder_, "ACode");
}

BCode::BCode(PairAlphabet alphabet, std::uint64_t size, std::vector<Message> encoder, std::vector<Symbol> decoder)
    : alphabet_(alphabet), size_(size), encoder_(std::move(encoder)), decoder_(std::move(decoder)) {
  validate_tables(alphabet_, size_, encoder_.size(), alphabet_.x1_size, encoder_, decoder_, "BCode");
}

double CorrectSet::mass(const Dist& joint) const {
  require_joint(joint, alphabet);
  return joint.mass(bits);
}

CorrectSet correct_set(const ACode& code, const PairAlphabet& alphabet) {
  require_alphabet(code.alphabet(), alphabet);
  CorrectSet out{BitSet(alphabet.total()), alphabet};
  for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1)
    for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2)
      if (code.reproduce(x1, x2) == x1) out.bits.set(alphabet.index(x1, x2));
  return out;
}

CorrectSet correct_set(const BCode& code, const PairAlphabet& alphabet) {
  require_alphabet(code.alphabet(), alphabet);
  CorrectSet out{BitSet(alphabet.total()), alphabet};
  for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1)
    for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2)
      if (code.reproduce(x1, x2) == x1) out.bits.set(alphabet.index(x1, x2));
  return out;
}

CodingSystemView view(const ACode& code, const PairAlphabet& alphabet) {
  return {code.size(), correct_set(code, alphabet)};
}

CodingSystemView view(const BCode& code, const PairAlphabet& alphabet) {
  return {code.size(), correct_set(code, alphabet)};
}

double error_probability(const ACode& code, const Dist& joint, const PairAlphabet& alphabet) {
  require_joint(joint, alphabet);
  return clamp_probability(joint.mass(~correct_set(code, alphabet).bits));
}

double error_probability(const BCode& code, const Dist& joint, const PairAlphabet& alphabet) {
  require_joint(joint, alphabet);
  return clamp_probability(joint.mass(~correct_set(code, alphabet).bits));
}

OptimalACode optimal_a_code(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size) {
  require_joint(joint, alphabet);
  if (size == 0) throw ArgumentError("optimal_a_code: size must be positive");
  const std::uint64_t rows = decoder_rows(alphabet, size);
  const std::uint64_t keep = std::min(size, alphabet.x1_size);

  std::vector<Message> encoder(alphabet.total(), 0);
  std::vector<Symbol> decoder(rows, 0);
  std::vector<std::uint64_t> order(alphabet.x1_size);
  double dropped = 0.0;
  for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2) {
    std::iota(order.begin(), order.end(), 0);
    auto column = [&](std::uint64_t x1) { return joint[alphabet.index(x1, x2)]; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint64_t a, std::uint64_t b) { return column(a) > column(b); });
    for (std::uint64_t m = 0; m < keep; ++m) {
      const std::uint64_t x1 = order[m];
      encoder[alphabet.index(x1, x2)] = static_cast<Message>(m);
      decoder[m * alphabet.x2_size + x2] = static_cast<Symbol>(x1);
    }
    for (std::uint64_t m = keep; m < alphabet.x1_size; ++m) dropped += column(order[m]);
  }
  return {ACode(alphabet, size, std::move(encoder), std::move(decoder)), clamp_probability(dropped)};
}

double min_a_error(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size) {
  require_joint(joint, alphabet);
  if (size == 0) throw ArgumentError("min_a_error: size must be positive");
  if (size >= alphabet.x1_size) return 0.0;
  std::vector<double> column(alphabet.x1_size);
  const auto keep = static_cast<std::ptrdiff_t>(size);
  double dropped = 0.0;
  for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2) {
    for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1) column[x1] = joint[alphabet.index(x1, x2)];
    std::nth_element(column.begin(), column.begin() + keep, column.end(), std::greater<>());
    std::sort(column.begin() + keep, column.end(), std::greater<>());
    for (auto it = column.begin() + keep; it != column.end(); ++it) dropped += *it;
  }
  return clamp_probability(dropped);
}

std::vector<double> min_a_error_profile(const Dist& joint, const PairAlphabet& alphabet) {
  require_joint(joint, alphabet);
  // errors[m-1] = sum over x2 of the column mass beyond its m largest entries.
  std::vector<double> errors(alphabet.x1_size, 0.0);
  std::vector<double> column(alphabet.x1_size);
  for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2) {
    for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1) column[x1] = joint[alphabet.index(x1, x2)];
    std::sort(column.begin(), column.end(), std::greater<>());
    double tail = 0.0;
    for (std::uint64_t m = alphabet.x1_size; m-- > 1;) {
      tail += column[m];
      errors[m - 1] += tail;
    }
  }
  for (double& e : errors) e = clamp_probability(e);
  return errors;
}

double binning_error(std::span<const Message> encoder, const Dist& joint, const PairAlphabet& alphabet,
                     std::uint64_t size) {
  require_joint(joint, alphabet);
  if (encoder.size() != alphabet.x1_size) throw ArgumentError("binning is not total over X1");
  std::vector<double> best(size * alphabet.x2_size, 0.0);
  for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1) {
    const std::uint64_t row = encoder[x1] * alphabet.x2_size;
    for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2)
      best[row + x2] = std::max(best[row + x2], joint[alphabet.index(x1, x2)]);
  }
  double kept = 0.0;
  for (double b : best) kept += b;
  return clamp_probability(1.0 - kept);
}

BCode map_decoder(std::span<const Message> encoder, const Dist& joint, const PairAlphabet& alphabet,
                  std::uint64_t size) {
  require_joint(joint, alphabet);
  if (encoder.size() != alphabet.x1_size) throw ArgumentError("map_decoder: encoder is not total over X1");
  const std::uint64_t rows = decoder_rows(alphabet, size);
  std::vector<Symbol> decoder(rows, 0);
  std::vector<double> best(rows, -1.0);
  for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1) {
    if (encoder[x1] >= size) throw ArgumentError("map_decoder: encoder emits a message outside {0..M-1}");
    const std::uint64_t row = encoder[x1] * alphabet.x2_size;
    for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2) {
      const double p = joint[alphabet.index(x1, x2)];
      if (p > best[row + x2]) {
        best[row + x2] = p;
        decoder[row + x2] = static_cast<Symbol>(x1);
      }
    }
  }
  return BCode(alphabet, size, std::vector<Message>(encoder.begin(), encoder.end()), std::move(decoder));
}

OptimalBCode optimal_b_code(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size, Parallelism par) {
  require_joint(joint, alphabet);
  if (size == 0) throw ArgumentError("optimal_b_code: size must be positive");
  const SetPartitions partitions(alphabet.x1_size, std::min(size, alphabet.x1_size));
  const std::uint64_t total = partitions.count();
  if (total > kMaxBinnings)
    throw ResourceError("optimal_b_code: " + std::to_string(total) + " binnings exceed the 10^7 cap");

  struct Best {
    double error = 2.0;
    std::vector<std::uint32_t> rgs;
  };
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 64));
  std::vector<Best> per_chunk(chunks);
  for_each_chunk(total, chunks, par, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    if (begin == end) return;
    auto rgs = partitions.unrank(begin);
    Best& best = per_chunk[chunk];
    for (std::uint64_t r = begin; r < end; ++r) {
      const double e = binning_error(rgs, joint, alphabet, partitions.max_blocks());
      if (e < best.error) {
        best.error = e;
        best.rgs = rgs;
      }
      if (r + 1 < end) partitions.next(rgs);
    }
  });
  const Best* winner = nullptr;
  for (const auto& b : per_chunk)
    if (!b.rgs.empty() && (winner == nullptr || b.error < winner->error)) winner = &b;
  BCode code = map_decoder(winner->rgs, joint, alphabet, size);
  return {std::move(code), winner->error};
}

ACode merge_a_codes(const ACode& c1, const ACode& c2, const PairAlphabet& alphabet) {
  require_alphabet(c1.alphabet(), alphabet);
  require_alphabet(c2.alphabet(), alphabet);
  const std::uint64_t size = c1.size() + c2.size();
  if (size > kMaxMessages) throw ResourceError("merged code size exceeds the message range");
  std::vector<Message> encoder(alphabet.total());
  for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1)
    for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2) {
      encoder[alphabet.index(x1, x2)] = c1.reproduce(x1, x2) == x1
                                            ? c1.encode(x1, x2)
                                            : static_cast<Message>(c2.encode(x1, x2) + c1.size());
    }
  std::vector<Symbol> decoder(c1.decoder().begin(), c1.decoder().end());
  decoder.insert(decoder.end(), c2.decoder().begin(), c2.decoder().end());
  return ACode(alphabet, size, std::move(encoder), std::move(decoder));
}

ACode b_to_a(const BCode& code) {
  const PairAlphabet& alphabet = code.alphabet();
  std::vector<Message> encoder(alphabet.total());
  for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1)
    for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2) encoder[alphabet.index(x1, x2)] = code.encode(x1);
  return ACode(alphabet, code.size(), std::move(encoder),
               std::vector<Symbol>(code.decoder().begin(), code.decoder().end()));
}

double min_size_for_error(const Dist& joint, const PairAlphabet& alphabet, double a, unsigned n) {
  if (!(a >= 0.0 && a <= 1.0)) throw ArgumentError("min_size_for_error: a must lie in [0, 1]");
  if (n == 0) throw ArgumentError("min_size_for_error: blocklength must be positive");
  const auto profile = min_a_error_profile(joint, alphabet);
  std::uint64_t m_star = alphabet.x1_size;
  for (std::uint64_t m = 1; m <= alphabet.x1_size; ++m) {
    if (profile[m - 1] <= 1.0 - a + kProbTolerance) {
      m_star = m;
      break;
    }
  }
  return std::log2(static_cast<double>(m_star)) / static_cast<double>(n);
}

CorrectSet lossy_correct_set(const ACode& code, std::span<const double> distortion, double max_distortion,
                             const PairAlphabet& alphabet) {
  require_alphabet(code.alphabet(), alphabet);
  if (distortion.size() != alphabet.x1_size * alphabet.x1_size)
    throw ArgumentError("lossy_correct_set: distortion table must be x1_size x x1_size");
  if (!(max_distortion >= 0.0)) throw ArgumentError("lossy_correct_set: distortion level must be nonnegative");
  for (double d : distortion)
    if (!(d >= 0.0)) throw ArgumentError("lossy_correct_set: distortion values must be nonnegative");
  CorrectSet out{BitSet(alphabet.total()), alphabet};
  for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1)
    for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2) {
      const Symbol y = code.reproduce(x1, x2);
      if (distortion[x1 * alphabet.x1_size + y] <= max_distortion) out.bits.set(alphabet.index(x1, x2));
    }
  return out;
}

}  // namespace sideinfo
