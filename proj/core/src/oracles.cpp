#include "sideinfo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "checked.hpp"
#include "sideinfo/errors.hpp"
#include "sideinfo/partitions.hpp"
#include "sideinfo/rng.hpp"

namespace sideinfo::oracle {

namespace {

// Odometer over `digits` positions in base `base`; false after wrapping.
bool advance(std::vector<std::uint32_t>& digits, std::uint64_t base) {
  for (auto& d : digits) {
    if (++d < base) return true;
    d = 0;
  }
  return false;
}

void require_joint(const Dist& joint, const PairAlphabet& alphabet) {
  if (joint.size() != alphabet.total()) throw ArgumentError("joint distribution does not match the pair alphabet");
}

double mass_outside(std::uint64_t mask, const Dist& joint) {
  double miss = 0.0;
  for (std::size_t p = 0; p < joint.size(); ++p)
    if (!((mask >> p) & 1U)) miss += joint[p];
  return miss;
}

struct BCodeTables {
  std::vector<std::uint32_t> encoder;
  std::vector<std::uint32_t> decoder;
};

// Calls fn(mask, tables) for every B-code of exactly `size` messages.
template <typename Fn>
void for_each_b_code(const PairAlphabet& alphabet, std::uint64_t size, Fn&& fn) {
  BCodeTables t{std::vector<std::uint32_t>(alphabet.x1_size, 0),
                std::vector<std::uint32_t>(size * alphabet.x2_size, 0)};
  do {
    std::fill(t.decoder.begin(), t.decoder.end(), 0U);
    do {
      std::uint64_t mask = 0;
      for (std::uint64_t x1 = 0; x1 < alphabet.x1_size; ++x1)
        for (std::uint64_t x2 = 0; x2 < alphabet.x2_size; ++x2)
          if (t.decoder[t.encoder[x1] * alphabet.x2_size + x2] == x1) mask |= std::uint64_t{1} << alphabet.index(x1, x2);
      fn(mask, t);
    } while (advance(t.decoder, alphabet.x1_size));
  } while (advance(t.encoder, size));
}

}  // namespace

double enumerate_a_codes(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size) {
  require_joint(joint, alphabet);
  if (size == 0) throw ArgumentError("enumerate_a_codes: size must be positive");
  const auto encoders = detail::capped_pow(size, alphabet.total(), kMaxACodePairs);
  const auto decoders = encoders ? detail::capped_pow(alphabet.x1_size, size * alphabet.x2_size, kMaxACodePairs)
                                 : std::nullopt;
  if (!encoders || !decoders || !detail::capped_mul(*encoders, *decoders, kMaxACodePairs))
    throw ResourceError("enumerate_a_codes: table space exceeds the 10^8 cap");

  std::vector<std::uint32_t> decoder(size * alphabet.x2_size, 0);
  std::vector<std::uint32_t> encoder(alphabet.total(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::fill(encoder.begin(), encoder.end(), 0U);
    do {
      double err = 0.0;
      for (std::uint64_t p = 0; p < alphabet.total(); ++p) {
        const std::uint64_t x1 = alphabet.x1_of(p), x2 = alphabet.x2_of(p);
        if (decoder[encoder[p] * alphabet.x2_size + x2] != x1) err += joint[p];
      }
      best = std::min(best, err);
    } while (advance(encoder, size));
  } while (advance(decoder, alphabet.x1_size));
  return std::clamp(best, 0.0, 1.0);
}

double enumerate_b_tuples(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size, std::uint64_t k) {
  require_joint(joint, alphabet);
  if (size == 0) throw ArgumentError("enumerate_b_tuples: size must be positive");
  if (alphabet.total() > 64) throw ResourceError("enumerate_b_tuples: more than 64 pairs");
  const SetPartitions partitions(alphabet.x1_size, std::min(size, alphabet.x1_size));
  if (!detail::capped_pow(partitions.count(), k + 1, kMaxBTuples))
    throw ResourceError("enumerate_b_tuples: partitions^(k+1) exceeds the 10^7 cap");
  const auto encoders = detail::capped_pow(size, alphabet.x1_size, kMaxACodePairs);
  const auto decoders = encoders ? detail::capped_pow(alphabet.x1_size, size * alphabet.x2_size, kMaxACodePairs)
                                 : std::nullopt;
  if (!encoders || !decoders || !detail::capped_mul(*encoders, *decoders, kMaxACodePairs))
    throw ResourceError("enumerate_b_tuples: code space exceeds the 10^8 cap");

  std::set<std::uint64_t> masks;
  for_each_b_code(alphabet, size, [&](std::uint64_t mask, const BCodeTables&) { masks.insert(mask); });

  // A superset correct set never increases the joint miss, so only maximal
  // correct sets need to enter tuples.
  std::vector<std::uint64_t> maximal;
  for (auto m : masks) {
    bool dominated = false;
    for (auto o : masks)
      if (o != m && (m & ~o) == 0) {
        dominated = true;
        break;
      }
    if (!dominated) maximal.push_back(m);
  }

  const std::size_t width = static_cast<std::size_t>(k + 1);
  std::vector<std::size_t> idx(width, 0);
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t visited = 0;
  while (true) {
    if (++visited > kMaxACodePairs) throw ResourceError("enumerate_b_tuples: tuple space exceeds the cap");
    std::uint64_t cover = 0;
    for (auto i : idx) cover |= maximal[i];
    best = std::min(best, mass_outside(cover, joint));
    std::size_t pos = width;
    while (pos > 0 && idx[pos - 1] + 1 >= maximal.size()) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < width; ++j) idx[j] = idx[pos - 1];
  }
  return std::clamp(best, 0.0, 1.0);
}

VariationalReport sample_variational_identity(const Dist& mu, const EventSet& event, std::uint64_t trials,
                                              std::uint64_t seed) {
  const double mass = mu.mass(event);
  if (!(mass > 0.0)) throw ArgumentError("sample_variational_identity: mu(B) must be positive");

  VariationalReport r;
  r.trials = trials;
  r.g_bound = 1.0 / mass;
  r.d_bound = -std::log2(mass);
  const Dist restricted = conditional_restriction(mu, event, mu);
  r.g_at_restriction = g_functional(restricted, mu).value();
  r.d_at_restriction = kl_divergence(restricted, mu).value();
  r.worst_g_margin = std::numeric_limits<double>::infinity();
  r.worst_d_margin = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> members;
  event.for_each([&](std::size_t i) { members.push_back(i); });
  Rng rng(seed);
  std::vector<double> p(mu.size());
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::fill(p.begin(), p.end(), 0.0);
    double total = 0.0;
    for (auto i : members) total += (p[i] = exponential01(rng));
    for (auto i : members) p[i] /= total;
    const Dist nu(p, kProbTolerance);
    const double g_margin = g_functional(nu, mu).value() - r.g_bound;
    const double d_margin = kl_divergence(nu, mu).value() - r.d_bound;
    r.worst_g_margin = std::min(r.worst_g_margin, g_margin);
    r.worst_d_margin = std::min(r.worst_d_margin, d_margin);
    if (g_margin < -kProbTolerance || d_margin < -kProbTolerance) ++r.violations;
  }
  return r;
}

const char* to_string(ProbeVerdict verdict) {
  switch (verdict) {
    case ProbeVerdict::all_hold:
      return "all_hold";
    case ProbeVerdict::counterexample_found:
      return "counterexample_found";
    case ProbeVerdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

RealizeResult realize_b_correct_set(const CorrectSet& target, std::uint64_t size_bound) {
  const PairAlphabet& a = target.alphabet;
  if (size_bound == 0) throw ArgumentError("realize_b_correct_set: size bound must be positive");
  const SetPartitions partitions(a.x1_size, std::min(size_bound, a.x1_size));
  auto rgs = partitions.unrank(0);
  RealizeResult result{std::nullopt, 0};
  do {
    ++result.partitions_tried;
    const std::uint32_t blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<Symbol> decoder(blocks * a.x2_size, 0);
    bool ok = true;
    for (std::uint64_t x2 = 0; x2 < a.x2_size && ok; ++x2) {
      for (std::uint32_t m = 0; m < blocks && ok; ++m) {
        std::uint64_t hits = 0, block_size = 0;
        std::optional<Symbol> hit, outside;
        for (std::uint64_t x1 = 0; x1 < a.x1_size; ++x1) {
          if (rgs[x1] != m) {
            if (!outside) outside = static_cast<Symbol>(x1);
            continue;
          }
          ++block_size;
          if (target.bits.test(a.index(x1, x2))) {
            ++hits;
            hit = static_cast<Symbol>(x1);
          }
        }
        // One covered symbol per (message, x2); an uncovered bin must be able
        // to decode to something outside itself.
        if (hits > 1 || (hits == 0 && !outside)) ok = false;
        else decoder[m * a.x2_size + x2] = hits == 1 ? *hit : *outside;
      }
    }
    if (ok) {
      BCode code(a, blocks, std::vector<Message>(rgs.begin(), rgs.end()), std::move(decoder));
      if (!(correct_set(code, a) == target)) throw std::logic_error("realize_b_correct_set: construction mismatch");
      result.code.emplace(std::move(code));
      return result;
    }
  } while (partitions.next(rgs));
  return result;
}

ProbeReport b_subadditivity_probe(const PairAlphabet& alphabet, std::uint64_t trials, std::uint64_t seed) {
  ProbeReport report;
  if (alphabet.x1_size == 0 || alphabet.x2_size == 0) throw ArgumentError("probe needs a nonempty alphabet");
  if (alphabet.x1_size > 4 || alphabet.x2_size > 3) return report;

  struct Entry {
    std::uint64_t size;
    BCodeTables tables;
  };
  std::map<std::uint64_t, Entry> smallest;  // correct-set mask -> smallest code realizing it
  for (std::uint64_t size = 1; size <= 2; ++size) {
    for_each_b_code(alphabet, size, [&](std::uint64_t mask, const BCodeTables& t) {
      if (!smallest.contains(mask)) smallest.emplace(mask, Entry{size, t});
    });
  }
  std::vector<std::uint64_t> masks;
  for (const auto& [m, e] : smallest) masks.push_back(m);

  auto to_code = [&](const Entry& e) {
    return BCode(alphabet, e.size, std::vector<Message>(e.tables.encoder.begin(), e.tables.encoder.end()),
                 std::vector<Symbol>(e.tables.decoder.begin(), e.tables.decoder.end()));
  };
  auto to_set = [&](std::uint64_t mask) {
    return CorrectSet{BitSet::from_mask(mask, alphabet.total()), alphabet};
  };

  std::map<std::pair<std::uint64_t, std::uint64_t>, RealizeResult> cache;
  auto check = [&](std::size_t i, std::size_t j) -> bool {
    const Entry& e1 = smallest.at(masks[i]);
    const Entry& e2 = smallest.at(masks[j]);
    const std::uint64_t target = masks[i] | masks[j];
    const std::uint64_t bound = e1.size + e2.size;
    auto key = std::make_pair(target, bound);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, realize_b_correct_set(to_set(target), bound)).first;
    ++report.instances_checked;
    if (it->second.code) return true;
    report.counterexample = ProbeCounterexample{
        to_code(e1), to_code(e2),
        ProbeWitness{to_set(target), bound, it->second.partitions_tried,
                     "no binning into at most " + std::to_string(bound) +
                         " bins reproduces the union of the two correct sets"}};
    return false;
  };

  const std::uint64_t d = masks.size();
  const std::uint64_t pairs = d * (d + 1) / 2;
  bool holds = true;
  if (pairs <= trials) {
    for (std::size_t i = 0; i < d && holds; ++i)
      for (std::size_t j = i; j < d && holds; ++j) holds = check(i, j);
  } else {
    Rng rng(seed);
    for (std::uint64_t t = 0; t < trials && holds; ++t) {
      const auto i = static_cast<std::size_t>(uniform_below(rng, d));
      const auto j = static_cast<std::size_t>(uniform_below(rng, d));
      holds = check(std::min(i, j), std::max(i, j));
    }
  }
  report.verdict = holds ? ProbeVerdict::all_hold : ProbeVerdict::counterexample_found;
  return report;
}

}  // namespace sideinfo::oracle
