#include "sideinfo/multicode.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "checked.hpp"
#include "sideinfo/errors.hpp"
#include "sideinfo/partitions.hpp"
#include "sideinfo/rng.hpp"

namespace sideinfo {

namespace {

constexpr std::uint64_t kMaxCoverNodes = 2'000'000;

// Per-x2 maximum coverage: each (code, message) bin picks one representative.
class CoverSolver {
 public:
  CoverSolver(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size)
      : joint_(joint), alphabet_(alphabet), size_(size), weight_(alphabet.x1_size), covered_(alphabet.x1_size, 0) {}

  // Total covered mass; fills decoders (one table per code) when requested.
  double solve(std::span<const std::vector<Message>> encoders, std::vector<std::vector<Symbol>>* decoders) {
    build_items(encoders);
    if (decoders) decoders->assign(encoders.size(), std::vector<Symbol>(size_ * alphabet_.x2_size, 0));
    double total = 0.0;
    for (std::uint64_t x2 = 0; x2 < alphabet_.x2_size; ++x2) {
      for (std::uint64_t x1 = 0; x1 < alphabet_.x1_size; ++x1) weight_[x1] = joint_[alphabet_.index(x1, x2)];
      best_ = -1.0;
      nodes_ = 0;
      choice_.assign(items_.size(), 0);
      best_choice_.assign(items_.size(), 0);
      search(0, 0.0);
      total += best_;
      if (decoders) {
        for (std::size_t t = 0; t < items_.size(); ++t)
          (*decoders)[items_[t].code][items_[t].message * alphabet_.x2_size + x2] = best_choice_[t];
      }
    }
    return total;
  }

 private:
  struct Item {
    std::size_t code;
    std::uint64_t message;
    std::vector<Symbol> members;
  };

  void build_items(std::span<const std::vector<Message>> encoders) {
    items_.clear();
    for (std::size_t i = 0; i < encoders.size(); ++i) {
      std::vector<std::vector<Symbol>> bins(size_);
      for (std::uint64_t x1 = 0; x1 < alphabet_.x1_size; ++x1) bins[encoders[i][x1]].push_back(static_cast<Symbol>(x1));
      for (std::uint64_t m = 0; m < size_; ++m)
        if (!bins[m].empty()) items_.push_back({i, m, std::move(bins[m])});
    }
    // suffix_[t][x]: x belongs to some item at position >= t
    suffix_.assign(items_.size() + 1, std::vector<char>(alphabet_.x1_size, 0));
    for (std::size_t t = items_.size(); t-- > 0;) {
      suffix_[t] = suffix_[t + 1];
      for (auto x : items_[t].members) suffix_[t][x] = 1;
    }
  }

  void search(std::size_t t, double current) {
    if (++nodes_ > kMaxCoverNodes) throw ResourceError("joint decoder search exceeded its node cap");
    if (t == items_.size()) {
      if (current > best_) {
        best_ = current;
        best_choice_ = choice_;
      }
      return;
    }
    double bound = current;
    for (std::uint64_t x = 0; x < alphabet_.x1_size; ++x)
      if (!covered_[x] && suffix_[t][x]) bound += weight_[x];
    if (bound <= best_) return;

    std::vector<Symbol> candidates;
    for (auto x : items_[t].members)
      if (!covered_[x] && weight_[x] > 0.0) candidates.push_back(x);
    if (candidates.empty()) {
      choice_[t] = items_[t].members.front();
      search(t + 1, current);
      return;
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](Symbol a, Symbol b) { return weight_[a] > weight_[b]; });
    for (auto x : candidates) {
      covered_[x] = 1;
      choice_[t] = x;
      search(t + 1, current + weight_[x]);
      covered_[x] = 0;
    }
  }

  const Dist& joint_;
  PairAlphabet alphabet_;
  std::uint64_t size_;
  std::vector<Item> items_;
  std::vector<std::vector<char>> suffix_;
  std::vector<double> weight_;
  std::vector<char> covered_;
  std::vector<Symbol> choice_;
  std::vector<Symbol> best_choice_;
  double best_ = -1.0;
  std::uint64_t nodes_ = 0;
};

std::vector<BCode> build_codes(std::span<const std::vector<Message>> encoders, const Dist& joint,
                               const PairAlphabet& alphabet, std::uint64_t size) {
  CoverSolver solver(joint, alphabet, size);
  std::vector<std::vector<Symbol>> decoders;
  solver.solve(encoders, &decoders);
  std::vector<BCode> codes;
  codes.reserve(encoders.size());
  for (std::size_t i = 0; i < encoders.size(); ++i) codes.emplace_back(alphabet, size, encoders[i], std::move(decoders[i]));
  return codes;
}

struct Candidate {
  double covered = -1.0;
  std::vector<std::vector<Message>> encoders;
};

Candidate exhaustive_search(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size, std::uint64_t k,
                            const SetPartitions& partitions, Parallelism par) {
  const std::uint64_t count = partitions.count();
  std::vector<std::vector<Message>> all;
  all.reserve(count);
  auto rgs = partitions.unrank(0);
  do all.emplace_back(rgs.begin(), rgs.end());
  while (partitions.next(rgs));

  const std::size_t width = static_cast<std::size_t>(k + 1);
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(count, 64));
  std::vector<Candidate> per_chunk(chunks);
  // Tuples are nondecreasing index sequences; chunks split the first index.
  for_each_chunk(count, chunks, par, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    CoverSolver solver(joint, alphabet, size);
    Candidate& best = per_chunk[chunk];
    std::vector<std::uint64_t> idx(width);
    std::vector<std::vector<Message>> tuple(width);
    for (std::uint64_t first = begin; first < end; ++first) {
      std::fill(idx.begin(), idx.end(), first);
      while (true) {
        for (std::size_t i = 0; i < width; ++i) tuple[i] = all[idx[i]];
        const double covered = solver.solve(tuple, nullptr);
        if (covered > best.covered) {
          best.covered = covered;
          best.encoders = tuple;
        }
        std::size_t pos = width;
        while (pos > 1 && idx[pos - 1] + 1 >= count) --pos;
        if (pos <= 1) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < width; ++j) idx[j] = idx[pos - 1];
      }
    }
  });
  Candidate best;
  for (auto& c : per_chunk)
    if (c.covered > best.covered) best = std::move(c);
  return best;
}

Candidate stochastic_search(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size, std::uint64_t k,
                            std::uint64_t budget, std::uint64_t seed, const std::vector<Message>* warm_start,
                            Parallelism par) {
  const std::uint64_t bins = std::min(size, alphabet.x1_size);
  const std::uint64_t per_restart = std::max<std::uint64_t>(1, budget / kStochasticRestarts);
  std::vector<Candidate> per_restart_best(kStochasticRestarts);
  for_each_chunk(kStochasticRestarts, kStochasticRestarts, par, [&](std::size_t r, std::uint64_t, std::uint64_t) {
    Rng rng(mix_seed(seed, r));
    CoverSolver solver(joint, alphabet, size);
    std::vector<std::vector<Message>> current(k + 1, std::vector<Message>(alphabet.x1_size, 0));
    if (r == 0 && warm_start) {
      for (auto& enc : current) enc = *warm_start;
    } else {
      for (auto& enc : current)
        for (auto& m : enc) m = static_cast<Message>(uniform_below(rng, bins));
    }
    double covered = solver.solve(current, nullptr);
    for (std::uint64_t evals = 1; evals < per_restart && bins > 1; ++evals) {
      const auto code = uniform_below(rng, k + 1);
      const auto x1 = uniform_below(rng, alphabet.x1_size);
      const Message old = current[code][x1];
      auto target = static_cast<Message>(uniform_below(rng, bins - 1));
      if (target >= old) ++target;
      current[code][x1] = target;
      const double trial = solver.solve(current, nullptr);
      if (trial > covered)
        covered = trial;
      else
        current[code][x1] = old;
    }
    per_restart_best[r] = {covered, std::move(current)};
  });
  Candidate best;
  for (auto& c : per_restart_best)
    if (c.covered > best.covered) best = std::move(c);
  return best;
}

}  // namespace

const char* to_string(SearchMode mode) {
  return mode == SearchMode::exhaustive ? "exhaustive" : "stochastic";
}

double joint_miss_probability(std::span<const BCode> codes, const Dist& joint, const PairAlphabet& alphabet) {
  if (codes.empty()) throw ArgumentError("joint_miss_probability needs at least one code");
  if (joint.size() != alphabet.total()) throw ArgumentError("joint distribution does not match the pair alphabet");
  BitSet hit(alphabet.total());
  for (const auto& c : codes) hit |= correct_set(c, alphabet).bits;
  double miss = 0.0;
  (~hit).for_each([&](std::size_t p) { miss += joint[p]; });
  return std::clamp(miss, 0.0, 1.0);
}

std::vector<BCode> optimal_joint_decoders(std::span<const std::vector<Message>> encoders, const Dist& joint,
                                          const PairAlphabet& alphabet, std::uint64_t size) {
  if (encoders.empty()) throw ArgumentError("optimal_joint_decoders needs at least one encoder");
  if (joint.size() != alphabet.total()) throw ArgumentError("joint distribution does not match the pair alphabet");
  for (const auto& e : encoders) {
    if (e.size() != alphabet.x1_size) throw ArgumentError("encoder is not total over X1");
    for (auto m : e)
      if (m >= size) throw ArgumentError("encoder emits a message outside {0..M-1}");
  }
  return build_codes(encoders, joint, alphabet, size);
}

MultiCodeResult best_multi_b(const Dist& joint, const PairAlphabet& alphabet, std::uint64_t size, std::uint64_t k,
                             std::uint64_t budget, std::uint64_t seed, Parallelism par) {
  if (joint.size() != alphabet.total()) throw ArgumentError("joint distribution does not match the pair alphabet");
  if (size == 0) throw ArgumentError("best_multi_b: size must be positive");
  if (budget == 0) throw ArgumentError("best_multi_b: budget must be positive");
  if (size > std::numeric_limits<Message>::max()) throw ResourceError("best_multi_b: size exceeds the message range");
  const SetPartitions partitions(alphabet.x1_size, std::min(size, alphabet.x1_size));
  const std::uint64_t count = partitions.count();
  const auto tuples = detail::capped_pow(count, k + 1, budget);

  Candidate best;
  SearchMode mode;
  if (tuples && count <= kMaxBinnings) {
    mode = SearchMode::exhaustive;
    best = exhaustive_search(joint, alphabet, size, k, partitions, par);
  } else {
    mode = SearchMode::stochastic;
    std::optional<std::vector<Message>> warm;
    if (count <= budget && count <= kMaxBinnings) {
      const auto b = optimal_b_code(joint, alphabet, size, par);
      warm.emplace(b.code.encoder().begin(), b.code.encoder().end());
    }
    best = stochastic_search(joint, alphabet, size, k, budget, seed, warm ? &*warm : nullptr, par);
  }
  auto codes = build_codes(best.encoders, joint, alphabet, size);
  const double miss = joint_miss_probability(codes, joint, alphabet);
  return {std::move(codes), miss, mode, seed};
}

std::optional<std::uint64_t> k_index(const ACode& code, const Dist& joint, const PairAlphabet& alphabet,
                                     std::uint64_t k_max, Parallelism par) {
  const double target = error_probability(code, joint, alphabet);
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    const auto r = best_multi_b(joint, alphabet, code.size(), k, kMaxBinnings, 0, par);
    if (r.search_mode != SearchMode::exhaustive)
      throw ResourceError("k_index: e_B(M;" + std::to_string(k) + ") is outside the exhaustive regime");
    if (r.miss_probability <= target + kProbTolerance) return k;
  }
  return std::nullopt;
}

}  // namespace sideinfo
