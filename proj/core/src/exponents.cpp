#include "sideinfo/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "checked.hpp"
#include "sideinfo/codes.hpp"
#include "sideinfo/errors.hpp"

namespace sideinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack on the entropy constraint when testing feasibility.
constexpr double kFeasibilityTol = 1e-9;
constexpr double kFinestStep = 1e-7;
constexpr std::uint64_t kMaxGridPoints = 20'000'000;
constexpr std::uint64_t kMaxDescentMoves = 2'000'000;
constexpr std::size_t kStarts = 8;
constexpr std::size_t kFinishers = 2;
constexpr double kCoarseStep = 1e-3;

// Block-pair product table of p at blocklength n (n >= 1).
std::vector<double> block_product(std::span<const double> p, const PairAlphabet& letter, unsigned n) {
  std::vector<double> cur(p.begin(), p.end());
  std::uint64_t x1s = letter.x1_size, x2s = letter.x2_size;
  for (unsigned k = 1; k < n; ++k) {
    const std::uint64_t nx1 = x1s * letter.x1_size, nx2 = x2s * letter.x2_size;
    std::vector<double> next(nx1 * nx2);
    for (std::uint64_t x1 = 0; x1 < x1s; ++x1)
      for (std::uint64_t x2 = 0; x2 < x2s; ++x2) {
        const double base = cur[x1 * x2s + x2];
        for (std::uint64_t a = 0; a < letter.x1_size; ++a)
          for (std::uint64_t b = 0; b < letter.x2_size; ++b)
            next[(x1 * letter.x1_size + a) * nx2 + x2 * letter.x2_size + b] = base * p[letter.index(a, b)];
      }
    cur = std::move(next);
    x1s = nx1;
    x2s = nx2;
  }
  return cur;
}

class DivergenceProblem {
 public:
  DivergenceProblem(const SingleLetterModel& model, double rate, bool high_rate)
      : p_(model.p().probs().begin(), model.p().probs().end()),
        alphabet_(model.alphabet()),
        rate_(rate),
        high_rate_(high_rate) {
    for (std::size_t i = 0; i < p_.size(); ++i)
      if (p_[i] > 0.0) support_.push_back(i);
  }

  double divergence(const std::vector<double>& q) const {
    double d = 0.0;
    for (std::size_t i : support_)
      if (q[i] > 0.0) d += q[i] * std::log2(q[i] / p_[i]);
    return std::max(d, 0.0);
  }

  double entropy(const std::vector<double>& q) const {
    std::vector<double> marginal(alphabet_.x2_size, 0.0);
    for (std::size_t i : support_) marginal[alphabet_.x2_of(i)] += q[i];
    double h = 0.0;
    for (std::size_t i : support_)
      if (q[i] > 0.0) h -= q[i] * std::log2(q[i] / marginal[alphabet_.x2_of(i)]);
    return std::max(h, 0.0);
  }

  bool feasible(const std::vector<double>& q) const {
    const double h = entropy(q);
    return high_rate_ ? h >= rate_ - kFeasibilityTol : h <= rate_ + kFeasibilityTol;
  }

  // A feasible point the restoration step pulls towards: the conditional
  // entropy maximizer (high rate) or the MAP deterministic conditional (low rate).
  std::vector<double> anchor() const {
    std::vector<double> a(p_.size(), 0.0);
    if (high_rate_) {
      std::vector<std::uint64_t> column_support(alphabet_.x2_size, 0);
      for (std::size_t i : support_) ++column_support[alphabet_.x2_of(i)];
      const std::uint64_t widest = *std::max_element(column_support.begin(), column_support.end());
      const auto columns = static_cast<double>(std::count(column_support.begin(), column_support.end(), widest));
      for (std::size_t i : support_)
        if (column_support[alphabet_.x2_of(i)] == widest) a[i] = 1.0 / (columns * static_cast<double>(widest));
    } else {
      double total = 0.0;
      for (std::uint64_t x2 = 0; x2 < alphabet_.x2_size; ++x2) {
        std::uint64_t best = 0;
        for (std::uint64_t x1 = 1; x1 < alphabet_.x1_size; ++x1)
          if (p_[alphabet_.index(x1, x2)] > p_[alphabet_.index(best, x2)]) best = x1;
        a[alphabet_.index(best, x2)] = p_[alphabet_.index(best, x2)];
        total += p_[alphabet_.index(best, x2)];
      }
      for (double& v : a) v /= total;
    }
    return a;
  }

  // The `count` best feasible lattice points {counts / divisions} on the
  // support that are pairwise more than `separation` apart (max norm), best first.
  std::vector<std::vector<double>> grid_starts(std::uint64_t divisions, std::size_t count,
                                               double separation) const {
    const std::size_t parts = support_.size();
    // C(divisions + parts - 1, parts - 1) lattice points.
    double points = 1.0;
    for (std::size_t j = 1; j < parts; ++j)
      points = points * static_cast<double>(divisions + j) / static_cast<double>(j);
    if (points > static_cast<double>(kMaxGridPoints))
      throw ResourceError("simplex grid of " + std::to_string(static_cast<std::uint64_t>(points)) + " points exceeds the cap");

    std::vector<std::pair<double, std::vector<double>>> feasible_points;
    std::vector<std::uint64_t> counts(parts, 0);
    counts[parts - 1] = divisions;
    std::vector<double> q(p_.size(), 0.0);
    while (true) {
      for (std::size_t j = 0; j < parts; ++j)
        q[support_[j]] = static_cast<double>(counts[j]) / static_cast<double>(divisions);
      if (feasible(q)) feasible_points.emplace_back(divergence(q), q);
      // Next composition: move one unit out of the last part into the
      // rightmost earlier part that can still grow.
      if (parts == 1) break;
      std::size_t j = parts - 1;
      while (j > 0 && counts[j] == 0) --j;
      if (j == 0) break;
      const std::uint64_t tail = counts[j];
      counts[j] = 0;
      ++counts[j - 1];
      counts[parts - 1] = tail - 1;
    }
    std::stable_sort(feasible_points.begin(), feasible_points.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::vector<double>> starts;
    for (auto& [d, point] : feasible_points) {
      if (starts.size() == count) break;
      const bool distinct = std::all_of(starts.begin(), starts.end(), [&](const std::vector<double>& s) {
        double gap = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) gap = std::max(gap, std::abs(s[i] - point[i]));
        return gap > separation;
      });
      if (distinct) starts.push_back(std::move(point));
    }
    return starts;
  }

  // Pairwise mass transfers on the support. The optimum of a violated
  // constraint sits on the level set H = R, so every trial is projected back
  // onto it along the simplex-projected entropy gradient.
  // Halves the step from `initial_step` while it is at least `final_step`.
  std::vector<double> refine(std::vector<double> q, double initial_step, double final_step) const {
    if (auto on = project(q)) {
      if (feasible(*on)) q = std::move(*on);
    }
    double d = divergence(q);
    std::uint64_t moves = 0;
    std::vector<double> trial(q.size());
    double step = initial_step;
    for (; step >= final_step; step /= 2.0) {
      bool improved = true;
      while (improved && moves < kMaxDescentMoves) {
        improved = false;
        for (std::size_t gi : support_) {
          for (std::size_t ti : support_) {
            if (gi == ti) continue;
            // Transfers below the finest step only chase numerical dust.
            const double delta = std::min(step, q[ti]);
            if (delta < kFinestStep) continue;
            trial = q;
            trial[gi] += delta;
            trial[ti] -= delta;
            auto projected = project(trial);
            if (!projected || !feasible(*projected)) continue;
            const double dt = divergence(*projected);
            if (dt < d - 1e-15) {
              q = std::move(*projected);
              d = dt;
              improved = true;
              ++moves;
            }
          }
        }
      }
    }
    return q;
  }

  // Step reached after halving from `initial_step` down past `final_step`.
  static double next_level(double initial_step, double final_step) {
    double step = initial_step;
    while (step >= final_step) step /= 2.0;
    return step;
  }

  // Closest point of {H = R} along q + t n, where n is the entropy gradient
  // centred on the support; nullopt when the line misses the level set
  // before leaving the simplex. The returned point is on the feasible side.
  std::optional<std::vector<double>> project(const std::vector<double>& q) const {
    std::vector<double> marginal(alphabet_.x2_size, 0.0);
    for (std::size_t i : support_) marginal[alphabet_.x2_of(i)] += q[i];
    std::vector<double> n(q.size(), 0.0);
    double mean = 0.0;
    for (std::size_t i : support_) {
      const double m = marginal[alphabet_.x2_of(i)];
      n[i] = m <= 0.0 ? 0.0 : q[i] <= 0.0 ? 64.0 : std::log2(m / q[i]);
      mean += n[i];
    }
    mean /= static_cast<double>(support_.size());
    double t_up = kInf, t_down = kInf;
    for (std::size_t i : support_) {
      n[i] -= mean;
      if (n[i] < 0.0) t_up = std::min(t_up, q[i] / -n[i]);
      if (n[i] > 0.0) t_down = std::min(t_down, q[i] / n[i]);
    }
    double scale = 0.0;
    for (std::size_t i : support_) scale = std::max(scale, std::abs(n[i]));
    // Every column conditionally uniform: the direction is rounding noise.
    if (scale < 1e-9) return std::nullopt;

    std::vector<double> line(q.size());
    auto at = [&](double t) -> const std::vector<double>& {
      for (std::size_t i = 0; i < q.size(); ++i) line[i] = std::max(q[i] + t * n[i], 0.0);
      return line;
    };
    const double gap = entropy(q) - rate_;
    if (gap == 0.0) return q;
    // H increases initially along +n, so a deficit is closed by t > 0.
    const double end = gap < 0.0 ? t_up : -t_down;
    if (!std::isfinite(end)) return std::nullopt;
    if ((entropy(at(end)) - rate_) * gap > 0.0) return std::nullopt;
    double inside = 0.0, outside = end;  // sign of gap at `inside`
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (inside + outside);
      if ((entropy(at(mid)) - rate_) * gap > 0.0)
        inside = mid;
      else
        outside = mid;
    }
    // Take the bracket end that satisfies the constraint.
    const bool inside_feasible = high_rate_ ? gap > 0.0 : gap < 0.0;
    const auto& out = at(inside_feasible ? inside : outside);
    double mass = 0.0;
    for (double v : out) mass += v;
    if (std::abs(mass - 1.0) > kFeasibilityTol) return std::nullopt;
    return out;
  }

  // Minimum over Q with a fixed conditional c(x|y) per column and free X2
  // marginal: -log2 sum_y 2^{-K_y}, K_y = D(c(.|y) || P(.|y)) - log2 P2(y).
  // Columns where `conditional` returns nothing are excluded.
  template <typename Conditional>
  ConstrainedMinimum column_family_minimum(Conditional conditional) const {
    std::vector<double> weight(alphabet_.x2_size, 0.0);
    std::vector<std::vector<double>> cond(alphabet_.x2_size);
    double total = 0.0;
    for (std::uint64_t y = 0; y < alphabet_.x2_size; ++y) {
      auto c = conditional(y);
      if (!c) continue;
      double k = 0.0;
      for (std::uint64_t x = 0; x < alphabet_.x1_size; ++x)
        if ((*c)[x] > 0.0) k += (*c)[x] * std::log2((*c)[x] / p_[alphabet_.index(x, y)]);
      weight[y] = std::exp2(-k);
      total += weight[y];
      cond[y] = std::move(*c);
    }
    if (total <= 0.0) return {kInf, {}};
    std::vector<double> q(p_.size(), 0.0);
    for (std::uint64_t y = 0; y < alphabet_.x2_size; ++y)
      for (std::uint64_t x = 0; x < alphabet_.x1_size && !cond[y].empty(); ++x)
        q[alphabet_.index(x, y)] = weight[y] / total * cond[y][x];
    return {std::max(-std::log2(total), 0.0), std::move(q)};
  }

  // H >= log2 |X1|: X1 uniform given X2 on columns where P has full support.
  ConstrainedMinimum top_rate_minimum() const {
    return column_family_minimum([&](std::uint64_t y) -> std::optional<std::vector<double>> {
      for (std::uint64_t x = 0; x < alphabet_.x1_size; ++x)
        if (p_[alphabet_.index(x, y)] <= 0.0) return std::nullopt;
      return std::vector<double>(alphabet_.x1_size, 1.0 / static_cast<double>(alphabet_.x1_size));
    });
  }

  // H <= 0: X1 a function of X2; per column the most probable x1 is best.
  ConstrainedMinimum zero_rate_minimum() const {
    return column_family_minimum([&](std::uint64_t y) -> std::optional<std::vector<double>> {
      std::uint64_t best = 0;
      for (std::uint64_t x = 1; x < alphabet_.x1_size; ++x)
        if (p_[alphabet_.index(x, y)] > p_[alphabet_.index(best, y)]) best = x;
      if (p_[alphabet_.index(best, y)] <= 0.0) return std::nullopt;
      std::vector<double> c(alphabet_.x1_size, 0.0);
      c[best] = 1.0;
      return c;
    });
  }

 private:
  std::vector<double> p_;
  PairAlphabet alphabet_;
  std::vector<std::size_t> support_;
  double rate_;
  bool high_rate_;
};

void check_rate_args(const SingleLetterModel& model, double rate, double grid_step) {
  if (model.kind() != SingleLetterModel::Kind::iid) throw ArgumentError("exponent evaluation needs an iid model");
  const double top = std::log2(static_cast<double>(model.alphabet().x1_size));
  if (!(rate >= 0.0 && rate <= top + 1e-12))
    throw ArgumentError("rate " + std::to_string(rate) + " outside [0, log2 |X1|]");
  if (!(grid_step > 0.0 && grid_step <= 0.1)) throw ArgumentError("grid_step must lie in (0, 0.1]");
}

ConstrainedMinimum minimize(const SingleLetterModel& model, double rate, double grid_step, bool high_rate) {
  check_rate_args(model, rate, grid_step);
  const Dist& p = model.p();
  const double h_p = conditional_entropy(p, model.alphabet().x1_size, model.alphabet().x2_size);
  if (high_rate ? h_p >= rate : h_p <= rate)
    return {0.0, std::vector<double>(p.probs().begin(), p.probs().end())};

  const DivergenceProblem problem(model, rate, high_rate);
  const double top = std::log2(static_cast<double>(model.alphabet().x1_size));
  // On these two faces the level set H = R has no interior to walk along.
  if (high_rate && rate >= top - kFeasibilityTol) return problem.top_rate_minimum();
  if (!high_rate && rate <= kFeasibilityTol) return problem.zero_rate_minimum();

  const auto anchor = problem.anchor();
  if (!problem.feasible(anchor)) return {kInf, {}};
  const auto divisions = static_cast<std::uint64_t>(std::llround(1.0 / grid_step));
  auto starts = problem.grid_starts(std::max<std::uint64_t>(divisions, 1), kStarts, 2.5 * grid_step);
  if (starts.empty()) starts.push_back(anchor);
  // The low-rate feasible set is not convex, so several separated starts get
  // a coarse descent and the best few are carried down to the finest step.
  std::vector<std::pair<double, std::vector<double>>> coarse;
  for (auto& start : starts) {
    auto q = problem.refine(std::move(start), grid_step, kCoarseStep);
    coarse.emplace_back(problem.divergence(q), std::move(q));
  }
  std::stable_sort(coarse.begin(), coarse.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  coarse.resize(std::min(coarse.size(), kFinishers));
  const double resume = DivergenceProblem::next_level(grid_step, kCoarseStep);
  ConstrainedMinimum best{kInf, {}};
  for (auto& [d0, start] : coarse) {
    auto q = problem.refine(std::move(start), resume, kFinestStep);
    const double d = problem.divergence(q);
    if (d < best.value) best = {d, std::move(q)};
  }
  return best;
}

}  // namespace

SingleLetterModel::SingleLetterModel(Kind kind, double alpha, Dist p1, Dist p2, PairAlphabet alphabet)
    : kind_(kind), alpha_(alpha), p1_(std::move(p1)), p2_(std::move(p2)), alphabet_(alphabet) {}

SingleLetterModel SingleLetterModel::iid(Dist p, PairAlphabet alphabet) {
  if (p.size() != alphabet.total()) throw ArgumentError("single-letter joint does not match the pair alphabet");
  Dist copy = p;
  return SingleLetterModel(Kind::iid, 1.0, std::move(p), std::move(copy), alphabet);
}

SingleLetterModel SingleLetterModel::mixture(double alpha, Dist p1, Dist p2, PairAlphabet alphabet) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("mixture weight must lie in (0, 1)");
  if (p1.size() != alphabet.total() || p2.size() != alphabet.total())
    throw ArgumentError("mixture components do not match the pair alphabet");
  return SingleLetterModel(Kind::mixture, alpha, std::move(p1), std::move(p2), alphabet);
}

Dist dsbs(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0)) throw ArgumentError("crossover must lie in [0, 1]");
  const double same = 0.5 * (1.0 - crossover), flip = 0.5 * crossover;
  return Dist({same, flip, flip, same});
}

Dist block_joint(const SingleLetterModel& model, unsigned n) {
  const PairAlphabet block = model.alphabet().block(n);
  if (model.kind() == SingleLetterModel::Kind::iid)
    return Dist(block_product(model.p().probs(), model.alphabet(), n), kProbTolerance);

  // Combine the two components at the last level so only one full-size table
  // is ever held.
  const PairAlphabet& letter = model.alphabet();
  const double alpha = model.alpha();
  if (n == 1) {
    std::vector<double> out(letter.total());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * model.p1()[i] + (1.0 - alpha) * model.p2()[i];
    return Dist(std::move(out), kProbTolerance);
  }
  const auto t1 = block_product(model.p1().probs(), letter, n - 1);
  const auto t2 = block_product(model.p2().probs(), letter, n - 1);
  const std::uint64_t x1s = block.x1_size / letter.x1_size, x2s = block.x2_size / letter.x2_size;
  std::vector<double> out(block.total());
  for (std::uint64_t x1 = 0; x1 < x1s; ++x1)
    for (std::uint64_t x2 = 0; x2 < x2s; ++x2) {
      const double a1 = alpha * t1[x1 * x2s + x2], a2 = (1.0 - alpha) * t2[x1 * x2s + x2];
      for (std::uint64_t a = 0; a < letter.x1_size; ++a)
        for (std::uint64_t b = 0; b < letter.x2_size; ++b)
          out[block.index(x1 * letter.x1_size + a, x2 * letter.x2_size + b)] =
              a1 * model.p1()[letter.index(a, b)] + a2 * model.p2()[letter.index(a, b)];
    }
  return Dist(std::move(out), kProbTolerance);
}

std::uint64_t message_count(unsigned n, double rate) {
  if (!(rate >= 0.0)) throw ArgumentError("rate must be nonnegative");
  const double exponent = static_cast<double>(n) * rate;
  if (exponent >= 63.0) throw ResourceError("2^{nR} exceeds 64-bit range");
  const double nearest = std::round(exponent);
  if (std::abs(exponent - nearest) <= 1e-9) return std::uint64_t{1} << static_cast<unsigned>(nearest);
  return static_cast<std::uint64_t>(std::ceil(std::exp2(exponent)));
}

ConstrainedMinimum minimize_high_rate(const SingleLetterModel& model, double rate, double grid_step) {
  return minimize(model, rate, grid_step, true);
}

ConstrainedMinimum minimize_low_rate(const SingleLetterModel& model, double rate, double grid_step) {
  return minimize(model, rate, grid_step, false);
}

double rho_high_rate(const SingleLetterModel& model, double rate, double grid_step) {
  return minimize_high_rate(model, rate, grid_step).value;
}

double rho_low_rate(const SingleLetterModel& model, double rate, double grid_step) {
  return minimize_low_rate(model, rate, grid_step).value;
}

ExponentCurve exponent_curve(const SingleLetterModel& model, ExponentCurve::Kind kind, std::span<const double> rates,
                             double grid_step, Parallelism par) {
  for (std::size_t i = 1; i < rates.size(); ++i)
    if (!(rates[i] > rates[i - 1])) throw ArgumentError("curve rates must be strictly increasing");
  ExponentCurve curve{kind, std::vector<std::pair<double, double>>(rates.size())};
  for_each_chunk(rates.size(), rates.size(), par, [&](std::size_t i, std::uint64_t, std::uint64_t) {
    const double v = kind == ExponentCurve::Kind::high_rate ? rho_high_rate(model, rates[i], grid_step)
                                                            : rho_low_rate(model, rates[i], grid_step);
    curve.points[i] = {rates[i], v};
  });
  return curve;
}

std::vector<std::size_t> detect_jumps(const ExponentCurve& curve, double threshold) {
  std::vector<std::size_t> jumps;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const double a = curve.points[i - 1].second, b = curve.points[i].second;
    if (std::isinf(a) != std::isinf(b) || std::abs(b - a) > threshold) jumps.push_back(i);
  }
  return jumps;
}

double predicted_eps_mixed(const SingleLetterModel& model, double rate) {
  if (model.kind() != SingleLetterModel::Kind::mixture) throw ArgumentError("predicted_eps_mixed needs a mixture model");
  const auto& a = model.alphabet();
  const double h1 = conditional_entropy(model.p1(), a.x1_size, a.x2_size);
  const double h2 = conditional_entropy(model.p2(), a.x1_size, a.x2_size);
  if (std::abs(rate - h1) <= kProbTolerance || std::abs(rate - h2) <= kProbTolerance)
    throw ArgumentError("rate coincides with a component conditional entropy; the limit is discontinuous there");
  const bool first_below = h1 < rate, second_below = h2 < rate;
  if (first_below && second_below) return 0.0;
  if (first_below) return 1.0 - model.alpha();
  if (second_below) return model.alpha();
  return 1.0;
}

std::vector<SweepPoint> empirical_exponent_sweep(const SingleLetterModel& model, double rate,
                                                 std::span<const unsigned> n_values, Parallelism par) {
  for (unsigned n : n_values) model.alphabet().block(n);  // cap check before any work
  std::vector<SweepPoint> out(n_values.size());
  for_each_chunk(n_values.size(), n_values.size(), par, [&](std::size_t i, std::uint64_t, std::uint64_t) {
    const unsigned n = n_values[i];
    const PairAlphabet block = model.alphabet().block(n);
    const std::uint64_t size = message_count(n, rate);
    const double e = min_a_error(block_joint(model, n), block, size);
    const ExtReal exponent = e > 0.0 ? ExtReal(std::max(0.0, -std::log2(e) / n)) : ExtReal::infinity();
    out[i] = {n, size, e, exponent};
  });
  return out;
}

}  // namespace sideinfo
