#include "sideinfo/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "checked.hpp"
#include "sideinfo/errors.hpp"

namespace sideinfo {

namespace {

void require_same_size(const Dist& a, const Dist& b, const char* what) {
  if (a.size() != b.size())
    throw ArgumentError(std::string(what) + ": alphabet sizes differ (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
}

void require_event_fits(const Dist& d, const EventSet& e) {
  if (e.size() != d.size()) throw ArgumentError("event set does not match the alphabet size");
}

std::uint64_t extension_size(std::size_t symbols, unsigned n) {
  if (n == 0) throw ArgumentError("blocklength must be positive");
  const auto total = detail::capped_pow(symbols, n, kMaxOutcomes);
  if (!total)
    throw ResourceError("extension of a " + std::to_string(symbols) + "-symbol alphabet to n=" +
                        std::to_string(n) + " exceeds 2^24 outcomes");
  return *total;
}

// Raw product table without Dist validation.
std::vector<double> product_table(std::span<const double> p, unsigned n) {
  std::vector<double> cur(p.begin(), p.end());
  for (unsigned k = 1; k < n; ++k) {
    std::vector<double> next(cur.size() * p.size());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t s = 0; s < p.size(); ++s) next[i * p.size() + s] = cur[i] * p[s];
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

ExtReal::ExtReal(double v) : value_(v) {
  if (std::isnan(v)) throw ArgumentError("extended real cannot be NaN");
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

Dist::Dist(std::vector<double> probs, double tolerance) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ArgumentError("distribution needs at least one outcome");
  if (probs_.size() > kMaxOutcomes) throw ResourceError("distribution exceeds 2^24 outcomes");
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i]))
      throw ArgumentError("probability at outcome " + std::to_string(i) + " is negative or not finite");
  }
  const double total = compensated_sum(probs_);
  if (std::abs(total - 1.0) > tolerance)
    throw ArgumentError("probabilities sum to " + std::to_string(total) + ", not 1");
}

Dist Dist::uniform(std::size_t size) {
  if (size == 0) throw ArgumentError("uniform distribution needs at least one outcome");
  return Dist(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Dist Dist::point_mass(std::size_t size, std::size_t outcome) {
  if (outcome >= size) throw ArgumentError("point mass outcome outside the alphabet");
  std::vector<double> p(size, 0.0);
  p[outcome] = 1.0;
  return Dist(std::move(p));
}

double Dist::mass(const EventSet& event) const {
  if (event.size() != size()) throw ArgumentError("event set does not match the alphabet size");
  double m = 0.0;
  event.for_each([&](std::size_t i) { m += probs_[i]; });
  return m;
}

bool Dist::approx_equal(const Dist& other, double tolerance) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (std::abs(probs_[i] - other.probs_[i]) > tolerance) return false;
  return true;
}

Dist with_padding_outcome(const Dist& d) {
  std::vector<double> p(d.probs().begin(), d.probs().end());
  p.push_back(0.0);
  return Dist(std::move(p));
}

ExtReal kl_divergence(const Dist& nu, const Dist& mu) {
  require_same_size(nu, mu, "kl_divergence");
  double sum = 0.0;
  for (std::size_t x = 0; x < nu.size(); ++x) {
    if (nu[x] == 0.0) continue;
    if (mu[x] == 0.0) return ExtReal::infinity();
    sum += nu[x] * std::log2(nu[x] / mu[x]);
  }
  return ExtReal(std::max(sum, 0.0));
}

ExtReal g_functional(const Dist& nu, const Dist& mu) {
  require_same_size(nu, mu, "g_functional");
  double sum = 0.0;
  for (std::size_t x = 0; x < nu.size(); ++x) {
    if (nu[x] == 0.0) continue;
    if (mu[x] == 0.0) return ExtReal::infinity();
    sum += nu[x] * (nu[x] / mu[x]);
  }
  return ExtReal(sum);
}

Dist conditional_restriction(const Dist& mu, const EventSet& event, const Dist& fallback) {
  require_same_size(mu, fallback, "conditional_restriction");
  require_event_fits(mu, event);
  const double m = mu.mass(event);
  if (m <= 0.0) return fallback;
  std::vector<double> p(mu.size(), 0.0);
  event.for_each([&](std::size_t i) { p[i] = mu[i] / m; });
  return Dist(std::move(p));
}

TiltTrace recursive_tilt(const Dist& mu, const Dist& u, std::span<const EventSet> events) {
  require_same_size(mu, u, "recursive_tilt");
  for (const auto& e : events) require_event_fits(mu, e);

  TiltTrace trace{{}, mu, ExtReal(0.0), std::nullopt};
  Dist current = mu;
  double accumulated = 0.0;
  for (std::size_t m = 0; m < events.size(); ++m) {
    const double mass = current.mass(events[m]);
    trace.levels.push_back({current, events[m], mass});
    if (mass > 0.0 && !current.approx_equal(u, kSumTolerance)) {
      current = conditional_restriction(current, events[m], u);
      if (!trace.fallback_level) accumulated -= std::log2(mass);
    } else {
      if (!trace.fallback_level) trace.fallback_level = m;
      current = u;
    }
  }
  trace.terminal = current;
  if (trace.fallback_level) {
    trace.divergence_bits = kl_divergence(u, mu);
  } else {
    trace.divergence_bits = ExtReal(std::max(accumulated, 0.0));
    // Without a fallback the iterated restriction must coincide with the
    // one-shot restriction to the intersection.
    EventSet all = EventSet::full(mu.size());
    for (const auto& e : events) all &= e;
    if (!trace.terminal.approx_equal(conditional_restriction(mu, all, u)))
      throw std::logic_error("recursive_tilt: terminal measure differs from one-shot restriction");
  }
  return trace;
}

Dist iid_extension(const Dist& p, unsigned n) {
  extension_size(p.size(), n);
  return Dist(product_table(p.probs(), n), kProbTolerance);
}

Dist mixture_extension(double alpha, const Dist& p1, const Dist& p2, unsigned n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("mixture weight must lie in (0, 1)");
  require_same_size(p1, p2, "mixture_extension");
  extension_size(p1.size(), n);
  auto a = product_table(p1.probs(), n);
  const auto b = product_table(p2.probs(), n);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = alpha * a[i] + (1.0 - alpha) * b[i];
  return Dist(std::move(a), kProbTolerance);
}

Dist regroup_pair_blocks(const Dist& sequence_dist, const PairAlphabet& letter, unsigned n) {
  const std::uint64_t symbols = letter.total();
  if (extension_size(symbols, n) != sequence_dist.size())
    throw ArgumentError("regroup_pair_blocks: distribution size is not (x1_size*x2_size)^n");
  const PairAlphabet block = letter.block(n);
  std::vector<double> out(sequence_dist.size());
  for (std::uint64_t s = 0; s < sequence_dist.size(); ++s) {
    std::uint64_t rest = s;
    std::uint64_t x1 = 0, x2 = 0, w1 = 1, w2 = 1;
    // Least significant position first.
    for (unsigned i = 0; i < n; ++i) {
      const std::uint64_t sym = rest % symbols;
      rest /= symbols;
      x1 += letter.x1_of(sym) * w1;
      x2 += letter.x2_of(sym) * w2;
      w1 *= letter.x1_size;
      w2 *= letter.x2_size;
    }
    out[block.index(x1, x2)] = sequence_dist[s];
  }
  return Dist(std::move(out), kProbTolerance);
}

double conditional_entropy(const Dist& q, std::uint64_t x1_size, std::uint64_t x2_size) {
  if (x1_size == 0 || x2_size == 0 || q.size() != x1_size * x2_size)
    throw ArgumentError("conditional_entropy: joint size does not match x1_size * x2_size");
  std::vector<double> marginal(x2_size, 0.0);
  for (std::uint64_t x1 = 0; x1 < x1_size; ++x1)
    for (std::uint64_t x2 = 0; x2 < x2_size; ++x2) marginal[x2] += q[x1 * x2_size + x2];
  double h = 0.0;
  for (std::uint64_t x1 = 0; x1 < x1_size; ++x1)
    for (std::uint64_t x2 = 0; x2 < x2_size; ++x2) {
      const double v = q[x1 * x2_size + x2];
      if (v > 0.0) h -= v * std::log2(v / marginal[x2]);
    }
  return std::clamp(h, 0.0, std::log2(static_cast<double>(x1_size)));
}

}  // namespace sideinfo
