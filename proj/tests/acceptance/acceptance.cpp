// Acceptance gate: one [PASS]/[FAIL] line per criterion, nonzero exit if any
// criterion fails. Runtime limits are part of each criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "generators.hpp"
#include "rate_oracles.hpp"
#include "runner/config.hpp"
#include "runner/experiment.hpp"
#include "runner/report.hpp"
#include "sideinfo/codes.hpp"
#include "sideinfo/exponents.hpp"
#include "sideinfo/measures.hpp"
#include "sideinfo/multicode.hpp"
#include "sideinfo/oracles.hpp"

using namespace sideinfo;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Parallelism all_cores() { return Parallelism{std::max(1U, std::thread::hardware_concurrency())}; }

testing::PairTable table_of(const Dist& p, const PairAlphabet& a) {
  return {std::vector<double>(p.probs().begin(), p.probs().end()), a.x1_size, a.x2_size};
}

ACode random_a_code(Rng& rng, const PairAlphabet& a, std::uint64_t size) {
  std::vector<Message> enc(a.total());
  for (auto& m : enc) m = static_cast<Message>(uniform_below(rng, size));
  std::vector<Symbol> dec(size * a.x2_size);
  for (auto& x : dec) x = static_cast<Symbol>(uniform_below(rng, a.x1_size));
  return ACode(a, size, std::move(enc), std::move(dec));
}

Outcome variational_suite() {
  Rng rng(mix_seed(101, 0));
  std::uint64_t instances = 0, samples = 0, violations = 0, g_misses = 0, d_misses = 0;
  double worst_g = 0.0, worst_d = 0.0;
  while (instances < 500) {
    const auto size = 1 + uniform_below(rng, 8);
    const auto mu = testing::random_dist(rng, size, 0.2);
    const auto event = testing::random_event(rng, size);
    if (mu.mass(event) == 0.0) continue;
    const auto r = oracle::sample_variational_identity(mu, event, 1000, mix_seed(101, instances + 1));
    ++instances;
    samples += r.trials;
    violations += r.violations;
    const double g_err = std::abs(r.g_at_restriction - r.g_bound) / r.g_bound;
    const double d_err = std::abs(r.d_at_restriction - r.d_bound) / std::max(r.d_bound, 1.0);
    worst_g = std::max(worst_g, g_err);
    worst_d = std::max(worst_d, d_err);
    if (g_err > 1e-12) ++g_misses;
    if (d_err > 1e-12) ++d_misses;
  }
  return {violations == 0 && g_misses == 0 && d_misses == 0,
          fmt("%llu instances, %llu samples, %llu violations; worst relative error G %.2e, D %.2e",
              (unsigned long long)instances, (unsigned long long)samples, (unsigned long long)violations, worst_g,
              worst_d)};
}

Outcome tilt_suite() {
  struct Tally {
    std::uint64_t sequences = 0, compared = 0, terminal_misses = 0, divergence_misses = 0;
  };
  Tally total;
  Rng rng(mix_seed(102, 0));
  for (std::size_t size = 1; size <= 6; ++size) {
    const std::uint64_t subsets = std::uint64_t{1} << size;
    const Dist u = Dist::uniform(size);
    const Dist mu = testing::random_dist(rng, size);
    for (std::size_t length = 1; length <= 4; ++length) {
      std::uint64_t count = 1;
      for (std::size_t i = 0; i < length; ++i) count *= subsets;
      const std::size_t chunks = 64;
      std::vector<Tally> parts(chunks);
      for_each_chunk(count, chunks, all_cores(), [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
        Tally& t = parts[c];
        std::vector<EventSet> events(length);
        for (std::uint64_t s = begin; s < end; ++s) {
          EventSet all = EventSet::full(size);
          std::uint64_t code = s;
          for (std::size_t i = 0; i < length; ++i, code /= subsets) {
            events[i] = EventSet::from_mask(code % subsets, size);
            all &= events[i];
          }
          ++t.sequences;
          const auto trace = recursive_tilt(mu, u, events);
          if (trace.fallback_level) continue;
          ++t.compared;
          if (!trace.terminal.approx_equal(conditional_restriction(mu, all, u), 1e-12)) ++t.terminal_misses;
          const auto kl = kl_divergence(trace.terminal, mu);
          if (!kl.is_finite() || std::abs(trace.divergence_bits.value() - kl.value()) > 1e-9) ++t.divergence_misses;
        }
      });
      for (const auto& t : parts) {
        total.sequences += t.sequences;
        total.compared += t.compared;
        total.terminal_misses += t.terminal_misses;
        total.divergence_misses += t.divergence_misses;
      }
    }
  }
  return {total.terminal_misses == 0 && total.divergence_misses == 0,
          fmt("%llu sequences, %llu without fallback; terminal mismatches %llu, divergence mismatches %llu",
              (unsigned long long)total.sequences, (unsigned long long)total.compared,
              (unsigned long long)total.terminal_misses, (unsigned long long)total.divergence_misses)};
}

Outcome merge_suite() {
  Rng rng(mix_seed(103, 0));
  int size_misses = 0, union_misses = 0;
  for (int t = 0; t < 1000; ++t) {
    const PairAlphabet a{1 + uniform_below(rng, 6), 1 + uniform_below(rng, 6)};
    const auto c1 = random_a_code(rng, a, 1 + uniform_below(rng, 5));
    const auto c2 = random_a_code(rng, a, 1 + uniform_below(rng, 5));
    const auto merged = merge_a_codes(c1, c2, a);
    if (merged.size() != c1.size() + c2.size()) ++size_misses;
    if (!(correct_set(merged, a).bits == (correct_set(c1, a).bits | correct_set(c2, a).bits))) ++union_misses;
  }
  return {size_misses == 0 && union_misses == 0,
          fmt("1000 pairs; size mismatches %d, union mismatches %d", size_misses, union_misses)};
}

Outcome certification_suite() {
  Rng rng(mix_seed(104, 0));
  int instances = 0, comparisons = 0, mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < 60; ++t) {
    const PairAlphabet a{1 + uniform_below(rng, 3), 1 + uniform_below(rng, 2)};
    const auto joint = testing::random_dist(rng, a.total(), 0.2);
    ++instances;
    for (std::uint64_t m = 1; m <= 3; ++m) {
      auto compare = [&](double got, double want) {
        ++comparisons;
        worst = std::max(worst, std::abs(got - want));
        if (std::abs(got - want) > 1e-12) ++mismatches;
      };
      compare(optimal_a_code(joint, a, m).error, oracle::enumerate_a_codes(joint, a, m));
      compare(optimal_b_code(joint, a, m).error, oracle::enumerate_b_tuples(joint, a, m, 0));
    }
  }
  return {instances >= 50 && mismatches == 0,
          fmt("%d instances, %d comparisons, %d mismatches (largest gap %.1e)", instances, comparisons, mismatches,
              worst)};
}

Outcome ordering_suite() {
  Rng rng(mix_seed(105, 0));
  int instances = 0, a_vs_b = 0, in_k = 0, in_m = 0, embed = 0;
  for (int t = 0; t < 60; ++t) {
    const PairAlphabet a{2 + uniform_below(rng, 3), 1 + uniform_below(rng, 3)};
    const auto joint = testing::random_dist(rng, a.total(), 0.2);
    ++instances;
    std::vector<double> prev;
    for (std::uint64_t m = 1; m <= a.x1_size; ++m) {
      std::vector<double> row;
      for (std::uint64_t k = 0; k <= 2; ++k)
        row.push_back(best_multi_b(joint, a, m, k, kDefaultSearchBudget, 105, all_cores()).miss_probability);
      if (min_a_error(joint, a, m) > row[0] + 1e-12) ++a_vs_b;
      for (std::size_t k = 1; k < row.size(); ++k)
        if (row[k] > row[k - 1] + 1e-12) ++in_k;
      for (std::size_t k = 0; k < prev.size(); ++k)
        if (row[k] > prev[k] + 1e-12) ++in_m;
      prev = row;
      const auto b = optimal_b_code(joint, a, m).code;
      if (error_probability(b_to_a(b), joint, a) != error_probability(b, joint, a)) ++embed;
    }
  }
  return {a_vs_b + in_k + in_m + embed == 0,
          fmt("%d instances; e_A > e_B(M;0): %d, increase in k: %d, increase in M: %d, b_to_a error changes: %d",
              instances, a_vs_b, in_k, in_m, embed)};
}

Outcome mixture_suite() {
  auto config = runner::parse_config(R"({"command":"mixed","seed":6,
    "model":{"kind":"mixture","alpha":0.5,"components":[{"kind":"dsbs","crossover":0.02},{"kind":"dsbs","crossover":0.35}]},
    "params":{"R":0.5,"n_values":[4,5,6,7,8,9,10,11,12]}})");
  config.workers = all_cores().workers;
  const auto rows = runner::run_experiment(config);
  const double predicted = rows.front().value;
  std::vector<double> e;
  for (const auto& r : rows)
    if (r.metric == "e_A") e.push_back(r.value);
  bool monotone = true;
  for (std::size_t i = 1; i < e.size(); ++i) monotone = monotone && e[i] >= e[i - 1];
  const double gap = std::abs(e.back() - predicted);
  return {predicted == 0.5 && gap <= 0.1 && monotone,
          fmt("predicted %.3f; e_A(n=4) %.4f ... e_A(n=12) %.4f, gap %.4f; nondecreasing: %s", predicted, e.front(),
              e.back(), gap, monotone ? "yes" : "no")};
}

Outcome exponent_suite() {
  const PairAlphabet binary{2, 2};
  const auto model = SingleLetterModel::iid(dsbs(0.1), binary);
  const auto table = table_of(model.p(), binary);
  const double step = 0.01;

  const double rho = rho_high_rate(model, 0.8, step);
  const double finer = testing::binary_level_set_minimum(table, 0.8, step / 4.0);
  const bool grid_ok = std::abs(rho - finer) <= 1e-4;

  const std::vector<unsigned> ns{2, 4, 6, 8, 10, 12};
  const auto sweep = empirical_exponent_sweep(model, 0.8, ns, all_cores());
  bool increasing = true;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    increasing = increasing && sweep[i].exponent > sweep[i - 1].exponent;
  const ExtReal last = sweep.back().exponent;
  const bool empirical_ok = last.is_finite() && std::abs(last.value() - rho) <= 0.15 && increasing;

  const double top = rho_high_rate(model, 1.0, step);
  const double top_oracle = testing::conditionally_uniform_minimum(table);
  const bool top_ok = std::abs(top - top_oracle) <= 1e-3 && std::abs(top - 0.737) <= 1e-3;

  std::ostringstream trend;
  for (const auto& pt : sweep) {
    trend << (pt.n == ns.front() ? "" : " ");
    if (pt.exponent.is_finite())
      trend << fmt("%.4f", pt.exponent.value());
    else
      trend << "+inf";
  }
  return {grid_ok && empirical_ok && top_ok,
          fmt("rho(0.8) %.7f vs 4x finer oracle %.7f [%s]; -(1/n)log2 e_A at n=2..12: %s vs rho, increasing: %s "
              "[%s]; rho(1.0) %.6f vs oracle %.6f [%s]",
              rho, finer, grid_ok ? "ok" : "off", trend.str().c_str(), increasing ? "yes" : "no",
              empirical_ok ? "ok" : "off", top, top_oracle, top_ok ? "ok" : "off")};
}

Outcome boundary_suite() {
  Rng rng(mix_seed(109, 0));
  std::vector<SingleLetterModel> models{SingleLetterModel::iid(dsbs(0.1), {2, 2}),
                                        SingleLetterModel::iid(dsbs(0.3), {2, 2})};
  for (int t = 0; t < 6; ++t) {
    const PairAlphabet a{2 + uniform_below(rng, 2), 1 + uniform_below(rng, 3)};
    models.push_back(SingleLetterModel::iid(testing::random_dist(rng, a.total()), a));
  }
  int checks = 0, nonzero = 0;
  for (const auto& model : models) {
    const auto& a = model.alphabet();
    const double h = conditional_entropy(model.p(), a.x1_size, a.x2_size);
    const double top = std::log2(static_cast<double>(a.x1_size));
    for (int i = 0; i <= 10; ++i) {
      const double below = h * i / 10.0;
      const double above = h + (top - h) * i / 10.0;
      ++checks;
      if (rho_high_rate(model, below, 0.05) != 0.0) ++nonzero;
      ++checks;
      if (rho_low_rate(model, above, 0.05) != 0.0) ++nonzero;
    }
  }
  return {nonzero == 0, fmt("%zu models, %d evaluations, %d nonzero", models.size(), checks, nonzero)};
}

Outcome determinism_suite() {
  const char* configs[] = {
      R"({"command":"optimal","seed":9,"model":{"kind":"iid","x1_size":3,"x2_size":2,"p":[0.3,0.05,0.1,0.05,0.1,0.4]},"params":{"n":2,"M":[2,3,5]}})",
      R"({"command":"multi","seed":9,"model":{"kind":"dsbs","crossover":0.2},"params":{"n":3,"M":[2,4],"k_max":2,"budget":500}})",
      R"({"command":"multi","seed":9,"model":{"kind":"iid","x1_size":4,"x2_size":2,"p":[0.2,0.05,0.1,0.15,0.05,0.2,0.1,0.15]},"params":{"M":2,"k_max":3}})",
      R"({"command":"sweep","seed":9,"model":{"kind":"dsbs","crossover":0.1},"params":{"R":0.8,"n_values":[2,4,6,8,10],"a":0.3}})",
      R"({"command":"exponent","seed":9,"model":{"kind":"dsbs","crossover":0.1},"params":{"rates":[0.2,0.5,0.8,1.0],"grid_step":0.05}})",
      R"({"command":"mixed","seed":9,"model":{"kind":"mixture","alpha":0.3,"components":[{"kind":"dsbs","crossover":0.02},{"kind":"dsbs","crossover":0.35}]},"params":{"R":0.5,"n_values":[4,6,8]}})",
  };
  int differing = 0, count = 0;
  for (const char* text : configs) {
    auto config = runner::parse_config(text);
    std::string csv[3];
    const unsigned workers[3] = {1, 1, 4};
    for (int run = 0; run < 3; ++run) {
      config.workers = workers[run];
      std::ostringstream out;
      runner::write_report(runner::run_experiment(config), out);
      csv[run] = out.str();
    }
    ++count;
    if (csv[0] != csv[1] || csv[0] != csv[2]) ++differing;
  }
  return {differing == 0, fmt("%d configs run twice at 1 worker and once at 4; differing outputs: %d", count, differing)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "variational identities", 30, variational_suite},
      {2, "recursive tilt, exhaustive", 60, tilt_suite},
      {3, "subadditive merge", 10, merge_suite},
      {4, "optimality certification", 300, certification_suite},
      {5, "ordering", 60, ordering_suite},
      {6, "mixed-source limiting error", 600, mixture_suite},
      {7, "exponent consistency", 600, exponent_suite},
      {8, "boundary triviality", 10, boundary_suite},
      {9, "determinism across worker counts", 120, determinism_suite},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.limit_seconds;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %d %s: %s (%.1f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                outcome.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
