#include "runner/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "runner/verify.hpp"
#include "sideinfo/codes.hpp"
#include "sideinfo/errors.hpp"
#include "sideinfo/multicode.hpp"
#include "sideinfo/oracles.hpp"

namespace sideinfo::runner {
namespace {

constexpr double kDefaultGridStep = 0.01;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  std::uint64_t lap() {
    if (!enabled_) return 0;
    const auto now = std::chrono::steady_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - start_).count();
    start_ = now;
    return static_cast<std::uint64_t>(ms);
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

double rate_of(std::uint64_t size, unsigned n) { return std::log2(static_cast<double>(size)) / n; }

struct Context {
  const ExperimentConfig& config;
  std::ostream& notes;
  Parallelism par;
  std::vector<ResultRow> rows;
  Stopwatch clock;

  void add(std::uint64_t n, std::uint64_t size, double rate, std::uint64_t k, const char* metric, double value) {
    rows.push_back({to_string(config.command), n, size, rate, k, metric, value, config.seed, clock.lap()});
  }
};

void run_optimal(Context& cx) {
  const auto& model = *cx.config.model;
  const unsigned n = cx.config.params.n.value_or(1);
  const Dist joint = block_joint(model, n);
  const PairAlphabet block = model.alphabet().block(n);
  for (std::uint64_t m : cx.config.params.sizes) {
    cx.add(n, m, rate_of(m, n), 0, "e_A", min_a_error(joint, block, m));
    cx.add(n, m, rate_of(m, n), 0, "e_B", optimal_b_code(joint, block, m, cx.par).error);
  }
}

// e_B_k rows when the search was exhaustive; `miss` rows when it fell back
// to the stochastic search and the value is only an upper bound.
void run_multi(Context& cx) {
  const auto& model = *cx.config.model;
  const Params& p = cx.config.params;
  const unsigned n = p.n.value_or(1);
  const Dist joint = block_joint(model, n);
  const PairAlphabet block = model.alphabet().block(n);
  const std::uint64_t k_low = p.k_max ? 0 : *p.k;
  const std::uint64_t k_high = p.k_max ? *p.k_max : *p.k;
  for (std::uint64_t m : p.sizes)
    for (std::uint64_t k = k_low; k <= k_high; ++k) {
      const auto r = best_multi_b(joint, block, m, k, p.budget.value_or(kDefaultSearchBudget), cx.config.seed, cx.par);
      cx.add(n, m, rate_of(m, n), k, r.search_mode == SearchMode::exhaustive ? "e_B_k" : "miss", r.miss_probability);
    }
}

void sweep_rows(Context& cx, double rate) {
  const auto& model = *cx.config.model;
  const Params& p = cx.config.params;
  const auto points = empirical_exponent_sweep(model, rate, p.n_values, cx.par);
  for (const auto& pt : points) {
    cx.add(pt.n, pt.size, rate, 0, "e_A", pt.e_a);
    if (cx.config.command == Command::sweep) cx.add(pt.n, pt.size, rate, 0, "exponent_est", pt.exponent.value());
  }
  if (cx.config.command == Command::sweep && p.a) {
    for (unsigned n : p.n_values) {
      const double r = min_size_for_error(block_joint(model, n), model.alphabet().block(n), *p.a, n);
      cx.add(n, 0, rate, 0, "R_n_a", r);
    }
  }
}

void run_exponent(Context& cx) {
  const auto& model = *cx.config.model;
  const Params& p = cx.config.params;
  std::vector<double> rates = p.rates;
  if (rates.empty()) rates.push_back(*p.rate);
  const double step = p.grid_step.value_or(kDefaultGridStep);
  const auto hi = exponent_curve(model, ExponentCurve::Kind::high_rate, rates, step, cx.par);
  const auto lo = exponent_curve(model, ExponentCurve::Kind::low_rate, rates, step, cx.par);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    cx.add(0, 0, rates[i], 0, "rho_hi", hi.points[i].second);
    cx.add(0, 0, rates[i], 0, "rho_lo", lo.points[i].second);
  }
  for (const auto* curve : {&hi, &lo}) {
    const char* name = curve == &hi ? "rho_hi" : "rho_lo";
    for (std::size_t j : detect_jumps(*curve, kJumpThreshold)) {
      const double left = rates[j - 1], right = rates[j];
      for (double r : rates)
        if (r >= left - step && r <= right + step)
          cx.notes << "note: " << name << " at R=" << format_real(r) << " is within grid_step of a jump between R="
                   << format_real(left) << " and R=" << format_real(right) << '\n';
    }
  }
}

void run_mixed(Context& cx) {
  const double rate = *cx.config.params.rate;
  cx.add(0, 0, rate, 0, "eps_pred", predicted_eps_mixed(*cx.config.model, rate));
  sweep_rows(cx, rate);
}

void run_probe(Context& cx) {
  const auto report =
      oracle::b_subadditivity_probe(cx.config.model->alphabet(), *cx.config.params.trials, cx.config.seed);
  cx.notes << "probe: " << oracle::to_string(report.verdict) << " after " << report.instances_checked
           << " code pairs\n";
  if (report.counterexample) {
    const auto& w = report.counterexample->witness;
    cx.notes << "probe: no B-code of size <= " << w.size_bound << " reproduces the union (" << w.partitions_tried
             << " binnings tried): " << w.explanation << '\n';
  }
}

void run_verify(Context& cx) {
  const auto checks = run_verify_suite(cx.config.seed, cx.par);
  std::uint64_t failed = 0;
  for (const auto& c : checks) {
    cx.notes << (c.failures == 0 ? "[ok]   " : "[FAIL] ") << c.name << ": " << c.cases << " cases";
    if (c.failures != 0) {
      cx.notes << ", " << c.failures << " violations";
      if (!c.detail.empty()) cx.notes << " (" << c.detail << ')';
      ++failed;
    }
    cx.notes << '\n';
  }
  if (failed != 0) throw VerifyFailure(std::to_string(failed) + " invariant checks failed");
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::ostream& notes) {
  validate(config);
  Context cx{config, notes, Parallelism{config.workers}, {}, Stopwatch(config.timings)};
  switch (config.command) {
    case Command::verify: run_verify(cx); break;
    case Command::optimal: run_optimal(cx); break;
    case Command::multi: run_multi(cx); break;
    case Command::sweep: sweep_rows(cx, *config.params.rate); break;
    case Command::exponent: run_exponent(cx); break;
    case Command::mixed: run_mixed(cx); break;
    case Command::probe: run_probe(cx); break;
  }
  return std::move(cx.rows);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  std::ostringstream discard;
  return run_experiment(config, discard);
}

}  // namespace sideinfo::runner
