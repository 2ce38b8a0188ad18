#include "runner/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "runner/config.hpp"
#include "runner/experiment.hpp"
#include "runner/report.hpp"
#include "sideinfo/codes.hpp"
#include "sideinfo/exponents.hpp"
#include "sideinfo/measures.hpp"
#include "sideinfo/multicode.hpp"
#include "sideinfo/oracles.hpp"
#include "sideinfo/rng.hpp"

namespace sideinfo::runner {
namespace {

// Tilt sequences are enumerated exhaustively up to these sizes here; the
// acceptance suite goes further.
constexpr std::size_t kTiltAlphabet = 4;
constexpr std::size_t kTiltLength = 4;
constexpr double kOracleSeconds = 60.0;

class Check {
 public:
  explicit Check(std::string name) { result_.name = std::move(name); }

  // Records one case; the message is built only on failure.
  template <typename Describe>
  void expect(bool ok, Describe&& describe) {
    ++result_.cases;
    if (ok) return;
    if (result_.failures++ == 0) result_.detail = describe();
  }
  void expect(bool ok, const char* what) {
    expect(ok, [&] { return std::string(what); });
  }
  void merge(const Check& other) {
    result_.cases += other.result_.cases;
    if (other.result_.failures != 0 && result_.failures == 0) result_.detail = other.result_.detail;
    result_.failures += other.result_.failures;
  }
  VerifyCheck done() && { return std::move(result_); }

 private:
  VerifyCheck result_;
};

std::string describe(const char* what, double got, double want) {
  std::ostringstream s;
  s.precision(17);
  s << what << ": got " << got << ", expected " << want;
  return s.str();
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1.0); }

Dist random_dist(Rng& rng, std::size_t size, double zero_chance = 0.0) {
  std::vector<double> p(size, 0.0);
  double total = 0.0;
  for (auto& v : p) {
    if (uniform01(rng) < zero_chance) continue;
    v = exponential01(rng) + 1e-3;
    total += v;
  }
  if (total == 0.0) {
    p[uniform_below(rng, size)] = 1.0;
    total = 1.0;
  }
  for (auto& v : p) v /= total;
  return Dist(p, kProbTolerance);
}

EventSet random_event(Rng& rng, std::size_t size) {
  EventSet e(size);
  for (std::size_t i = 0; i < size; ++i)
    if (rng() & 1U) e.set(i);
  if (e.none()) e.set(uniform_below(rng, size));
  return e;
}

ACode random_a_code(Rng& rng, const PairAlphabet& a, std::uint64_t size) {
  std::vector<Message> enc(a.total());
  for (auto& m : enc) m = static_cast<Message>(uniform_below(rng, size));
  std::vector<Symbol> dec(size * a.x2_size);
  for (auto& x : dec) x = static_cast<Symbol>(uniform_below(rng, a.x1_size));
  return ACode(a, size, std::move(enc), std::move(dec));
}

BCode random_b_code(Rng& rng, const PairAlphabet& a, std::uint64_t size) {
  std::vector<Message> enc(a.x1_size);
  for (auto& m : enc) m = static_cast<Message>(uniform_below(rng, size));
  std::vector<Symbol> dec(size * a.x2_size);
  for (auto& x : dec) x = static_cast<Symbol>(uniform_below(rng, a.x1_size));
  return BCode(a, size, std::move(enc), std::move(dec));
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// ---- measures

VerifyCheck divergence_bounds(std::uint64_t seed) {
  Check c("kl_divergence >= 0 and G >= 1, equality only at nu = mu");
  Rng rng(mix_seed(seed, 1));
  for (int t = 0; t < 10000; ++t) {
    const auto size = 1 + uniform_below(rng, 8);
    const auto nu = random_dist(rng, size, 0.2);
    const auto mu = random_dist(rng, size, 0.2);
    const double d = kl_divergence(nu, mu).value();
    const double g = g_functional(nu, mu).value();
    c.expect(d >= 0.0, [&] { return describe("negative divergence", d, 0.0); });
    c.expect(g >= 1.0 - 1e-12, [&] { return describe("G below 1", g, 1.0); });
    c.expect(kl_divergence(mu, mu).value() == 0.0, "D(mu||mu) != 0");
    c.expect(close(g_functional(mu, mu).value(), 1.0, 1e-12), "G(mu||mu) != 1");
    if (d == 0.0) c.expect(nu.approx_equal(mu, 1e-6), "zero divergence between different measures");
  }
  return std::move(c).done();
}

VerifyCheck variational_identities(std::uint64_t seed) {
  Check c("restriction attains min D = -log2 mu(B) and min G = 1/mu(B); 10^5 samples never beat them");
  Rng rng(mix_seed(seed, 2));
  for (int t = 0; t < 100; ++t) {
    const auto size = 1 + uniform_below(rng, 8);
    const auto mu = random_dist(rng, size, 0.2);
    auto event = random_event(rng, size);
    if (mu.mass(event) == 0.0) event = EventSet::full(size);
    const auto r = oracle::sample_variational_identity(mu, event, 1000, mix_seed(seed, 1000 + t));
    c.expect(r.violations == 0, [&] { return describe("sampled measures beat the bound", r.violations, 0); });
    c.expect(close_rel(r.g_at_restriction, r.g_bound, 1e-12),
             [&] { return describe("G at the restriction", r.g_at_restriction, r.g_bound); });
    c.expect(close_rel(r.d_at_restriction, r.d_bound, 1e-12) || close(r.d_at_restriction, r.d_bound, 1e-12),
             [&] { return describe("D at the restriction", r.d_at_restriction, r.d_bound); });
  }
  return std::move(c).done();
}

VerifyCheck tilt_matches_restriction(std::uint64_t seed, Parallelism par) {
  Check total("recursive tilt terminal = restriction on the intersection, divergence = accumulated log-mass");
  Rng rng(mix_seed(seed, 3));
  for (std::size_t size = 1; size <= kTiltAlphabet; ++size) {
    const std::uint64_t subsets = std::uint64_t{1} << size;
    const Dist u = Dist::uniform(size);
    for (double zero_chance : {0.0, 0.3}) {
      const Dist mu = random_dist(rng, size, zero_chance);
      for (std::size_t length = 1; length <= kTiltLength; ++length) {
        std::uint64_t sequences = 1;
        for (std::size_t i = 0; i < length; ++i) sequences *= subsets;
        std::mutex lock;
        const std::size_t chunks = 16;
        for_each_chunk(sequences, chunks, par, [&](std::size_t, std::uint64_t begin, std::uint64_t end) {
          Check local("");
          std::vector<EventSet> events(length);
          for (std::uint64_t s = begin; s < end; ++s) {
            EventSet all = EventSet::full(size);
            std::uint64_t code = s;
            for (std::size_t i = 0; i < length; ++i, code /= subsets) {
              events[i] = EventSet::from_mask(code % subsets, size);
              all &= events[i];
            }
            const auto trace = recursive_tilt(mu, u, events);
            if (trace.fallback_level) continue;
            local.expect(trace.terminal.approx_equal(conditional_restriction(mu, all, u), 1e-12),
                         "terminal differs from the one-shot restriction");
            const auto kl = kl_divergence(trace.terminal, mu);
            local.expect(kl.is_finite() && close(trace.divergence_bits.value(), kl.value(), 1e-9),
                         [&] { return describe("accumulated divergence", trace.divergence_bits.value(), kl.value()); });
          }
          std::lock_guard guard(lock);
          total.merge(local);
        });
      }
    }
  }
  return std::move(total).done();
}

VerifyCheck extensions(std::uint64_t seed) {
  Check c("extensions are distributions and conditional entropy is additive over products");
  Rng rng(mix_seed(seed, 4));
  for (int t = 0; t < 50; ++t) {
    const PairAlphabet letter{2 + uniform_below(rng, 2), 1 + uniform_below(rng, 3)};
    const auto p = random_dist(rng, letter.total(), 0.1);
    const auto p2 = random_dist(rng, letter.total(), 0.1);
    const double h1 = conditional_entropy(p, letter.x1_size, letter.x2_size);
    for (unsigned n = 1; n <= 3; ++n) {
      const auto block = letter.block(n);
      const auto ext = iid_extension(p, n);
      const auto mix = mixture_extension(0.3, p, p2, n);
      c.expect(close(compensated_sum(ext.probs()), 1.0, 1e-12), "iid extension mass");
      c.expect(close(compensated_sum(mix.probs()), 1.0, 1e-12), "mixture extension mass");
      const auto q = regroup_pair_blocks(ext, letter, n);
      const double hn = conditional_entropy(q, block.x1_size, block.x2_size);
      c.expect(close(hn, n * h1, 1e-9), [&] { return describe("product conditional entropy", hn, n * h1); });
    }
  }
  return std::move(c).done();
}

// ---- codes

VerifyCheck a_profile(std::uint64_t seed) {
  Check c("e_A nonincreasing to 0 at M = |X1|, e_B(M;0) >= e_A(M), min_size_for_error consistent");
  Rng rng(mix_seed(seed, 5));
  for (int t = 0; t < 100; ++t) {
    const PairAlphabet a{1 + uniform_below(rng, 5), 1 + uniform_below(rng, 3)};
    const auto joint = random_dist(rng, a.total(), 0.2);
    const auto profile = min_a_error_profile(joint, a);
    c.expect(profile.back() == 0.0, [&] { return describe("e_A(|X1|)", profile.back(), 0.0); });
    for (std::size_t m = 1; m <= a.x1_size; ++m) {
      if (m > 1) c.expect(profile[m - 1] <= profile[m - 2], "e_A increased with M");
      const double eb = optimal_b_code(joint, a, m).error;
      c.expect(eb >= profile[m - 1] - 1e-12, [&] { return describe("e_B(M;0) below e_A(M)", eb, profile[m - 1]); });
      const double r = min_size_for_error(joint, a, 1.0 - profile[m - 1]);
      c.expect(r <= std::log2(static_cast<double>(m)) + 1e-12,
               [&] { return describe("min_size_for_error at 1 - e_A(M)", r, std::log2(static_cast<double>(m))); });
    }
    double last = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double r = min_size_for_error(joint, a, 0.05 * i);
      c.expect(r >= last, "min_size_for_error decreased in a");
      last = r;
    }
  }
  return std::move(c).done();
}

VerifyCheck merges(std::uint64_t seed) {
  Check c("merged A-codes: size is the sum, correct set is the union");
  Rng rng(mix_seed(seed, 6));
  for (int t = 0; t < 1000; ++t) {
    const PairAlphabet a{1 + uniform_below(rng, 4), 1 + uniform_below(rng, 4)};
    const auto c1 = random_a_code(rng, a, 1 + uniform_below(rng, 4));
    const auto c2 = random_a_code(rng, a, 1 + uniform_below(rng, 4));
    const auto merged = merge_a_codes(c1, c2, a);
    c.expect(merged.size() == c1.size() + c2.size(), "merged size");
    c.expect(correct_set(merged, a).bits == (correct_set(c1, a).bits | correct_set(c2, a).bits),
             "merged correct set");
  }
  return std::move(c).done();
}

VerifyCheck b_embedding(std::uint64_t seed) {
  Check c("b_to_a keeps the correct set bit for bit and the error exactly");
  Rng rng(mix_seed(seed, 7));
  for (int t = 0; t < 500; ++t) {
    const PairAlphabet a{1 + uniform_below(rng, 5), 1 + uniform_below(rng, 4)};
    const auto joint = random_dist(rng, a.total(), 0.2);
    const auto b = random_b_code(rng, a, 1 + uniform_below(rng, 4));
    const auto as_a = b_to_a(b);
    c.expect(correct_set(as_a, a) == correct_set(b, a), "correct sets differ");
    c.expect(error_probability(as_a, joint, a) == error_probability(b, joint, a), "errors differ");
  }
  return std::move(c).done();
}

// ---- multicode

VerifyCheck multi_monotone(std::uint64_t seed, Parallelism par) {
  Check c("e_B(M;k) nonincreasing in k and M, e_B(M;0) >= e_A(M)");
  Rng rng(mix_seed(seed, 8));
  for (int t = 0; t < 25; ++t) {
    const PairAlphabet a{2 + uniform_below(rng, 3), 1 + uniform_below(rng, 3)};
    const auto joint = random_dist(rng, a.total(), 0.2);
    std::vector<double> prev;
    for (std::uint64_t m = 1; m <= a.x1_size; ++m) {
      std::vector<double> row;
      for (std::uint64_t k = 0; k <= 2; ++k)
        row.push_back(best_multi_b(joint, a, m, k, kDefaultSearchBudget, seed, par).miss_probability);
      c.expect(row[0] >= min_a_error(joint, a, m) - 1e-12, "e_B(M;0) below e_A(M)");
      for (std::size_t k = 1; k < row.size(); ++k) c.expect(row[k] <= row[k - 1] + 1e-12, "increased with k");
      for (std::size_t k = 0; k < prev.size(); ++k) c.expect(row[k] <= prev[k] + 1e-12, "increased with M");
      prev = row;
    }
  }
  return std::move(c).done();
}

// A fixed instance set: the 90% rate is a property of the set, not of every seed.
VerifyCheck stochastic_vs_exhaustive(Parallelism par) {
  Check c("stochastic search >= exhaustive, equal on at least 90% of a fixed instance set");
  const std::uint64_t seed = 33;
  Rng rng(mix_seed(seed, 0));
  const int instances = 20;
  int equal = 0;
  for (int t = 0; t < instances; ++t) {
    const PairAlphabet a{4 + uniform_below(rng, 2), 2};
    const auto joint = random_dist(rng, a.total());
    const auto exact = best_multi_b(joint, a, 2, 1, kDefaultSearchBudget, seed, par);
    const auto sampled = best_multi_b(joint, a, 2, 1, 32, seed, par);
    c.expect(exact.search_mode == SearchMode::exhaustive && sampled.search_mode == SearchMode::stochastic,
             "search modes");
    c.expect(sampled.miss_probability >= exact.miss_probability - 1e-12,
             [&] { return describe("stochastic below exhaustive", sampled.miss_probability, exact.miss_probability); });
    if (sampled.miss_probability <= exact.miss_probability + 1e-12) ++equal;
  }
  c.expect(equal * 10 >= instances * 9, [&] { return describe("equal instances", equal, 0.9 * instances); });
  return std::move(c).done();
}

VerifyCheck duplicated_codes(std::uint64_t seed) {
  Check c("k+1 copies of one B-code miss exactly its error");
  Rng rng(mix_seed(seed, 10));
  for (int t = 0; t < 200; ++t) {
    const PairAlphabet a{1 + uniform_below(rng, 5), 1 + uniform_below(rng, 3)};
    const auto joint = random_dist(rng, a.total(), 0.2);
    const auto b = random_b_code(rng, a, 1 + uniform_below(rng, 3));
    const std::vector<BCode> copies(1 + uniform_below(rng, 3), b);
    c.expect(joint_miss_probability(copies, joint, a) == error_probability(b, joint, a),
             "miss of copies differs from the error");
  }
  return std::move(c).done();
}

// ---- exponents

VerifyCheck rate_functions(Parallelism par) {
  Check c("rho_hi nondecreasing, rho_lo nonincreasing, both 0 at H(X1|X2); minimizers certify values");
  const PairAlphabet letter{3, 2};
  const std::vector<SingleLetterModel> models{
      SingleLetterModel::iid(dsbs(0.1), {2, 2}),
      SingleLetterModel::iid(Dist({0.3, 0.05, 0.1, 0.05, 0.1, 0.4}), letter)};
  for (const auto& model : models) {
    const auto& a = model.alphabet();
    const double h = conditional_entropy(model.p(), a.x1_size, a.x2_size);
    const double top = std::log2(static_cast<double>(a.x1_size));
    std::vector<double> rates;
    for (int i = 0; i <= 8; ++i) rates.push_back(top * i / 8.0);
    const auto hi = exponent_curve(model, ExponentCurve::Kind::high_rate, rates, 0.05, par);
    const auto lo = exponent_curve(model, ExponentCurve::Kind::low_rate, rates, 0.05, par);
    for (std::size_t i = 1; i < rates.size(); ++i) {
      c.expect(hi.points[i].second >= hi.points[i - 1].second - 1e-9, "rho_hi decreased");
      c.expect(lo.points[i].second <= lo.points[i - 1].second + 1e-9, "rho_lo increased");
    }
    c.expect(rho_high_rate(model, h, 0.05) == 0.0, "rho_hi(H) != 0");
    c.expect(rho_low_rate(model, h, 0.05) == 0.0, "rho_lo(H) != 0");
    for (double r : rates) {
      for (bool high : {true, false}) {
        const auto found = high ? minimize_high_rate(model, r, 0.05) : minimize_low_rate(model, r, 0.05);
        if (!std::isfinite(found.value)) continue;
        const Dist q(found.minimizer, 1e-9);
        const double hq = conditional_entropy(q, a.x1_size, a.x2_size);
        c.expect(high ? hq >= r - 1e-6 : hq <= r + 1e-6, [&] { return describe("constraint at the minimizer", hq, r); });
        const double d = kl_divergence(q, model.p()).value();
        c.expect(close(d, found.value, 1e-4), [&] { return describe("recomputed divergence", d, found.value); });
      }
    }
  }
  return std::move(c).done();
}

VerifyCheck mixture_limit(Parallelism par) {
  Check c("predicted mixture error is a component weight; e_A at n = 12 within 0.1 of it");
  const double alpha = 0.5;
  const auto mix = SingleLetterModel::mixture(alpha, dsbs(0.02), dsbs(0.35), {2, 2});
  for (double r : {0.05, 0.5, 0.99}) {
    const double eps = predicted_eps_mixed(mix, r);
    c.expect(eps == 0.0 || eps == 1.0 || eps == alpha || eps == 1.0 - alpha, "prediction is not a weight");
  }
  const std::vector<unsigned> ns{12};
  const auto sweep = empirical_exponent_sweep(mix, 0.5, ns, par);
  const double eps = predicted_eps_mixed(mix, 0.5);
  c.expect(close(sweep[0].e_a, eps, 0.1), [&] { return describe("e_A at n = 12", sweep[0].e_a, eps); });
  return std::move(c).done();
}

// ---- oracles

VerifyCheck oracle_agreement(std::uint64_t seed, Parallelism par) {
  Check c("optimizers equal the brute-force oracles (e_A, e_B(M;0), e_B(M;k)), each within 60 s");
  Rng rng(mix_seed(seed, 11));
  for (int t = 0; t < 30; ++t) {
    const PairAlphabet a{1 + uniform_below(rng, 3), 1 + uniform_below(rng, 2)};
    const auto joint = random_dist(rng, a.total(), 0.2);
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t m = 1; m <= 2; ++m) {
      const double ea = optimal_a_code(joint, a, m).error, oa = oracle::enumerate_a_codes(joint, a, m);
      c.expect(close_rel(ea, oa, 1e-12), [&] { return describe("e_A vs enumeration", ea, oa); });
      for (std::uint64_t k = 0; k <= 1; ++k) {
        const double eb = best_multi_b(joint, a, m, k, kDefaultSearchBudget, seed, par).miss_probability;
        const double ob = oracle::enumerate_b_tuples(joint, a, m, k);
        c.expect(close_rel(eb, ob, 1e-12), [&] { return describe("e_B(M;k) vs enumeration", eb, ob); });
      }
      const double b0 = optimal_b_code(joint, a, m, par).error, o0 = oracle::enumerate_b_tuples(joint, a, m, 0);
      c.expect(close_rel(b0, o0, 1e-12), [&] { return describe("optimal_b_code vs enumeration", b0, o0); });
    }
    const double took = seconds_since(start);
    c.expect(took <= kOracleSeconds, [&] { return describe("oracle instance seconds", took, kOracleSeconds); });
  }
  return std::move(c).done();
}

// ---- report and runner

VerifyCheck report_round_trip(std::uint64_t seed) {
  Check c("CSV rows round-trip at 12 significant digits");
  Rng rng(mix_seed(seed, 12));
  std::vector<ResultRow> rows;
  for (int t = 0; t < 200; ++t) {
    const double v = t % 17 == 0 ? std::numeric_limits<double>::infinity() : uniform01(rng) * std::exp2(-20.0 * uniform01(rng));
    rows.push_back({"sweep", static_cast<std::uint64_t>(t), 2 + static_cast<std::uint64_t>(t), uniform01(rng), 0,
                    "e_A", v, seed, 0});
  }
  std::ostringstream out;
  write_report(rows, out);
  const auto back = parse_report(out.str());
  c.expect(back.size() == rows.size(), "row count");
  for (std::size_t i = 0; i < std::min(back.size(), rows.size()); ++i) {
    c.expect(back[i].value == rows[i].value || close_rel(back[i].value, rows[i].value, 1e-11), "value");
    c.expect(format_real(back[i].value) == format_real(rows[i].value), "reformatted value");
  }
  return std::move(c).done();
}

VerifyCheck worker_independence(std::uint64_t seed) {
  Check c("identical CSV bytes at 1 and 3 workers");
  const char* configs[] = {
      R"({"command":"optimal","model":{"kind":"iid","x1_size":3,"x2_size":2,"p":[0.3,0.05,0.1,0.05,0.1,0.4]},"params":{"n":2,"M":[2,3,4]}})",
      R"({"command":"multi","model":{"kind":"dsbs","crossover":0.2},"params":{"n":2,"M":2,"k_max":2,"budget":64}})",
      R"({"command":"sweep","model":{"kind":"dsbs","crossover":0.1},"params":{"R":0.8,"n_values":[2,4,6,8],"a":0.5}})",
  };
  for (const char* text : configs) {
    auto config = parse_config(text);
    config.seed = seed;
    std::string out[2];
    for (int w = 0; w < 2; ++w) {
      config.workers = w == 0 ? 1 : 3;
      std::ostringstream s;
      write_report(run_experiment(config), s);
      out[w] = s.str();
    }
    c.expect(out[0] == out[1], [&] { return std::string("output differs for ") + text; });
  }
  return std::move(c).done();
}

}  // namespace

std::vector<VerifyCheck> run_verify_suite(std::uint64_t seed, Parallelism par) {
  std::vector<VerifyCheck> checks;
  checks.push_back(divergence_bounds(seed));
  checks.push_back(variational_identities(seed));
  checks.push_back(tilt_matches_restriction(seed, par));
  checks.push_back(extensions(seed));
  checks.push_back(a_profile(seed));
  checks.push_back(merges(seed));
  checks.push_back(b_embedding(seed));
  checks.push_back(multi_monotone(seed, par));
  checks.push_back(stochastic_vs_exhaustive(par));
  checks.push_back(duplicated_codes(seed));
  checks.push_back(rate_functions(par));
  checks.push_back(mixture_limit(par));
  checks.push_back(oracle_agreement(seed, par));
  checks.push_back(report_round_trip(seed));
  checks.push_back(worker_independence(seed));
  return checks;
}

}  // namespace sideinfo::runner
