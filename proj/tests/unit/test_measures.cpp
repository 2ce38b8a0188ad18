#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "sideinfo/errors.hpp"
#include "sideinfo/measures.hpp"

using namespace sideinfo;

namespace {

EventSet members(std::size_t size, std::initializer_list<std::size_t> ids) {
  EventSet e(size);
  for (auto i : ids) e.set(i);
  return e;
}

}  // namespace

TEST_CASE("Dist validates its table") {
  CHECK_NOTHROW(Dist({0.25, 0.75}));
  CHECK_THROWS_AS(Dist({0.5, 0.6}), ArgumentError);
  CHECK_THROWS_AS(Dist({-0.1, 1.1}), ArgumentError);
  CHECK_THROWS_AS(Dist(std::vector<double>{}), ArgumentError);
  CHECK_THROWS_AS(Dist({std::nan(""), 1.0}), ArgumentError);
  // within the 1e-12 sum tolerance
  CHECK_NOTHROW(Dist({0.5, 0.5 + 5e-13}));
  CHECK_THROWS_AS(Dist({0.5, 0.5 + 1e-10}), ArgumentError);
}

TEST_CASE("ExtReal rejects NaN and orders infinity last") {
  CHECK_THROWS_AS(ExtReal(std::nan("")), ArgumentError);
  CHECK(ExtReal(3.0) < ExtReal::infinity());
  CHECK(ExtReal::infinity().is_infinite());
}

TEST_CASE("kl_divergence examples") {
  const Dist half({0.5, 0.5});
  CHECK(kl_divergence(half, half).value() == 0.0);
  CHECK(kl_divergence(Dist({1.0, 0.0}), half).value() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kl_divergence(Dist({0.75, 0.25}), half).value() == doctest::Approx(0.18872187554086717).epsilon(1e-12));
  CHECK(kl_divergence(half, Dist({1.0, 0.0})).is_infinite());
  CHECK_THROWS_AS(kl_divergence(half, Dist::uniform(3)), ArgumentError);
}

TEST_CASE("g_functional examples") {
  const Dist half({0.5, 0.5});
  CHECK(g_functional(half, half).value() == doctest::Approx(1.0));
  CHECK(g_functional(Dist({1.0, 0.0}), half).value() == doctest::Approx(2.0));
  CHECK(g_functional(Dist({0.75, 0.25}), half).value() == doctest::Approx(1.25));
  CHECK(g_functional(half, Dist({0.0, 1.0})).is_infinite());
  // 0^2/0 counts as zero
  CHECK(g_functional(Dist({0.0, 1.0}), Dist({0.0, 1.0})).value() == doctest::Approx(1.0));
  CHECK_THROWS_AS(g_functional(half, Dist::uniform(3)), ArgumentError);
}

TEST_CASE("conditional_restriction examples") {
  const auto u4 = Dist::uniform(4);
  auto r = conditional_restriction(u4, members(4, {0, 1}), u4);
  CHECK(r.approx_equal(Dist({0.5, 0.5, 0.0, 0.0}), 1e-15));

  r = conditional_restriction(Dist({0.1, 0.2, 0.3, 0.4}), members(4, {1, 3}), u4);
  CHECK(r.approx_equal(Dist({0.0, 1.0 / 3.0, 0.0, 2.0 / 3.0}), 1e-12));
  CHECK(r.mass(members(4, {1, 3})) == doctest::Approx(1.0));

  const Dist fallback({0.0, 1.0});
  r = conditional_restriction(Dist({1.0, 0.0}), members(2, {1}), fallback);
  CHECK(r == fallback);

  CHECK_THROWS_AS(conditional_restriction(u4, members(3, {0}), u4), ArgumentError);
  CHECK_THROWS_AS(conditional_restriction(u4, members(4, {0}), Dist::uniform(3)), ArgumentError);
}

TEST_CASE("recursive_tilt examples") {
  const auto mu = Dist::uniform(4);
  const auto u = Dist::point_mass(4, 3);

  SUBCASE("two nested events") {
    const std::vector<EventSet> events{members(4, {0, 1, 2}), members(4, {1, 2})};
    const auto trace = recursive_tilt(mu, u, events);
    CHECK_FALSE(trace.fallback_level.has_value());
    CHECK(trace.terminal.approx_equal(Dist({0.0, 0.5, 0.5, 0.0}), 1e-15));
    CHECK(trace.divergence_bits.value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kl_divergence(trace.terminal, mu).value() == doctest::Approx(trace.divergence_bits.value()).epsilon(1e-12));
    REQUIRE(trace.levels.size() == 2);
    CHECK(trace.levels[0].mass == doctest::Approx(0.75));
    CHECK(trace.levels[1].mass == doctest::Approx(2.0 / 3.0));
    for (const auto& level : trace.levels) CHECK(level.mass == level.measure.mass(level.event));
  }

  SUBCASE("no events") {
    const auto trace = recursive_tilt(mu, u, {});
    CHECK(trace.terminal == mu);
    CHECK(trace.divergence_bits.value() == 0.0);
    CHECK(trace.levels.empty());
  }

  SUBCASE("zero-mass step falls back") {
    const Dist half({0.5, 0.5});
    const Dist fallback({0.3, 0.7});
    const std::vector<EventSet> events{members(2, {0}), members(2, {1})};
    const auto trace = recursive_tilt(half, fallback, events);
    REQUIRE(trace.fallback_level.has_value());
    CHECK(*trace.fallback_level == 1);
    CHECK(trace.terminal == fallback);
    CHECK(trace.levels[1].mass == 0.0);
  }

  SUBCASE("measure already equal to u is replaced by u") {
    const std::vector<EventSet> events{members(4, {0, 1})};
    const auto trace = recursive_tilt(mu, mu, events);
    REQUIRE(trace.fallback_level.has_value());
    CHECK(*trace.fallback_level == 0);
    CHECK(trace.terminal == mu);
  }
}

TEST_CASE("extensions") {
  CHECK(iid_extension(Dist({0.5, 0.5}), 2).approx_equal(Dist::uniform(4), 1e-15));
  CHECK(iid_extension(Dist({0.7, 0.3}), 2).approx_equal(Dist({0.49, 0.21, 0.21, 0.09}), 1e-15));
  const Dist p({0.2, 0.3, 0.5});
  CHECK(iid_extension(p, 1) == p);
  CHECK_THROWS_AS(iid_extension(p, 0), ArgumentError);
  CHECK_THROWS_AS(iid_extension(Dist::uniform(2), 25), ResourceError);

  CHECK(mixture_extension(0.5, p, p, 3).approx_equal(iid_extension(p, 3), 1e-15));
  CHECK_THROWS_AS(mixture_extension(1.0, p, p, 2), ArgumentError);
  CHECK_THROWS_AS(mixture_extension(0.0, p, p, 2), ArgumentError);
  CHECK(mixture_extension(0.5, Dist({1.0, 0.0}), Dist({0.0, 1.0}), 1).approx_equal(Dist({0.5, 0.5}), 0.0));
}

TEST_CASE("regroup_pair_blocks puts x1 blocks first") {
  // letter alphabet 2x2 with p(x1,x2) distinct entries
  const PairAlphabet letter{2, 2};
  const Dist p({0.1, 0.2, 0.3, 0.4});
  const auto block = regroup_pair_blocks(iid_extension(p, 2), letter, 2);
  const auto big = letter.block(2);
  for (std::uint64_t a1 = 0; a1 < 2; ++a1)
    for (std::uint64_t a2 = 0; a2 < 2; ++a2)
      for (std::uint64_t b1 = 0; b1 < 2; ++b1)
        for (std::uint64_t b2 = 0; b2 < 2; ++b2) {
          // x1 block (a1 a2), x2 block (b1 b2)
          const double expected = p[a1 * 2 + b1] * p[a2 * 2 + b2];
          CHECK(block[big.index(a1 * 2 + a2, b1 * 2 + b2)] == doctest::Approx(expected).epsilon(1e-15));
        }
}

TEST_CASE("conditional_entropy examples") {
  CHECK(conditional_entropy(Dist::uniform(4), 2, 2) == doctest::Approx(1.0));
  CHECK(conditional_entropy(Dist({0.5, 0.0, 0.0, 0.5}), 2, 2) == doctest::Approx(0.0));
  CHECK(conditional_entropy(Dist({0.45, 0.05, 0.05, 0.45}), 2, 2) ==
        doctest::Approx(0.4689955935892812).epsilon(1e-12));
  CHECK_THROWS_AS(conditional_entropy(Dist::uniform(4), 3, 2), ArgumentError);
}

TEST_CASE("padding outcome") {
  const auto padded = with_padding_outcome(Dist({0.25, 0.75}));
  CHECK(padded.size() == 3);
  CHECK(padded[2] == 0.0);
  CHECK(padded[1] == 0.75);
}

TEST_CASE("property: divergence and G lower bounds on random pairs") {
  Rng rng(mix_seed(11, 0));
  for (int trial = 0; trial < 10000; ++trial) {
    const auto size = 1 + uniform_below(rng, 8);
    const auto nu = testing::random_dist(rng, size, 0.2);
    const auto mu = testing::random_dist(rng, size, 0.2);
    const auto d = kl_divergence(nu, mu);
    const auto g = g_functional(nu, mu);
    CHECK(d.value() >= 0.0);
    CHECK(g.value() >= 1.0 - 1e-12);
    CHECK(kl_divergence(mu, mu).value() == 0.0);
    CHECK(g_functional(mu, mu).value() == doctest::Approx(1.0).epsilon(1e-12));
    if (d.value() == 0.0) CHECK(nu.approx_equal(mu, 1e-6));
  }
}

TEST_CASE("property: restriction attains the variational minima") {
  Rng rng(mix_seed(12, 0));
  for (int trial = 0; trial < 200; ++trial) {
    const auto size = 1 + uniform_below(rng, 8);
    const auto mu = testing::random_dist(rng, size, 0.2);
    auto event = testing::random_event(rng, size);
    if (mu.mass(event) == 0.0) continue;
    const auto r = conditional_restriction(mu, event, Dist::uniform(size));
    const double b = mu.mass(event);
    CHECK(g_functional(r, mu).value() == doctest::Approx(1.0 / b).epsilon(1e-12));
    CHECK(kl_divergence(r, mu).value() == doctest::Approx(-std::log2(b)).epsilon(1e-12));
  }
}

TEST_CASE("property: tilt terminal matches one-shot restriction on small alphabets") {
  Rng rng(mix_seed(13, 0));
  for (int trial = 0; trial < 2000; ++trial) {
    const auto size = 1 + uniform_below(rng, 6);
    const auto mu = testing::random_dist(rng, size, 0.25);
    const auto u = Dist::uniform(size);
    std::vector<EventSet> events;
    const auto length = uniform_below(rng, 5);
    EventSet all = EventSet::full(size);
    for (std::uint64_t i = 0; i < length; ++i) {
      events.push_back(testing::random_event(rng, size, false));
      all &= events.back();
    }
    const auto trace = recursive_tilt(mu, u, events);
    if (trace.fallback_level) continue;
    CHECK(trace.terminal.approx_equal(conditional_restriction(mu, all, u), 1e-12));
    const auto kl = kl_divergence(trace.terminal, mu);
    REQUIRE(kl.is_finite());
    CHECK(std::abs(trace.divergence_bits.value() - kl.value()) <= 1e-9);
  }
}

TEST_CASE("property: product entropy is additive") {
  Rng rng(mix_seed(14, 0));
  for (int trial = 0; trial < 50; ++trial) {
    const PairAlphabet letter{2 + uniform_below(rng, 2), 1 + uniform_below(rng, 3)};
    const auto p = testing::random_dist(rng, letter.total(), 0.1);
    const double h1 = conditional_entropy(p, letter.x1_size, letter.x2_size);
    for (unsigned n = 1; n <= 3; ++n) {
      const auto block = letter.block(n);
      const auto q = regroup_pair_blocks(iid_extension(p, n), letter, n);
      CHECK(std::abs(conditional_entropy(q, block.x1_size, block.x2_size) - n * h1) <= 1e-9);
      CHECK(compensated_sum(q.probs()) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}
