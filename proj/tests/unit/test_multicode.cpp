#include <doctest.h>

#include <vector>

#include "generators.hpp"
#include "sideinfo/codes.hpp"
#include "sideinfo/errors.hpp"
#include "sideinfo/multicode.hpp"
#include "sideinfo/oracles.hpp"
#include "sideinfo/partitions.hpp"

using namespace sideinfo;

namespace {

const PairAlphabet k3x2{3, 2};
Dist example_joint() { return Dist({0.3, 0.05, 0.1, 0.05, 0.1, 0.4}); }

BCode constant_b_code(const PairAlphabet& a, Symbol x1) {
  return BCode(a, 1, std::vector<Message>(a.x1_size, 0), std::vector<Symbol>(a.x2_size, x1));
}

}  // namespace

TEST_CASE("joint_miss_probability examples") {
  const auto c = optimal_b_code(example_joint(), k3x2, 2).code;
  const std::vector<BCode> triple{c, c, c};
  CHECK(joint_miss_probability(triple, example_joint(), k3x2) == error_probability(c, example_joint(), k3x2));

  const std::vector<BCode> rows{constant_b_code(k3x2, 0), constant_b_code(k3x2, 1)};
  CHECK(joint_miss_probability(rows, Dist::uniform(6), k3x2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const std::vector<BCode> with_perfect{c, BCode(k3x2, 3, {0, 1, 2}, {0, 0, 1, 1, 2, 2})};
  CHECK(joint_miss_probability(with_perfect, example_joint(), k3x2) == 0.0);

  CHECK_THROWS_AS(joint_miss_probability(std::vector<BCode>{}, example_joint(), k3x2), ArgumentError);
}

TEST_CASE("best_multi_b on the 3x2 example") {
  const auto joint = example_joint();
  const auto k0 = best_multi_b(joint, k3x2, 2, 0, kDefaultSearchBudget, 1);
  CHECK(k0.search_mode == SearchMode::exhaustive);
  CHECK(k0.miss_probability == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(k0.codes.size() == 1);

  const auto k1 = best_multi_b(joint, k3x2, 2, 1, kDefaultSearchBudget, 1);
  CHECK(k1.search_mode == SearchMode::exhaustive);
  CHECK(k1.codes.size() == 2);
  CHECK(k1.miss_probability == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(k1.miss_probability == joint_miss_probability(k1.codes, joint, k3x2));

  CHECK(best_multi_b(joint, k3x2, 1, 0, kDefaultSearchBudget, 1).miss_probability == doctest::Approx(0.3));
  CHECK(best_multi_b(joint, k3x2, 1, 1, kDefaultSearchBudget, 1).miss_probability == doctest::Approx(0.15));
  CHECK(best_multi_b(joint, k3x2, 3, 2, kDefaultSearchBudget, 1).miss_probability == 0.0);
}

TEST_CASE("MAP decoders per code are not jointly optimal") {
  // e_B(1;1) = 0.15 needs one code to decode x1=2 at y=0 even though x1=0 is
  // the MAP choice there.
  const auto joint = example_joint();
  const std::vector<BCode> maps{constant_b_code(k3x2, 0), map_decoder(std::vector<Message>{0, 0, 0}, joint, k3x2, 1)};
  const auto result = best_multi_b(joint, k3x2, 1, 1, kDefaultSearchBudget, 1);
  CHECK(result.miss_probability < joint_miss_probability(maps, joint, k3x2));
}

TEST_CASE("optimal_joint_decoders covers the most mass per column") {
  const auto joint = example_joint();
  const std::vector<std::vector<Message>> encoders{{0, 0, 0}, {0, 0, 0}};
  const auto codes = optimal_joint_decoders(encoders, joint, k3x2, 1);
  CHECK(joint_miss_probability(codes, joint, k3x2) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK_THROWS_AS(optimal_joint_decoders(std::vector<std::vector<Message>>{}, joint, k3x2, 1), ArgumentError);
  CHECK_THROWS_AS(optimal_joint_decoders(std::vector<std::vector<Message>>{{0, 2, 0}}, joint, k3x2, 2), ArgumentError);
}

TEST_CASE("stochastic mode flags itself and gives an upper bound") {
  Rng rng(mix_seed(31, 0));
  const PairAlphabet a{5, 2};
  const auto joint = testing::random_dist(rng, a.total());
  const auto exact = best_multi_b(joint, a, 2, 1, kDefaultSearchBudget, 3);
  REQUIRE(exact.search_mode == SearchMode::exhaustive);
  const auto sampled = best_multi_b(joint, a, 2, 1, 40, 3);
  CHECK(sampled.search_mode == SearchMode::stochastic);
  CHECK(sampled.miss_probability >= exact.miss_probability - 1e-12);
  CHECK(sampled.miss_probability == joint_miss_probability(sampled.codes, joint, a));
  CHECK(sampled.seed == 3);
}

TEST_CASE("k_index examples") {
  const auto joint = example_joint();
  const auto a2 = optimal_a_code(joint, k3x2, 2);
  CHECK(k_index(a2.code, joint, k3x2, 3) == std::optional<std::uint64_t>{0});

  const auto perfect = optimal_a_code(joint, k3x2, 3);
  CHECK(k_index(perfect.code, joint, k3x2, 3) == std::optional<std::uint64_t>{0});

  // e_A(1) = 0.3 = e_B(1;0)
  const auto a1 = optimal_a_code(joint, k3x2, 1);
  CHECK(k_index(a1.code, joint, k3x2, 3) == std::optional<std::uint64_t>{0});

}

TEST_CASE("k_index reports exceeding k_max") {
  // Column y ranks x1 = y, y+1, y+2 (mod 3); no bipartition of X1 separates
  // every column's top two.
  const PairAlphabet a{3, 3};
  const double w[3] = {0.4, 0.35, 0.25};
  std::vector<double> p(9, 0.0);
  for (std::uint64_t y = 0; y < 3; ++y)
    for (std::uint64_t r = 0; r < 3; ++r) p[a.index((y + r) % 3, y)] = w[r] / 3.0;
  const Dist joint(p);
  const auto a_code = optimal_a_code(joint, a, 2);
  CHECK(a_code.error == doctest::Approx(0.25));
  const double e_b0 = best_multi_b(joint, a, 2, 0, kDefaultSearchBudget, 0).miss_probability;
  CHECK(e_b0 == doctest::Approx(0.85 / 3.0));
  CHECK_FALSE(k_index(a_code.code, joint, a, 0).has_value());
  CHECK(k_index(a_code.code, joint, a, 2) == std::optional<std::uint64_t>{1});
}

TEST_CASE("property: monotone in k and M, agrees with the oracle, worker independent") {
  Rng rng(mix_seed(32, 0));
  for (int trial = 0; trial < 25; ++trial) {
    const PairAlphabet a{2 + uniform_below(rng, 3), 1 + uniform_below(rng, 3)};
    const auto joint = testing::random_dist(rng, a.total(), 0.2);
    std::vector<std::vector<double>> table;
    for (std::uint64_t m = 1; m <= a.x1_size; ++m) {
      std::vector<double> row;
      for (std::uint64_t k = 0; k <= 2; ++k) {
        const auto r = best_multi_b(joint, a, m, k, kDefaultSearchBudget, 7, Parallelism{1 + (trial % 3U)});
        REQUIRE(r.search_mode == SearchMode::exhaustive);
        row.push_back(r.miss_probability);
        if (k <= 1 && m <= 2)
          CHECK(r.miss_probability == doctest::Approx(oracle::enumerate_b_tuples(joint, a, m, k)).epsilon(1e-12));
      }
      CHECK(row[0] == doctest::Approx(optimal_b_code(joint, a, m).error).epsilon(1e-12));
      CHECK(row[0] >= min_a_error(joint, a, m) - 1e-12);
      for (std::size_t k = 1; k < row.size(); ++k) CHECK(row[k] <= row[k - 1] + 1e-12);
      if (!table.empty())
        for (std::size_t k = 0; k < row.size(); ++k) CHECK(row[k] <= table.back()[k] + 1e-12);
      table.push_back(row);
    }
    CHECK(table.back()[0] == 0.0);
  }
}

TEST_CASE("property: stochastic matches exhaustive on most seeded instances") {
  Rng rng(mix_seed(33, 0));
  int equal = 0;
  const int instances = 20;
  for (int trial = 0; trial < instances; ++trial) {
    const PairAlphabet a{4 + uniform_below(rng, 2), 2};
    const auto joint = testing::random_dist(rng, a.total());
    const auto exact = best_multi_b(joint, a, 2, 1, kDefaultSearchBudget, 5);
    const auto sampled = best_multi_b(joint, a, 2, 1, 32, 5);
    REQUIRE(exact.search_mode == SearchMode::exhaustive);
    REQUIRE(sampled.search_mode == SearchMode::stochastic);
    CHECK(sampled.miss_probability >= exact.miss_probability - 1e-12);
    if (sampled.miss_probability <= exact.miss_probability + 1e-12) ++equal;
  }
  CHECK(equal * 10 >= instances * 9);
}
