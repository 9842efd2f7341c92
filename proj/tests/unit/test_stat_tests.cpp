#include <catch_amalgamated.hpp>

#include <cmath>

#include "paneldiag/parallel.hpp"
#include "paneldiag/stat_tests.hpp"
#include "paneldiag/synth.hpp"

using namespace paneldiag;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("one-sided binomial test") {
  // scipy.stats.binom.cdf reference values
  CHECK_THAT(binomial_test_onesided(4, 7, 0.488), WithinAbs(0.7926489908, 1e-9));
  CHECK_THAT(binomial_test_onesided(10, 30, 0.3), WithinAbs(0.7303703863, 1e-9));
  CHECK_THAT(binomial_test_onesided(83, 132, 0.991), WithinRel(1.2791428886813767e-64, 1e-6));
  CHECK(binomial_test_onesided(83, 132, 0.991) < 0.001);
  CHECK(binomial_test_onesided(10, 10, 0.5) == 1.0);
  CHECK(binomial_test_onesided(0, 10, 0.0) == 1.0);
  CHECK(binomial_test_onesided(3, 10, 1.0) == 0.0);
  CHECK_THROWS_AS(binomial_test_onesided(11, 10, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_test_onesided(1, 10, 1.5), std::invalid_argument);
}

TEST_CASE("binomial tail is monotone in successes") {
  for (const double p0 : {0.1, 0.488, 0.9}) {
    double previous = 0.0;
    for (std::size_t s = 0; s <= 25; ++s) {
      const double p = binomial_test_onesided(s, 25, p0);
      CHECK(p >= previous - 1e-15);
      previous = p;
    }
  }
}

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(5, 10);
  CHECK_THAT(lo, WithinAbs(0.2365930905, 1e-9));
  CHECK_THAT(hi, WithinAbs(0.7634069095, 1e-9));
  CHECK(wilson_interval(0, 10).first == 0.0);
  CHECK_THAT(wilson_interval(0, 10).second, WithinAbs(0.2775327999, 1e-9));
  const auto unanimous = wilson_interval(290, 319);
  CHECK_THAT(unanimous.first, WithinAbs(0.8724887294, 1e-9));
  CHECK_THAT(unanimous.second, WithinAbs(0.9359576237, 1e-9));
  CHECK(unanimous.first < 0.909);
  CHECK(0.909 < unanimous.second);
  const auto ninety = wilson_interval(7, 9, 0.90);
  CHECK_THAT(ninety.first, WithinAbs(0.5036427824, 1e-9));
  CHECK_THROWS_AS(wilson_interval(1, 0), std::invalid_argument);

  for (std::size_t t = 1; t <= 40; t += 3) {
    for (std::size_t s = 0; s <= t; ++s) {
      const auto [a, b] = wilson_interval(s, t);
      const double p = static_cast<double>(s) / static_cast<double>(t);
      CHECK(a >= 0.0);
      CHECK(b <= 1.0);
      CHECK(a <= p + 1e-12);
      CHECK(p <= b + 1e-12);
    }
  }
}

TEST_CASE("spearman and point-biserial") {
  const std::vector<double> x{1, 2, 2, 3, 5, 4};
  const std::vector<double> y{2, 1, 4, 3, 6, 6};
  CHECK_THAT(spearman_rho(x, y), WithinAbs(0.7941176470588236, 1e-12));
  CHECK_THAT(spearman_rho(x, x), WithinAbs(1.0, 1e-12));
  std::vector<double> neg;
  for (const double v : x) neg.push_back(-v);
  CHECK_THAT(spearman_rho(x, neg), WithinAbs(-1.0, 1e-12));
  std::vector<double> cubed;
  for (const double v : y) cubed.push_back(std::exp(v) + v * v * v);
  CHECK_THAT(spearman_rho(x, cubed), WithinAbs(spearman_rho(x, y), 1e-12));
  CHECK_THROWS_AS(spearman_rho(x, std::vector<double>(6, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK(mid_ranks(x) == std::vector<double>{1, 2.5, 2.5, 4, 6, 5});

  const std::vector<int> b{0, 1, 1, 0, 1, 0, 1};
  const std::vector<double> c{1.5, 2.0, 3.1, 0.2, 2.2, 1.0, 0.7};
  CHECK_THAT(point_biserial(b, c), WithinAbs(0.5942329850041361, 1e-12));
  const std::vector<double> split{0, 1, 1, 0, 1, 0, 1};
  CHECK_THAT(point_biserial(b, split), WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(point_biserial(std::vector<int>(7, 1), c), std::invalid_argument);
}

TEST_CASE("permutation test with maximal signal") {
  std::vector<std::uint8_t> column(200);
  for (std::size_t i = 0; i < 200; ++i) column[i] = i % 3 == 0 ? 1 : 0;
  std::vector<std::uint8_t> values = column;
  values.insert(values.end(), column.begin(), column.end());
  const ErrorMatrix errors(200, 2, values);
  const std::vector<std::size_t> strata(200, 0);
  const PermutationResult r = permutation_test(errors, strata, 500, 1);
  CHECK_THAT(r.observed_mean_phi, WithinAbs(1.0, 1e-12));
  CHECK(r.exceed_count == 0);
  CHECK(r.p_value <= 1.0 / 500.0);
  CHECK_THAT(r.p_value_corrected, WithinAbs(1.0 / 501.0, 1e-15));
  CHECK(r.z > 10.0);
}

TEST_CASE("permutations keep per-judge, per-stratum error counts") {
  const SynthData data = generate(uniform_spec(4, 300, 0.7, 0.5, 2));
  const ErrorMatrix errors = error_matrix(data.dataset, data.gold);
  std::vector<std::size_t> strata(300);
  for (std::size_t i = 0; i < 300; ++i) strata[i] = i % 3;
  for (std::uint64_t p = 0; p < 5; ++p) {
    const ErrorMatrix shuffled = permute_within_strata(errors, strata, 9, p);
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t s = 0; s < 3; ++s) {
        std::size_t before = 0;
        std::size_t after = 0;
        for (std::size_t i = s; i < 300; i += 3) {
          before += errors.at(i, j);
          after += shuffled.at(i, j);
        }
        CHECK(before == after);
      }
    }
  }
}

TEST_CASE("permutation test is deterministic across worker counts") {
  const SynthData data = generate(uniform_spec(5, 400, 0.7, 0.3, 4));
  const ErrorMatrix errors = error_matrix(data.dataset, data.gold);
  const std::vector<std::size_t> strata(400, 0);
  set_max_threads(1);
  const PermutationResult a = permutation_test(errors, strata, 200, 77);
  set_max_threads(3);
  const PermutationResult b = permutation_test(errors, strata, 200, 77);
  CHECK(a.null_mean == b.null_mean);
  CHECK(a.null_sd == b.null_sd);
  CHECK(a.exceed_count == b.exceed_count);
}

TEST_CASE("permutation test is calibrated under independence") {
  std::size_t rejections = 0;
  constexpr std::size_t kRuns = 100;
  for (std::uint64_t run = 0; run < kRuns; ++run) {
    const SynthData data = generate(uniform_spec(4, 150, 0.7, 0.0, 1000 + run));
    const ErrorMatrix errors = error_matrix(data.dataset, data.gold);
    const std::vector<std::size_t> strata(150, 0);
    if (permutation_test(errors, strata, 200, run).p_value < 0.05) ++rejections;
  }
  // Binomial(100, 0.05): 99.9% of outcomes fall at or below 13.
  CHECK(rejections <= 13);
}

TEST_CASE("permutation test input checks") {
  const ErrorMatrix errors(3, 2, {1, 0, 1, 0, 1, 1});
  CHECK_THROWS_AS(permutation_test(errors, std::vector<std::size_t>{0, 0}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(permutation_test(errors, std::vector<std::size_t>{0, 0, 1}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(permutation_test(errors, std::vector<std::size_t>{0, 0, 0}, 0, 1), std::invalid_argument);
}
