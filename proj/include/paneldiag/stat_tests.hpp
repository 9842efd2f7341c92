#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "paneldiag/independence.hpp"

namespace paneldiag {

struct PermutationResult {
  double observed_mean_phi = 0.0;
  double null_mean = 0.0;
  double null_sd = 0.0;
  double z = 0.0;
  std::size_t exceed_count = 0;  ///< permutations with mean phi >= observed
  double p_value = 0.0;          ///< exceed_count / permutations
  double p_value_corrected = 0.0;  ///< (exceed_count + 1) / (permutations + 1)
  std::size_t permutations = 0;
};

/// Stratified permutation test of mean off-diagonal phi. Within each stratum each judge's
/// error entries are shuffled independently (permutation p uses make_rng(seed,
/// "permutation", p)), which preserves every per-judge, per-stratum error count.
/// Throws std::invalid_argument when a stratum has fewer than 2 items or the strata
/// vector does not match the item count.
[[nodiscard]] PermutationResult permutation_test(const ErrorMatrix& errors,
                                                 std::span<const std::size_t> strata,
                                                 std::size_t permutations, std::uint64_t seed);

/// One permuted copy of `errors` (exposed so callers can verify count preservation).
[[nodiscard]] ErrorMatrix permute_within_strata(const ErrorMatrix& errors,
                                                std::span<const std::size_t> strata,
                                                std::uint64_t seed, std::uint64_t index);

/// P(X <= successes) for X ~ Binomial(trials, p0), summed exactly in log space.
[[nodiscard]] double binomial_test_onesided(std::size_t successes, std::size_t trials, double p0);

/// Wilson score interval. Throws std::invalid_argument when trials == 0 or the confidence
/// is outside (0, 1).
[[nodiscard]] std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                                        double confidence = 0.95);

[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of mid-ranks. Throws std::invalid_argument for mismatched or
/// short (< 3) inputs and when either rank vector has zero variance.
[[nodiscard]] double spearman_rho(std::span<const double> x, std::span<const double> y);

/// Pearson correlation between a 0/1 vector and a continuous vector. Throws
/// std::invalid_argument when only one class is present.
[[nodiscard]] double point_biserial(std::span<const int> binary, std::span<const double> continuous);

/// Average ranks (1-based) with ties sharing their mid-rank.
[[nodiscard]] std::vector<double> mid_ranks(std::span<const double> values);

}  // namespace paneldiag
