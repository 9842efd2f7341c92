#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "paneldiag/aggregation.hpp"
#include "paneldiag/condorcet.hpp"
#include "paneldiag/distributional.hpp"
#include "paneldiag/independence.hpp"
#include "paneldiag/panel_data.hpp"
#include "paneldiag/stat_tests.hpp"

namespace paneldiag {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunConfig {
  std::string votes;
  std::string judges;  ///< optional; empty takes the panel from the first record
  std::string labels;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t bins = 3;
  std::size_t sims = 10000;
  std::size_t neff_resamples = 10000;
  std::size_t gap_resamples = 1000;
  std::size_t gap_sims = 1000;  ///< panels per item inside each gap bootstrap resample
  std::size_t permutations = 10000;
  std::size_t strata = 3;  ///< human-entropy strata for the permutation test
  std::size_t folds = 5;
  std::size_t annotators = 10;
  std::size_t convergence_repeats = 100;

  // synth subcommand
  std::size_t synth_judges = 9;
  std::size_t synth_items = 1000;
  double synth_accuracy = 0.7;
  double synth_copy = 0.0;

  /// Throws ValidationError when the seed is missing or a count is not positive.
  void validate() const;
};

/// Every field except the worker cap, which never changes results.
[[nodiscard]] Json to_json(const RunConfig& config);

[[nodiscard]] Json to_json(const NeffResult& result);
[[nodiscard]] Json to_json(const PermutationResult& result);
[[nodiscard]] Json to_json(const CondorcetBin& bin);
[[nodiscard]] Json to_json(const AggregationReport& report);
[[nodiscard]] Json to_json(const LeaveOneOutResult& result);
[[nodiscard]] Json to_json(const ScalingCurve& curve);
[[nodiscard]] Json to_json(const SplitHalfResult& result);

/// Item count, judge count and the SHA-256 of the canonical JSON Lines serialization.
[[nodiscard]] Json dataset_fingerprint(const PanelDataset& dataset);

[[nodiscard]] const std::vector<std::string>& subcommand_names();

/// Runs one subcommand and writes its artifacts under config.out. Returns the process
/// exit status: 0 on success, 1 on invalid input or configuration, 2 on a numerical
/// failure. Messages go to `err`.
int run_subcommand(std::string_view name, const RunConfig& config, std::ostream& err);

}  // namespace paneldiag
