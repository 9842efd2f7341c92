#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paneldiag/panel_data.hpp"

namespace paneldiag {

/// Correlated-voter generator.
///
/// Every item draws one uniform U and one shared wrong label W. Judge j copies the shared
/// event with probability c, i.e. errs iff U < e_j and then votes W; otherwise it errs
/// independently with probability e_j and picks a wrong label uniformly. For two judges
/// with the same error rate e the errors coincide when both copy (probability c^2) and
/// are independent otherwise, so cov = c^2 e (1 - e) and the error phi is exactly c^2.
struct SynthSpec {
  std::size_t judges = 9;
  std::size_t items = 1000;
  std::vector<std::string> labels{"contradiction", "entailment", "neutral"};
  std::vector<double> per_judge_accuracy;  ///< one per judge, each in (0, 1]
  double copy_prob = 0.0;                  ///< c in [0, 1]
  /// Per-item multipliers of every judge's error rate (clamped to keep rates <= 1). They
  /// also set the human annotator disagreement, min(0.45, mean error * multiplier).
  std::optional<std::vector<double>> difficulty_profile;
  std::uint64_t seed = 0;
};

struct SynthData {
  PanelDataset dataset;
  std::vector<GoldLabel> gold;
};

/// Generator settings for `judges` judges that all have the same accuracy.
[[nodiscard]] SynthSpec uniform_spec(std::size_t judges, std::size_t items, double accuracy, double copy_prob,
                                     std::uint64_t seed);

/// Throws std::invalid_argument for an invalid spec. Item i draws from
/// make_rng(seed, "synth", i). Human counts are 100 annotations: all on the gold label,
/// or split by the difficulty profile with the gold label keeping the majority.
[[nodiscard]] SynthData generate(const SynthSpec& spec);

/// One strong judge followed by judges - 1 weak ones, all conditionally independent.
[[nodiscard]] SynthSpec heterogeneous_spec(std::size_t judges, std::size_t items, double strong, double weak,
                                           std::uint64_t seed);

/// As generate, but requires copy_prob = 0.
[[nodiscard]] SynthData generate_heterogeneous(const SynthSpec& spec);

}  // namespace paneldiag
