#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "paneldiag/panel_data.hpp"

namespace paneldiag {

/// Per-judge, per-difficulty-bin confusion matrices P(predicted | true label, judge, bin).
class ConfusionSet {
 public:
  ConfusionSet(std::size_t judges, std::size_t labels, DifficultyBins bins, std::vector<double> values);

  [[nodiscard]] std::size_t judge_count() const noexcept { return judges_; }
  [[nodiscard]] std::size_t label_count() const noexcept { return labels_; }
  [[nodiscard]] std::size_t bin_count() const noexcept { return bins_.bin_count(); }
  [[nodiscard]] const DifficultyBins& bins() const noexcept { return bins_; }

  /// Distribution of predicted labels for (judge, bin, true label); sums to 1.
  [[nodiscard]] std::span<const double> row(std::size_t judge, std::size_t bin, LabelId truth) const noexcept {
    return {values_.data() + offset(judge, bin, truth), labels_};
  }

  /// Every judge votes the true label with probability 1, in a single bin.
  [[nodiscard]] static ConfusionSet identity(std::size_t judges, std::size_t labels);

 private:
  [[nodiscard]] std::size_t offset(std::size_t judge, std::size_t bin, LabelId truth) const noexcept {
    return ((judge * bins_.bin_count() + bin) * labels_ + truth) * labels_;
  }

  std::size_t judges_;
  std::size_t labels_;
  DifficultyBins bins_;
  std::vector<double> values_;
};

/// Items grouped by the same observed panel vote profile (hence the same panel entropy).
struct CondorcetBin {
  std::vector<std::size_t> profile;  ///< vote counts sorted descending, e.g. {8, 1, 0}
  double panel_entropy = 0.0;        ///< nats
  std::size_t n = 0;
  std::size_t correct = 0;
  double actual_acc = 0.0;
  double predicted_acc = 0.0;  ///< mean of per-item predictions
  double gap = 0.0;            ///< actual - predicted
  double p_value = 1.0;        ///< one-sided binomial P(X <= correct | n, predicted)
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  bool tabulated = true;  ///< false for bins with n < 5 (still counted in the weighted gap)
};

struct CondorcetPrediction {
  std::vector<double> per_item_pred;  ///< dataset order
  std::vector<CondorcetBin> per_bin;  ///< ascending panel entropy
  std::size_t sims = 0;
  double actual_accuracy = 0.0;
  double predicted_accuracy = 0.0;
  /// sum over bins of (n_bin / n) * gap_bin, i.e. actual minus predicted accuracy.
  double weighted_gap = 0.0;
  /// Optional percentile bootstrap interval of shortfall().
  std::optional<std::pair<double, double>> ci;

  /// The Condorcet gap as a positive shortfall: predicted minus actual accuracy.
  [[nodiscard]] double shortfall() const noexcept { return -weighted_gap; }
};

/// Empirical per-judge confusion matrices with additive smoothing 0.5 per cell. Bin edges
/// sit at the 100*b/bins percentiles of human entropy; bins = 1 pools all items.
/// Throws std::invalid_argument when bins < 1.
[[nodiscard]] ConfusionSet fit_confusion(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                         std::size_t bins);

/// Item-aware Monte Carlo under conditional independence. For each item, `sims` panels
/// are drawn with every judge voting independently from its (bin, gold label) row; the
/// majority breaks ties uniformly at random. Item i uses make_rng(seed, "condorcet", i).
/// Items are binned with the confusion set's own edges, so a set fitted on other items
/// can be applied here. Throws std::invalid_argument when sims < 100.
[[nodiscard]] CondorcetPrediction simulate_condorcet(const ConfusionSet& confusion, const PanelDataset& dataset,
                                                     std::span<const GoldLabel> gold, std::size_t sims,
                                                     std::uint64_t seed);

/// Percentile bootstrap (2.5, 97.5) of the shortfall: each resample refits the confusion
/// matrices on the resampled items and re-simulates with `sims` panels per item.
[[nodiscard]] std::pair<double, double> gap_ci(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                               std::size_t bins, std::size_t resamples, std::size_t sims,
                                               std::uint64_t seed);

struct DecompositionRow {
  std::size_t bins = 0;
  double shortfall = 0.0;
  std::optional<double> fraction_explained;  ///< (shortfall(1) - shortfall(B)) / shortfall(1)
};

/// Shortfall for each bin count; requires 1 in bins_list. The fraction is absent when the
/// pooled shortfall is not positive.
[[nodiscard]] std::vector<DecompositionRow> difficulty_decomposition(const PanelDataset& dataset,
                                                                     std::span<const GoldLabel> gold,
                                                                     std::span<const std::size_t> bins_list,
                                                                     std::size_t sims, std::uint64_t seed);

struct SplitHalfResult {
  double in_sample_gap = 0.0;  ///< shortfall fitted and simulated on all items
  double gap_a_to_b = 0.0;
  double gap_b_to_a = 0.0;
  double cv_gap = 0.0;  ///< mean of the two cross-fitted shortfalls
  std::optional<double> ratio;  ///< cv_gap / in_sample_gap (1 when both are equal)
};

/// Entropy-tercile-stratified split into halves A and B; fit on one, simulate on the
/// other, both ways. Requires at least 20 items.
[[nodiscard]] SplitHalfResult split_half(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                         std::size_t bins, std::size_t sims, std::uint64_t seed);

/// P(majority correct) for k independent binary voters of accuracy p:
/// sum_{j = ceil(k/2)}^{k} C(k, j) p^j (1 - p)^(k - j). Throws std::invalid_argument for
/// even k or p outside [0, 1].
[[nodiscard]] double closed_form_binary(std::size_t k, double p);

struct UnanimousCheck {
  std::size_t unanimous_items = 0;
  double actual_accuracy = 0.0;
  /// P(correct | simulated panel unanimous), pooled over the unanimous items; absent when
  /// no simulated panel was unanimous.
  std::optional<double> predicted_accuracy;
};

/// Restricts to items with observed panel entropy 0. Throws std::invalid_argument when
/// there are none.
[[nodiscard]] UnanimousCheck unanimous_error_check(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                                   const ConfusionSet& confusion, std::size_t sims,
                                                   std::uint64_t seed);

}  // namespace paneldiag
