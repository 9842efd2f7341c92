#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paneldiag/independence.hpp"
#include "paneldiag/panel_data.hpp"

namespace paneldiag {

enum class Tercile { low = 0, medium = 1, high = 2 };

[[nodiscard]] std::string to_string(Tercile tercile);

/// Human-entropy tercile of every item (edges at the 33.3 / 66.7 percentiles).
[[nodiscard]] std::vector<Tercile> entropy_terciles(const PanelDataset& dataset);

/// Half the L1 distance between two distributions of equal length.
[[nodiscard]] double total_variation(std::span<const double> p, std::span<const double> q);

/// KL(p~ || q~) + KL(q~ || p~) with p~ = (p + epsilon) / (1 + C epsilon).
[[nodiscard]] double symmetric_kl(std::span<const double> p, std::span<const double> q, double epsilon = 1e-4);

struct AlignmentRecord {
  std::string item_id;
  double tv = 0.0;
  double sym_kl = 0.0;
  double human_entropy = 0.0;  ///< bits
  Tercile tercile = Tercile::low;
};

struct AlignmentSummary {
  std::size_t n = 0;
  double mean_tv = 0.0;
  double sd_tv = 0.0;  ///< sample SD, 0 for n < 2
  double mean_sym_kl = 0.0;
};

struct AlignmentResult {
  std::vector<AlignmentRecord> records;  ///< dataset order
  AlignmentSummary overall;
  std::array<AlignmentSummary, 3> by_tercile;
};

/// Panel vote distribution (counts / k) against the human distribution (counts / total)
/// for every item. Missing votes must be resolved first.
[[nodiscard]] AlignmentResult alignment(const PanelDataset& dataset, double epsilon = 1e-4);

/// Spearman rho between tv and human entropy. Needs at least 3 records; a constant tv
/// column raises std::invalid_argument.
[[nodiscard]] double alignment_entropy_correlation(std::span<const AlignmentRecord> records);

struct AllWrongItem {
  std::string item_id;
  Tercile tercile = Tercile::low;
  bool biased = false;  ///< gold label held by at least half of the annotators
  LabelId gold = 0;
  LabelId panel = 0;    ///< the panel's plurality label
  double human_support_for_panel = 0.0;
};

struct ConfusionDirection {
  LabelId gold = 0;
  LabelId panel = 0;
  std::size_t count = 0;
};

struct AllWrongBreakdown {
  std::size_t total = 0;
  std::array<std::size_t, 3> by_tercile{};
  std::size_t biased = 0;
  std::size_t ambiguous = 0;
  std::vector<ConfusionDirection> directions;  ///< ordered by (gold, panel)
  /// Mean human share of the label the panel chose; absent when there are no items.
  std::optional<double> mean_human_support_for_panel;
  std::vector<AllWrongItem> items;
};

/// Items on which every judge is wrong, broken down by tercile, type and direction.
[[nodiscard]] AllWrongBreakdown all_wrong_analysis(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                                   const ErrorMatrix& errors);

/// Simulated human panel: every item gets `annotators` labels drawn with replacement from
/// its human distribution (make_rng(seed, "human", item)); draw t fills pseudo-annotator
/// column t. Returns the point n_eff of those columns against gold.
[[nodiscard]] NeffResult human_neff(const PanelDataset& dataset, std::size_t annotators, std::uint64_t seed);

}  // namespace paneldiag
