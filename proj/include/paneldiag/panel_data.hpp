#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace paneldiag {

/// Position of a label in the (lexicographically sorted) vocabulary.
using LabelId = std::uint32_t;

/// Ordered set of distinct label strings. Canonical order is lexicographic ascending,
/// so sorting label ids also sorts the label strings.
class LabelVocabulary {
 public:
  /// Sorts the labels; throws ValidationError when empty or when a label repeats.
  explicit LabelVocabulary(std::vector<std::string> labels);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] const std::string& name(LabelId id) const { return labels_.at(id); }
  [[nodiscard]] std::optional<LabelId> find(std::string_view label) const;
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend bool operator==(const LabelVocabulary&, const LabelVocabulary&) = default;

 private:
  std::vector<std::string> labels_;
};

struct JudgeMeta {
  std::string judge_id;
  std::string family;

  friend bool operator==(const JudgeMeta&, const JudgeMeta&) = default;
};

/// One evaluation item. `human_counts` is indexed by LabelId; `votes` is indexed by
/// the dataset's canonical judge order, with std::nullopt for a missing (unparsed) vote.
struct ItemRecord {
  std::string item_id;
  std::vector<std::int64_t> human_counts;
  std::vector<std::optional<LabelId>> votes;

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

/// Immutable, validated panel of judge votes over items.
class PanelDataset {
 public:
  /// `items[i].votes` must be aligned with `judges` as given. The constructor sorts the
  /// judges by id and permutes every vote row to match, then validates:
  /// at least 2 judges, at least 1 item, unique judge and item ids, count vectors sized
  /// to the vocabulary with non-negative entries and a positive total, and vote ids
  /// within the vocabulary.
  PanelDataset(LabelVocabulary vocabulary, std::vector<JudgeMeta> judges,
               std::vector<ItemRecord> items);

  [[nodiscard]] const LabelVocabulary& vocabulary() const noexcept { return vocabulary_; }
  [[nodiscard]] const std::vector<JudgeMeta>& judges() const noexcept { return judges_; }
  [[nodiscard]] const std::vector<ItemRecord>& items() const noexcept { return items_; }
  [[nodiscard]] std::size_t item_count() const noexcept { return items_.size(); }
  [[nodiscard]] std::size_t judge_count() const noexcept { return judges_.size(); }
  [[nodiscard]] std::size_t label_count() const noexcept { return vocabulary_.size(); }

  /// Number of votes that are still missing.
  [[nodiscard]] std::size_t missing_count() const noexcept;

  /// New dataset holding the given items (by index, in the given order).
  [[nodiscard]] PanelDataset select_items(std::span<const std::size_t> indices) const;

  friend bool operator==(const PanelDataset&, const PanelDataset&) = default;

 private:
  LabelVocabulary vocabulary_;
  std::vector<JudgeMeta> judges_;
  std::vector<ItemRecord> items_;
};

struct GoldLabel {
  std::string item_id;
  LabelId label = 0;
  double support = 0.0;  ///< majority count / total annotations
  bool tied = false;     ///< true when several labels share the top count

  friend bool operator==(const GoldLabel&, const GoldLabel&) = default;
};

/// Dense n x k matrix of resolved label ids (row-major, canonical judge order).
class VoteMatrix {
 public:
  VoteMatrix(std::size_t items, std::size_t judges, std::size_t labels,
             std::vector<LabelId> values);

  [[nodiscard]] std::size_t item_count() const noexcept { return items_; }
  [[nodiscard]] std::size_t judge_count() const noexcept { return judges_; }
  [[nodiscard]] std::size_t label_count() const noexcept { return labels_; }
  [[nodiscard]] LabelId at(std::size_t item, std::size_t judge) const noexcept {
    return values_[item * judges_ + judge];
  }
  [[nodiscard]] std::span<const LabelId> row(std::size_t item) const noexcept {
    return {values_.data() + item * judges_, judges_};
  }

 private:
  std::size_t items_;
  std::size_t judges_;
  std::size_t labels_;
  std::vector<LabelId> values_;
};

// ---------------------------------------------------------------------------
// Ingestion

/// Reads a JSON array of label strings.
[[nodiscard]] LabelVocabulary load_vocabulary(const std::filesystem::path& path);

/// Reads a JSON array of {"judge_id": str, "family": str} objects.
[[nodiscard]] std::vector<JudgeMeta> load_judges(const std::filesystem::path& path);

/// Reads a JSON Lines votes file. When `judges` is empty the panel is taken from the
/// judge ids of the first record, each with family "unknown".
///
/// Errors: ParseError (with line number) for malformed records; ValidationError for an
/// unknown label (naming item and judge), a duplicate item_id, or a vote set that does
/// not match the panel.
[[nodiscard]] PanelDataset load_dataset(const std::filesystem::path& path,
                                        const LabelVocabulary& vocabulary,
                                        std::vector<JudgeMeta> judges = {});
[[nodiscard]] PanelDataset parse_dataset(std::istream& in, const LabelVocabulary& vocabulary,
                                         std::vector<JudgeMeta> judges = {});

void write_dataset(std::ostream& out, const PanelDataset& dataset);
void write_judges(std::ostream& out, std::span<const JudgeMeta> judges);
void write_vocabulary(std::ostream& out, const LabelVocabulary& vocabulary);

// ---------------------------------------------------------------------------
// Deterministic primitives

/// SHA-256(message); the first 8 digest bytes as big-endian u; returns u mod count.
[[nodiscard]] std::size_t hash_pick(std::string_view message, std::size_t count);

/// Picks candidates[u mod |candidates|] (see hash_pick). Candidates must be non-empty
/// and sorted lexicographically; throws std::invalid_argument otherwise.
[[nodiscard]] std::string hash_tiebreak(std::string_view message,
                                        std::span<const std::string> candidates);

/// Majority human label. An exact tie among top labels is resolved by hash_tiebreak
/// over the sorted tied labels with message = item_id.
[[nodiscard]] GoldLabel derive_gold(const ItemRecord& item);
[[nodiscard]] std::vector<GoldLabel> derive_gold(const PanelDataset& dataset);

/// Replaces each missing vote with hash_tiebreak(judge_id + "|" + item_id, vocabulary).
[[nodiscard]] PanelDataset fill_missing(const PanelDataset& dataset);

/// Dense vote matrix; throws ValidationError when any vote is still missing.
[[nodiscard]] VoteMatrix resolved_votes(const PanelDataset& dataset);

// ---------------------------------------------------------------------------
// Entropy and stratification

/// Shannon entropy (bits) of a count vector. Throws std::invalid_argument on an
/// all-zero or negative vector.
[[nodiscard]] double entropy_bits(std::span<const std::int64_t> counts);

/// Shannon entropy (nats) of the empirical distribution of `votes`.
[[nodiscard]] double panel_entropy_nats(std::span<const LabelId> votes, std::size_t label_count);

/// Human entropy (bits) of every item, in dataset order.
[[nodiscard]] std::vector<double> human_entropies(const PanelDataset& dataset);

/// Percentile cut points that split values into `bins` difficulty bins.
///
/// Edges sit at the 100*b/bins percentiles (linear interpolation between order
/// statistics). A value equal to an edge belongs to the lower bin.
class DifficultyBins {
 public:
  DifficultyBins() = default;
  explicit DifficultyBins(std::vector<double> edges) : edges_(std::move(edges)) {}

  /// Throws std::invalid_argument when bins < 1 or values is empty.
  [[nodiscard]] static DifficultyBins fit(std::span<const double> values, std::size_t bins);

  [[nodiscard]] std::size_t bin_count() const noexcept { return edges_.size() + 1; }
  [[nodiscard]] const std::vector<double>& edges() const noexcept { return edges_; }
  [[nodiscard]] std::size_t assign(double value) const noexcept;
  [[nodiscard]] std::vector<std::size_t> assign(std::span<const double> values) const;

 private:
  std::vector<double> edges_;
};

/// Linear-interpolation percentile (q in [0, 100]) of unsorted values.
[[nodiscard]] double percentile(std::span<const double> values, double q);

/// Indices (ascending) of an entropy-tercile-stratified sample of size n.
///
/// Each tercile receives floor(n/3) items and the first n mod 3 terciles (lowest entropy
/// first) one more. When a tercile is too small its shortfall passes to the next tercile
/// with spare items. Items are drawn uniformly without replacement with the stream
/// make_rng(seed, stream, tercile).
[[nodiscard]] std::vector<std::size_t> stratified_indices(std::span<const double> entropies,
                                                          std::size_t n, std::uint64_t seed,
                                                          std::string_view stream = "sample");

/// Entropy-stratified subsample of n items (dataset order preserved).
/// Throws std::invalid_argument when n < 3 or n exceeds the item count.
[[nodiscard]] PanelDataset stratified_sample(const PanelDataset& dataset, std::size_t n,
                                             std::uint64_t seed);

}  // namespace paneldiag
