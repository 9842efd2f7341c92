#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paneldiag/panel_data.hpp"

namespace paneldiag {

struct MajorityDecision {
  LabelId label = 0;
  bool tied = false;
};

/// Tie-break message for item `item_index`: decimal index, '|', then the vote label
/// names concatenated in canonical judge order (labels {"a", "b"}, votes a b a give "17|aba").
[[nodiscard]] std::string tie_message(std::size_t item_index, std::span<const LabelId> votes,
                                      const LabelVocabulary& vocabulary);

/// Plurality label; ties resolved by hash_tiebreak over the tied labels with
/// tie_message(item_index, votes).
[[nodiscard]] MajorityDecision majority_vote(std::span<const LabelId> votes, std::size_t item_index,
                                             const LabelVocabulary& vocabulary);

/// Weighted plurality: score(label) = sum_j w_j [vote_j == label], argmax with the same
/// hash tie-break as majority_vote on exactly equal scores.
[[nodiscard]] LabelId weighted_vote(std::span<const LabelId> votes, std::span<const double> weights,
                                    std::size_t item_index, const LabelVocabulary& vocabulary);

/// Majority decision of every item (dataset must be fully resolved).
[[nodiscard]] std::vector<MajorityDecision> majority_decisions(const VoteMatrix& votes,
                                                               const LabelVocabulary& vocabulary);

/// Majority decisions when only the judges in `judges` vote.
[[nodiscard]] std::vector<MajorityDecision> majority_decisions(const VoteMatrix& votes,
                                                               const LabelVocabulary& vocabulary,
                                                               std::span<const std::size_t> judges);

/// Fraction of items whose predicted label equals the gold label.
[[nodiscard]] double accuracy(std::span<const LabelId> predicted, std::span<const GoldLabel> gold);
[[nodiscard]] double accuracy(std::span<const MajorityDecision> decisions,
                              std::span<const GoldLabel> gold);

struct DawidSkeneResult {
  std::vector<std::vector<double>> posteriors;  ///< items x labels, rows sum to 1
  std::vector<LabelId> predicted;
  std::vector<double> class_priors;
  /// confusion[j][true][predicted]
  std::vector<std::vector<std::vector<double>>> confusion;
  /// EM objective after each E-step: observed-data log-likelihood plus the log density
  /// of the symmetric Dirichlet prior that the additive smoothing corresponds to.
  std::vector<double> objective_trace;
  /// Plain observed-data log-likelihood after each E-step.
  std::vector<double> log_likelihood_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Dawid-Skene EM without gold labels. Posteriors start at per-item vote frequencies;
/// the M-step re-estimates class priors and per-judge confusion matrices with additive
/// smoothing 0.01; the E-step sets posteriors proportional to prior x product of judge
/// likelihoods. Stops when max |posterior change| < tol or after max_iters iterations.
[[nodiscard]] DawidSkeneResult dawid_skene(const PanelDataset& dataset, std::size_t max_iters = 100,
                                           double tol = 1e-6);

enum class WeightRule { accuracy, phi_optimal };

[[nodiscard]] std::string to_string(WeightRule rule);

struct WeightedVoteResult {
  double accuracy = 0.0;                     ///< pooled held-out accuracy
  std::vector<LabelId> predicted;            ///< held-out decision per item
  std::vector<std::size_t> fold_of_item;
  std::vector<std::vector<double>> fold_weights;  ///< weights learned per fold
};

/// Fold assignment: items are grouped by human-entropy tercile, shuffled within the
/// tercile with make_rng(seed, "folds", tercile) and dealt round-robin to the folds.
[[nodiscard]] std::vector<std::size_t> stratified_folds(std::span<const double> entropies,
                                                        std::size_t folds, std::uint64_t seed);

/// Judge weights learned from the training items (accuracy rule: raw accuracy;
/// phi-optimal rule: minimum-variance weights Sigma^-1 1 / (1' Sigma^-1 1) on the error
/// phi matrix with ridge 1e-6, negatives allowed). Throws NumericalError when the ridged
/// matrix is singular.
[[nodiscard]] std::vector<double> learn_weights(const VoteMatrix& votes, std::span<const GoldLabel> gold,
                                                std::span<const std::size_t> training_items,
                                                WeightRule rule);

/// Cross-validated weighted voting; every item is predicted by weights learned on the
/// other folds.
[[nodiscard]] WeightedVoteResult weighted_vote_cv(const PanelDataset& dataset,
                                                  std::span<const GoldLabel> gold, WeightRule rule,
                                                  std::size_t folds, std::uint64_t seed);

struct BestIndividual {
  std::string judge_id;
  double accuracy = 0.0;
};

/// Most accurate judge; ties go to the earliest judge in canonical order.
[[nodiscard]] BestIndividual best_individual(const PanelDataset& dataset,
                                             std::span<const GoldLabel> gold);

struct AggregationOutcome {
  std::string method;
  bool oracle_access = false;
  bool cross_validated = false;
  double accuracy = 0.0;
  /// (accuracy - majority) / (condorcet_predicted - majority); absent unless the
  /// prediction exceeds majority accuracy.
  std::optional<double> gap_closed_fraction;
};

struct AggregationReport {
  double majority_accuracy = 0.0;
  double condorcet_predicted = 0.0;
  std::size_t majority_ties = 0;
  std::string best_judge;
  std::size_t dawid_skene_iterations = 0;
  bool dawid_skene_converged = false;
  std::vector<AggregationOutcome> outcomes;
};

/// Majority vote, Dawid-Skene, accuracy-weighted (CV), phi-optimal (CV) and best
/// individual, each with its share of the Condorcet gap closed.
[[nodiscard]] AggregationReport aggregation_report(const PanelDataset& dataset,
                                                   std::span<const GoldLabel> gold,
                                                   double condorcet_predicted, std::size_t folds,
                                                   std::uint64_t seed);

}  // namespace paneldiag
