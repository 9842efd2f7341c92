#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "paneldiag/panel_data.hpp"

namespace paneldiag {

/// Binary items x judges matrix: entry (i, j) is 1 iff judge j's resolved vote differs
/// from the gold label of item i. Stored column-major so each judge's error vector is
/// contiguous.
class ErrorMatrix {
 public:
  ErrorMatrix(std::size_t items, std::size_t judges, std::vector<std::uint8_t> column_major);

  [[nodiscard]] std::size_t item_count() const noexcept { return items_; }
  [[nodiscard]] std::size_t judge_count() const noexcept { return judges_; }
  [[nodiscard]] std::uint8_t at(std::size_t item, std::size_t judge) const noexcept {
    return values_[judge * items_ + item];
  }
  [[nodiscard]] std::span<const std::uint8_t> column(std::size_t judge) const noexcept {
    return {values_.data() + judge * items_, items_};
  }
  [[nodiscard]] std::size_t row_sum(std::size_t item) const noexcept;
  [[nodiscard]] double error_rate(std::size_t judge) const noexcept;
  [[nodiscard]] std::vector<double> error_rates() const;

  [[nodiscard]] ErrorMatrix select_items(std::span<const std::size_t> items) const;
  [[nodiscard]] ErrorMatrix select_judges(std::span<const std::size_t> judges) const;

 private:
  std::size_t items_;
  std::size_t judges_;
  std::vector<std::uint8_t> values_;
};

/// Pairwise error-correlation (phi) matrix with unit diagonal.
struct PhiMatrix {
  Eigen::MatrixXd phi;
  /// Judges whose error column has zero variance (never or always wrong). Their phi
  /// against every other judge is defined as 0.
  std::vector<std::size_t> zero_variance_judges;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(phi.rows()); }
  /// Mean of the strictly upper-triangular entries (0 when k < 2).
  [[nodiscard]] double mean_off_diagonal() const noexcept;
  [[nodiscard]] std::vector<double> off_diagonal() const;
  [[nodiscard]] PhiMatrix select(std::span<const std::size_t> judges) const;
};

struct NeffResult {
  std::size_t k = 0;
  double mean_phi = 0.0;
  double phi_sd = 0.0;  ///< population SD of the off-diagonal entries
  double phi_min = 0.0;
  double phi_max = 0.0;
  double kish_neff = 0.0;
  double eigen_neff = 0.0;
  double lambda_max = 0.0;
  double independence_ratio = 0.0;  ///< kish_neff / k
  std::optional<double> ci_low;     ///< 95% percentile bootstrap of kish_neff
  std::optional<double> ci_high;
  std::vector<std::string> zero_variance_judges;
};

struct BootstrapSummary {
  double low = 0.0;   ///< 2.5th percentile
  double high = 0.0;  ///< 97.5th percentile
  double mean = 0.0;
  double sd = 0.0;
  std::size_t resamples = 0;
};

[[nodiscard]] ErrorMatrix error_matrix(const VoteMatrix& votes, std::span<const GoldLabel> gold);
[[nodiscard]] ErrorMatrix error_matrix(const PanelDataset& dataset, std::span<const GoldLabel> gold);

/// Pearson correlation of every pair of error columns. Throws std::invalid_argument when
/// there are fewer than 2 items.
[[nodiscard]] PhiMatrix phi_matrix(const ErrorMatrix& errors);

/// k / (1 + (k - 1) * mean_phi). Throws NumericalError when the denominator is not
/// positive and std::invalid_argument when k < 1.
[[nodiscard]] double kish_neff(std::size_t k, double mean_phi);

struct EigenNeff {
  double lambda_max = 0.0;
  double neff = 0.0;
};

/// k / lambda_max of the phi matrix. Throws std::invalid_argument on a non-symmetric
/// input (tolerance 1e-9); the matrix is symmetrized before the eigen-solve.
[[nodiscard]] EigenNeff eigen_neff(const Eigen::MatrixXd& phi);

/// Point estimates (no bootstrap interval) for an error matrix.
[[nodiscard]] NeffResult summarize_neff(const ErrorMatrix& errors,
                                        std::span<const JudgeMeta> judges = {});

/// Percentile bootstrap of the Kish n_eff over item resamples. Resample r draws its
/// items from make_rng(seed, "neff-bootstrap", r).
[[nodiscard]] BootstrapSummary bootstrap_neff(const ErrorMatrix& errors, std::size_t resamples,
                                              std::uint64_t seed);

/// Full pipeline: point estimates plus the bootstrap interval.
[[nodiscard]] NeffResult compute_neff(const ErrorMatrix& errors, std::span<const JudgeMeta> judges,
                                      std::size_t resamples, std::uint64_t seed);

/// Nominal Krippendorff's alpha over the judges' labels (no missing values):
/// alpha = 1 - (N - 1) * sum_{c != d} o_cd / sum_{c != d} n_c n_d, where o is the
/// coincidence matrix, n_c its margins and N = items * judges. When only one label is
/// ever used the expected disagreement is zero and alpha is reported as 1.
[[nodiscard]] double krippendorff_alpha(const VoteMatrix& votes);
[[nodiscard]] double krippendorff_alpha(const PanelDataset& dataset);

/// n_eff pipeline (point estimates) on the items accepted by `keep(item_index)`.
[[nodiscard]] NeffResult neff_on_subset(const ErrorMatrix& errors,
                                        const std::function<bool(std::size_t)>& keep,
                                        std::span<const JudgeMeta> judges = {});

struct LeaveOneOutRow {
  std::string judge_id;
  double neff_without = 0.0;
  double delta_neff = 0.0;
  double acc_without = 0.0;
  double delta_acc = 0.0;
  /// Paired item-level percentile bootstrap interval of delta_acc.
  double delta_acc_ci_low = 0.0;
  double delta_acc_ci_high = 0.0;
};

struct LeaveOneOutResult {
  double full_neff = 0.0;
  double full_accuracy = 0.0;
  std::vector<LeaveOneOutRow> rows;  ///< canonical judge order
};

/// Removes each judge in turn and recomputes Kish n_eff and majority-vote accuracy on
/// the remaining judges. Requires k >= 3.
[[nodiscard]] LeaveOneOutResult leave_one_out(const PanelDataset& dataset,
                                              std::span<const GoldLabel> gold,
                                              std::size_t resamples, std::uint64_t seed);

struct ScalingRow {
  std::size_t k = 0;
  std::size_t subsets = 0;
  double mean_neff = 0.0;
  double min_neff = 0.0;
  double max_neff = 0.0;
  double kish_prediction = 0.0;
};

struct ScalingCurve {
  std::vector<ScalingRow> rows;
  double global_mean_phi = 0.0;
  std::optional<double> asymptote;  ///< 1 / mean_phi, absent when mean_phi <= 0
  bool sampled = false;             ///< true when subsets were sampled (panel > 16)
};

/// n_eff over every judge subset of each size 2..K (exhaustive for K <= 16, otherwise
/// 10,000 sampled subsets per size drawn from make_rng(seed, "scaling", size)).
[[nodiscard]] ScalingCurve scaling_curve(const PhiMatrix& phi, std::uint64_t seed = 0);

struct JudgePair {
  std::string judge_a;
  std::string judge_b;
  std::string family_a;
  std::string family_b;
  double phi = 0.0;
};

struct FamilyContrast {
  std::optional<double> mean_phi_same_family;
  double mean_phi_cross_family = 0.0;
  std::optional<double> difference;  ///< same - cross
  std::vector<JudgePair> top_pairs;  ///< three largest-phi pairs
};

[[nodiscard]] FamilyContrast family_contrast(const PhiMatrix& phi, std::span<const JudgeMeta> judges);

struct ConvergenceRow {
  std::size_t n = 0;
  double mean_neff = 0.0;
  double pct2_5 = 0.0;
  double pct97_5 = 0.0;
  double std = 0.0;
  bool bootstrap = false;  ///< true for the full-size row
};

/// Mean and percentile band of Kish n_eff over `repeats` entropy-stratified subsamples
/// for each size below the item count; the full-size row uses the bootstrap instead.
[[nodiscard]] std::vector<ConvergenceRow> convergence_curve(const ErrorMatrix& errors,
                                                            std::span<const double> entropies,
                                                            std::span<const std::size_t> sizes,
                                                            std::size_t repeats,
                                                            std::size_t bootstrap_resamples,
                                                            std::uint64_t seed);

struct ErrorHistogram {
  std::vector<std::size_t> observed;    ///< index = errors per item, 0..k
  std::vector<double> independence_null;  ///< expected counts under product-Bernoulli errors
};

/// Row-sum histogram plus the exact Poisson-binomial expectation under independent
/// judges with the observed per-judge error rates.
[[nodiscard]] ErrorHistogram error_count_histogram(const ErrorMatrix& errors);

/// Exact Poisson-binomial pmf of the number of successes among independent trials.
[[nodiscard]] std::vector<double> poisson_binomial_pmf(std::span<const double> probabilities);

}  // namespace paneldiag
