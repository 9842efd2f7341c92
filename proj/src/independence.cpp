#include "paneldiag/independence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "paneldiag/aggregation.hpp"
#include "paneldiag/errors.hpp"
#include "paneldiag/parallel.hpp"
#include "paneldiag/rng.hpp"

namespace paneldiag {

// ---------------------------------------------------------------------------
// ErrorMatrix

ErrorMatrix::ErrorMatrix(std::size_t items, std::size_t judges, std::vector<std::uint8_t> column_major)
    : items_(items), judges_(judges), values_(std::move(column_major)) {
  if (values_.size() != items_ * judges_) {
    throw std::invalid_argument("ErrorMatrix: value count does not match shape");
  }
  for (const std::uint8_t v : values_) {
    if (v > 1) throw std::invalid_argument("ErrorMatrix: entries must be 0 or 1");
  }
}

std::size_t ErrorMatrix::row_sum(std::size_t item) const noexcept {
  std::size_t sum = 0;
  for (std::size_t j = 0; j < judges_; ++j) sum += at(item, j);
  return sum;
}

double ErrorMatrix::error_rate(std::size_t judge) const noexcept {
  if (items_ == 0) return 0.0;
  const auto col = column(judge);
  return static_cast<double>(std::accumulate(col.begin(), col.end(), std::size_t{0})) /
         static_cast<double>(items_);
}

std::vector<double> ErrorMatrix::error_rates() const {
  std::vector<double> rates(judges_);
  for (std::size_t j = 0; j < judges_; ++j) rates[j] = error_rate(j);
  return rates;
}

ErrorMatrix ErrorMatrix::select_items(std::span<const std::size_t> items) const {
  std::vector<std::uint8_t> out;
  out.reserve(items.size() * judges_);
  for (std::size_t j = 0; j < judges_; ++j) {
    for (const std::size_t i : items) out.push_back(at(i, j));
  }
  return ErrorMatrix(items.size(), judges_, std::move(out));
}

ErrorMatrix ErrorMatrix::select_judges(std::span<const std::size_t> judges) const {
  std::vector<std::uint8_t> out;
  out.reserve(items_ * judges.size());
  for (const std::size_t j : judges) {
    const auto col = column(j);
    out.insert(out.end(), col.begin(), col.end());
  }
  return ErrorMatrix(items_, judges.size(), std::move(out));
}

ErrorMatrix error_matrix(const VoteMatrix& votes, std::span<const GoldLabel> gold) {
  if (gold.size() != votes.item_count()) {
    throw std::invalid_argument("error_matrix: " + std::to_string(gold.size()) +
                                " gold labels for " + std::to_string(votes.item_count()) + " items");
  }
  const std::size_t n = votes.item_count();
  const std::size_t k = votes.judge_count();
  std::vector<std::uint8_t> values(n * k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      values[j * n + i] = votes.at(i, j) != gold[i].label ? 1 : 0;
    }
  }
  return ErrorMatrix(n, k, std::move(values));
}

ErrorMatrix error_matrix(const PanelDataset& dataset, std::span<const GoldLabel> gold) {
  return error_matrix(resolved_votes(dataset), gold);
}

// ---------------------------------------------------------------------------
// Phi

namespace {

/// Sufficient statistics for all pairwise phi values under item multiplicity weights.
struct PairCounts {
  std::size_t k = 0;
  double total = 0.0;
  std::vector<double> sums;  ///< per judge
  std::vector<double> both;  ///< k x k co-error counts

  explicit PairCounts(std::size_t judges) : k(judges), sums(judges, 0.0), both(judges * judges, 0.0) {}

  [[nodiscard]] double phi(std::size_t a, std::size_t b) const noexcept {
    const double va = sums[a] * (total - sums[a]);
    const double vb = sums[b] * (total - sums[b]);
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    return (total * both[a * k + b] - sums[a] * sums[b]) / std::sqrt(va * vb);
  }

  [[nodiscard]] bool zero_variance(std::size_t j) const noexcept {
    return sums[j] <= 0.0 || sums[j] >= total;
  }

  [[nodiscard]] double mean_phi() const noexcept {
    if (k < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) sum += phi(a, b);
    }
    return sum / static_cast<double>(k * (k - 1) / 2);
  }
};

/// Distinct error rows of the matrix with their multiplicities, so resampling loops only
/// touch each pattern once (at most 2^k patterns, 512 for a 9-judge panel).
struct RowPatterns {
  std::size_t k = 0;
  std::vector<std::vector<std::uint8_t>> patterns;
  std::vector<std::size_t> pattern_of_item;

  explicit RowPatterns(const ErrorMatrix& errors) : k(errors.judge_count()) {
    std::map<std::vector<std::uint8_t>, std::size_t> index;
    pattern_of_item.reserve(errors.item_count());
    std::vector<std::uint8_t> row(k);
    for (std::size_t i = 0; i < errors.item_count(); ++i) {
      for (std::size_t j = 0; j < k; ++j) row[j] = errors.at(i, j);
      const auto [it, inserted] = index.try_emplace(row, patterns.size());
      if (inserted) patterns.push_back(row);
      pattern_of_item.push_back(it->second);
    }
  }

  [[nodiscard]] PairCounts counts(std::span<const double> pattern_weights) const {
    PairCounts c(k);
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      const double w = pattern_weights[p];
      if (w == 0.0) continue;
      c.total += w;
      const auto& row = patterns[p];
      for (std::size_t a = 0; a < k; ++a) {
        if (!row[a]) continue;
        c.sums[a] += w;
        for (std::size_t b = 0; b < k; ++b) {
          if (row[b]) c.both[a * k + b] += w;
        }
      }
    }
    return c;
  }
};

PairCounts pair_counts(const ErrorMatrix& errors) {
  const std::size_t k = errors.judge_count();
  PairCounts c(k);
  c.total = static_cast<double>(errors.item_count());
  for (std::size_t a = 0; a < k; ++a) {
    const auto ca = errors.column(a);
    c.sums[a] = static_cast<double>(std::accumulate(ca.begin(), ca.end(), std::size_t{0}));
    for (std::size_t b = a; b < k; ++b) {
      const auto cb = errors.column(b);
      std::size_t both = 0;
      for (std::size_t i = 0; i < ca.size(); ++i) both += ca[i] & cb[i];
      c.both[a * k + b] = c.both[b * k + a] = static_cast<double>(both);
    }
  }
  return c;
}

double population_sd(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace

double PhiMatrix::mean_off_diagonal() const noexcept {
  const auto k = static_cast<std::size_t>(phi.rows());
  if (k < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) sum += phi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return sum / static_cast<double>(k * (k - 1) / 2);
}

std::vector<double> PhiMatrix::off_diagonal() const {
  std::vector<double> out;
  for (Eigen::Index a = 0; a < phi.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < phi.cols(); ++b) out.push_back(phi(a, b));
  }
  return out;
}

PhiMatrix PhiMatrix::select(std::span<const std::size_t> judges) const {
  PhiMatrix out;
  const auto m = static_cast<Eigen::Index>(judges.size());
  out.phi.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      out.phi(a, b) = phi(static_cast<Eigen::Index>(judges[static_cast<std::size_t>(a)]),
                          static_cast<Eigen::Index>(judges[static_cast<std::size_t>(b)]));
    }
  }
  for (std::size_t a = 0; a < judges.size(); ++a) {
    if (std::find(zero_variance_judges.begin(), zero_variance_judges.end(), judges[a]) !=
        zero_variance_judges.end()) {
      out.zero_variance_judges.push_back(a);
    }
  }
  return out;
}

PhiMatrix phi_matrix(const ErrorMatrix& errors) {
  if (errors.item_count() < 2) throw std::invalid_argument("phi_matrix needs at least 2 items");
  const std::size_t k = errors.judge_count();
  const PairCounts counts = pair_counts(errors);
  PhiMatrix out;
  out.phi = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a) {
    if (counts.zero_variance(a)) out.zero_variance_judges.push_back(a);
    for (std::size_t b = a + 1; b < k; ++b) {
      const double v = std::clamp(counts.phi(a, b), -1.0, 1.0);
      out.phi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      out.phi(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  }
  return out;
}

double kish_neff(std::size_t k, double mean_phi) {
  if (k < 1) throw std::invalid_argument("kish_neff: k must be at least 1");
  const double denominator = 1.0 + static_cast<double>(k - 1) * mean_phi;
  if (!(denominator > 0.0)) {
    throw NumericalError("Kish formula breaks down: 1 + (k-1)*mean_phi = " + std::to_string(denominator));
  }
  return static_cast<double>(k) / denominator;
}

EigenNeff eigen_neff(const Eigen::MatrixXd& phi) {
  if (phi.rows() != phi.cols() || phi.rows() == 0) {
    throw std::invalid_argument("eigen_neff: matrix must be square and non-empty");
  }
  if ((phi - phi.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("eigen_neff: matrix is not symmetric");
  }
  const Eigen::MatrixXd symmetric = 0.5 * (phi + phi.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen-solve of the phi matrix failed");
  const double lambda_max = solver.eigenvalues().maxCoeff();
  if (!(lambda_max > 0.0)) throw NumericalError("phi matrix has no positive eigenvalue");
  return {lambda_max, static_cast<double>(phi.rows()) / lambda_max};
}

NeffResult summarize_neff(const ErrorMatrix& errors, std::span<const JudgeMeta> judges) {
  const PhiMatrix phi = phi_matrix(errors);
  const std::vector<double> off = phi.off_diagonal();
  NeffResult r;
  r.k = errors.judge_count();
  r.mean_phi = phi.mean_off_diagonal();
  r.phi_sd = population_sd(off);
  if (!off.empty()) {
    r.phi_min = *std::min_element(off.begin(), off.end());
    r.phi_max = *std::max_element(off.begin(), off.end());
  }
  r.kish_neff = kish_neff(r.k, r.mean_phi);
  const EigenNeff eig = eigen_neff(phi.phi);
  r.lambda_max = eig.lambda_max;
  r.eigen_neff = eig.neff;
  r.independence_ratio = r.kish_neff / static_cast<double>(r.k);
  for (const std::size_t j : phi.zero_variance_judges) {
    r.zero_variance_judges.push_back(j < judges.size() ? judges[j].judge_id : "judge#" + std::to_string(j));
  }
  return r;
}

BootstrapSummary bootstrap_neff(const ErrorMatrix& errors, std::size_t resamples, std::uint64_t seed) {
  if (resamples < 1) throw std::invalid_argument("bootstrap needs at least one resample");
  const RowPatterns rows(errors);
  const std::size_t n = errors.item_count();
  const std::size_t k = errors.judge_count();
  std::vector<double> estimates(resamples);
  parallel_for(resamples, [&](std::size_t r) {
    Rng rng = make_rng(seed, "neff-bootstrap", r);
    std::vector<double> weights(rows.patterns.size(), 0.0);
    for (std::size_t draw = 0; draw < n; ++draw) {
      weights[rows.pattern_of_item[uniform_index(rng, n)]] += 1.0;
    }
    estimates[r] = kish_neff(k, rows.counts(weights).mean_phi());
  });

  BootstrapSummary s;
  s.resamples = resamples;
  s.low = percentile(estimates, 2.5);
  s.high = percentile(estimates, 97.5);
  s.mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(resamples);
  s.sd = population_sd(estimates);
  return s;
}

NeffResult compute_neff(const ErrorMatrix& errors, std::span<const JudgeMeta> judges,
                        std::size_t resamples, std::uint64_t seed) {
  if (resamples < 100) throw std::invalid_argument("bootstrap_neff_ci: resamples must be at least 100");
  NeffResult r = summarize_neff(errors, judges);
  const BootstrapSummary ci = bootstrap_neff(errors, resamples, seed);
  // Percentiles of the resampled statistic need not bracket the point estimate when
  // the bootstrap distribution is degenerate; widen to keep low <= estimate <= high.
  r.ci_low = std::min(ci.low, r.kish_neff);
  r.ci_high = std::max(ci.high, r.kish_neff);
  return r;
}

// ---------------------------------------------------------------------------
// Krippendorff's alpha

double krippendorff_alpha(const VoteMatrix& votes) {
  const std::size_t n = votes.item_count();
  const std::size_t m = votes.judge_count();
  if (m < 2) throw std::invalid_argument("krippendorff_alpha needs at least 2 judges");
  if (n < 2) throw std::invalid_argument("krippendorff_alpha needs at least 2 items");
  const std::size_t labels = votes.label_count();

  std::vector<double> margins(labels, 0.0);
  double observed_disagreement = 0.0;  // sum over c != d of o_cd
  std::vector<double> item_counts(labels);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(item_counts.begin(), item_counts.end(), 0.0);
    for (const LabelId v : votes.row(i)) item_counts[v] += 1.0;
    double squares = 0.0;
    for (std::size_t c = 0; c < labels; ++c) {
      margins[c] += item_counts[c];
      squares += item_counts[c] * item_counts[c];
    }
    const auto md = static_cast<double>(m);
    observed_disagreement += (md * md - squares) / (md - 1.0);
  }
  const auto total = static_cast<double>(n * m);
  double margin_squares = 0.0;
  for (const double c : margins) margin_squares += c * c;
  const double expected_pairs = total * total - margin_squares;
  if (expected_pairs <= 0.0) return 1.0;
  return 1.0 - (total - 1.0) * observed_disagreement / expected_pairs;
}

double krippendorff_alpha(const PanelDataset& dataset) {
  return krippendorff_alpha(resolved_votes(dataset));
}

// ---------------------------------------------------------------------------
// Subsets, leave-one-out, scaling, families

NeffResult neff_on_subset(const ErrorMatrix& errors, const std::function<bool(std::size_t)>& keep,
                          std::span<const JudgeMeta> judges) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < errors.item_count(); ++i) {
    if (keep(i)) kept.push_back(i);
  }
  if (kept.empty()) throw std::invalid_argument("neff_on_subset: no items pass the filter");
  if (kept.size() < 2) throw std::invalid_argument("neff_on_subset: fewer than 2 items pass the filter");
  return summarize_neff(errors.select_items(kept), judges);
}

LeaveOneOutResult leave_one_out(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                std::size_t resamples, std::uint64_t seed) {
  const std::size_t k = dataset.judge_count();
  if (k < 3) throw std::invalid_argument("leave_one_out needs at least 3 judges");
  const VoteMatrix votes = resolved_votes(dataset);
  const ErrorMatrix errors = error_matrix(votes, gold);
  const PhiMatrix phi = phi_matrix(errors);
  const std::size_t n = votes.item_count();

  const auto correct_vector = [&](std::span<const MajorityDecision> decisions) {
    std::vector<double> correct(n);
    for (std::size_t i = 0; i < n; ++i) correct[i] = decisions[i].label == gold[i].label ? 1.0 : 0.0;
    return correct;
  };
  const std::vector<double> full_correct = correct_vector(majority_decisions(votes, dataset.vocabulary()));

  LeaveOneOutResult result;
  result.full_neff = kish_neff(k, phi.mean_off_diagonal());
  result.full_accuracy = std::accumulate(full_correct.begin(), full_correct.end(), 0.0) / static_cast<double>(n);
  result.rows.resize(k);

  parallel_for(k, [&](std::size_t removed) {
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != removed) kept.push_back(j);
    }
    const std::vector<double> correct =
        correct_vector(majority_decisions(votes, dataset.vocabulary(), kept));
    LeaveOneOutRow& row = result.rows[removed];
    row.judge_id = dataset.judges()[removed].judge_id;
    row.neff_without = kish_neff(k - 1, phi.select(kept).mean_off_diagonal());
    row.delta_neff = row.neff_without - result.full_neff;
    row.acc_without = std::accumulate(correct.begin(), correct.end(), 0.0) / static_cast<double>(n);
    row.delta_acc = row.acc_without - result.full_accuracy;

    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i) diffs[i] = correct[i] - full_correct[i];
    std::vector<double> boot(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
      Rng rng = make_rng(seed, "loo-bootstrap", removed * resamples + r);
      double sum = 0.0;
      for (std::size_t d = 0; d < n; ++d) sum += diffs[uniform_index(rng, n)];
      boot[r] = sum / static_cast<double>(n);
    }
    if (resamples > 0) {
      row.delta_acc_ci_low = percentile(boot, 2.5);
      row.delta_acc_ci_high = percentile(boot, 97.5);
    } else {
      row.delta_acc_ci_low = row.delta_acc_ci_high = row.delta_acc;
    }
  });
  return result;
}

ScalingCurve scaling_curve(const PhiMatrix& phi, std::uint64_t seed) {
  const std::size_t panel = phi.size();
  if (panel < 2) throw std::invalid_argument("scaling_curve needs at least 2 judges");
  constexpr std::size_t kExhaustiveLimit = 16;
  constexpr std::size_t kSampledSubsets = 10000;

  ScalingCurve curve;
  curve.global_mean_phi = phi.mean_off_diagonal();
  if (curve.global_mean_phi > 0.0) curve.asymptote = 1.0 / curve.global_mean_phi;
  curve.sampled = panel > kExhaustiveLimit;

  const auto subset_neff = [&](std::span<const std::size_t> members) {
    return kish_neff(members.size(), phi.select(members).mean_off_diagonal());
  };
  const auto record = [](ScalingRow& row, double value) {
    if (row.subsets == 0) {
      row.min_neff = row.max_neff = value;
    } else {
      row.min_neff = std::min(row.min_neff, value);
      row.max_neff = std::max(row.max_neff, value);
    }
    row.mean_neff += value;
    ++row.subsets;
  };

  curve.rows.resize(panel - 1);
  for (std::size_t size = 2; size <= panel; ++size) {
    curve.rows[size - 2].k = size;
    curve.rows[size - 2].kish_prediction = kish_neff(size, curve.global_mean_phi);
  }

  std::vector<std::size_t> members;
  if (!curve.sampled) {
    for (std::uint32_t mask = 1; mask < (1U << panel); ++mask) {
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      if (size < 2) continue;
      members.clear();
      for (std::size_t j = 0; j < panel; ++j) {
        if (mask & (1U << j)) members.push_back(j);
      }
      record(curve.rows[size - 2], subset_neff(members));
    }
  } else {
    std::vector<std::size_t> all(panel);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t size = 2; size <= panel; ++size) {
      Rng rng = make_rng(seed, "scaling", size);
      for (std::size_t s = 0; s < kSampledSubsets; ++s) {
        for (std::size_t t = 0; t < size; ++t) {
          std::swap(all[t], all[t + uniform_index(rng, panel - t)]);
        }
        members.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
        std::sort(members.begin(), members.end());
        record(curve.rows[size - 2], subset_neff(members));
      }
    }
  }
  for (ScalingRow& row : curve.rows) row.mean_neff /= static_cast<double>(row.subsets);
  return curve;
}

FamilyContrast family_contrast(const PhiMatrix& phi, std::span<const JudgeMeta> judges) {
  const std::size_t k = phi.size();
  if (judges.size() != k) throw std::invalid_argument("family_contrast: judge metadata does not match phi");
  double same_sum = 0.0;
  double cross_sum = 0.0;
  std::size_t same_n = 0;
  std::size_t cross_n = 0;
  std::vector<JudgePair> pairs;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double v = phi.phi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (judges[a].family == judges[b].family) {
        same_sum += v;
        ++same_n;
      } else {
        cross_sum += v;
        ++cross_n;
      }
      pairs.push_back({judges[a].judge_id, judges[b].judge_id, judges[a].family, judges[b].family, v});
    }
  }
  FamilyContrast out;
  if (same_n > 0) out.mean_phi_same_family = same_sum / static_cast<double>(same_n);
  if (cross_n > 0) out.mean_phi_cross_family = cross_sum / static_cast<double>(cross_n);
  if (same_n > 0 && cross_n > 0) out.difference = *out.mean_phi_same_family - out.mean_phi_cross_family;
  std::stable_sort(pairs.begin(), pairs.end(), [](const JudgePair& x, const JudgePair& y) { return x.phi > y.phi; });
  pairs.resize(std::min<std::size_t>(3, pairs.size()));
  out.top_pairs = std::move(pairs);
  return out;
}

// ---------------------------------------------------------------------------
// Convergence and error histogram

std::vector<ConvergenceRow> convergence_curve(const ErrorMatrix& errors, std::span<const double> entropies,
                                              std::span<const std::size_t> sizes, std::size_t repeats,
                                              std::size_t bootstrap_resamples, std::uint64_t seed) {
  const std::size_t n = errors.item_count();
  if (entropies.size() != n) throw std::invalid_argument("convergence_curve: entropies do not match items");
  if (repeats < 1) throw std::invalid_argument("convergence_curve: repeats must be positive");
  std::vector<ConvergenceRow> rows;
  for (const std::size_t size : sizes) {
    if (size > n) throw std::invalid_argument("convergence_curve: size exceeds item count");
    ConvergenceRow row;
    row.n = size;
    if (size == n) {
      const BootstrapSummary boot = bootstrap_neff(errors, bootstrap_resamples, seed);
      row.mean_neff = kish_neff(errors.judge_count(), phi_matrix(errors).mean_off_diagonal());
      row.pct2_5 = std::min(boot.low, row.mean_neff);
      row.pct97_5 = std::max(boot.high, row.mean_neff);
      row.std = boot.sd;
      row.bootstrap = true;
    } else {
      std::vector<double> estimates(repeats);
      const std::string stream = "convergence-" + std::to_string(size);
      parallel_for(repeats, [&](std::size_t r) {
        const std::vector<std::size_t> picked =
            stratified_indices(entropies, size, derive_seed(seed, stream, r), "sample");
        const ErrorMatrix sub = errors.select_items(picked);
        estimates[r] = kish_neff(sub.judge_count(), phi_matrix(sub).mean_off_diagonal());
      });
      row.mean_neff = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(repeats);
      row.pct2_5 = percentile(estimates, 2.5);
      row.pct97_5 = percentile(estimates, 97.5);
      row.std = population_sd(estimates);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> poisson_binomial_pmf(std::span<const double> probabilities) {
  std::vector<double> pmf{1.0};
  for (const double p : probabilities) {
    std::vector<double> next(pmf.size() + 1, 0.0);
    for (std::size_t s = 0; s < pmf.size(); ++s) {
      next[s] += pmf[s] * (1.0 - p);
      next[s + 1] += pmf[s] * p;
    }
    pmf = std::move(next);
  }
  return pmf;
}

ErrorHistogram error_count_histogram(const ErrorMatrix& errors) {
  const std::size_t k = errors.judge_count();
  ErrorHistogram h;
  h.observed.assign(k + 1, 0);
  for (std::size_t i = 0; i < errors.item_count(); ++i) ++h.observed[errors.row_sum(i)];
  const std::vector<double> pmf = poisson_binomial_pmf(errors.error_rates());
  h.independence_null.resize(k + 1);
  for (std::size_t s = 0; s <= k; ++s) h.independence_null[s] = pmf[s] * static_cast<double>(errors.item_count());
  return h;
}

}  // namespace paneldiag
