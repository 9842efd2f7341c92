#include "paneldiag/condorcet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string_view>

#include "paneldiag/aggregation.hpp"
#include "paneldiag/parallel.hpp"
#include "paneldiag/rng.hpp"
#include "paneldiag/stat_tests.hpp"

namespace paneldiag {

ConfusionSet::ConfusionSet(std::size_t judges, std::size_t labels, DifficultyBins bins, std::vector<double> values)
    : judges_(judges), labels_(labels), bins_(std::move(bins)), values_(std::move(values)) {
  if (values_.size() != judges_ * bins_.bin_count() * labels_ * labels_) {
    throw std::invalid_argument("ConfusionSet: value count does not match shape");
  }
}

ConfusionSet ConfusionSet::identity(std::size_t judges, std::size_t labels) {
  std::vector<double> values(judges * labels * labels, 0.0);
  for (std::size_t j = 0; j < judges; ++j) {
    for (std::size_t t = 0; t < labels; ++t) values[(j * labels + t) * labels + t] = 1.0;
  }
  return ConfusionSet(judges, labels, DifficultyBins{}, std::move(values));
}

namespace {

/// Gold-aligned, resolved view of a dataset shared by every Condorcet routine.
struct Panel {
  const LabelVocabulary& vocabulary;
  VoteMatrix votes;
  std::vector<LabelId> gold;
  std::vector<double> entropy;
  std::vector<std::uint8_t> majority_correct;

  Panel(const PanelDataset& dataset, std::span<const GoldLabel> labels)
      : vocabulary(dataset.vocabulary()), votes(resolved_votes(dataset)), entropy(human_entropies(dataset)) {
    if (labels.size() != dataset.item_count()) {
      throw std::invalid_argument("Condorcet model: gold labels do not match the items");
    }
    gold.reserve(labels.size());
    for (const GoldLabel& g : labels) gold.push_back(g.label);
    const auto decisions = majority_decisions(votes, vocabulary);
    majority_correct.reserve(decisions.size());
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      majority_correct.push_back(decisions[i].label == gold[i] ? 1 : 0);
    }
  }

  [[nodiscard]] std::vector<std::size_t> all_items() const {
    std::vector<std::size_t> items(gold.size());
    std::iota(items.begin(), items.end(), 0);
    return items;
  }
};

ConfusionSet fit_on(const Panel& panel, std::span<const std::size_t> items, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("fit_confusion: bins must be at least 1");
  constexpr double kSmoothing = 0.5;
  std::vector<double> entropies;
  entropies.reserve(items.size());
  for (const std::size_t i : items) entropies.push_back(panel.entropy[i]);
  DifficultyBins edges = DifficultyBins::fit(entropies, bins);

  const std::size_t k = panel.votes.judge_count();
  const std::size_t labels = panel.votes.label_count();
  const std::size_t bin_count = edges.bin_count();
  std::vector<double> values(k * bin_count * labels * labels, 0.0);
  for (const std::size_t i : items) {
    const std::size_t b = edges.assign(panel.entropy[i]);
    const LabelId truth = panel.gold[i];
    for (std::size_t j = 0; j < k; ++j) {
      values[((j * bin_count + b) * labels + truth) * labels + panel.votes.at(i, j)] += 1.0;
    }
  }
  for (std::size_t row = 0; row < values.size(); row += labels) {
    double total = 0.0;
    for (std::size_t p = 0; p < labels; ++p) total += values[row + p];
    for (std::size_t p = 0; p < labels; ++p) {
      values[row + p] = (values[row + p] + kSmoothing) / (total + kSmoothing * static_cast<double>(labels));
    }
  }
  return ConfusionSet(k, labels, std::move(edges), std::move(values));
}

struct SimTally {
  std::vector<double> predicted;
  std::vector<std::size_t> unanimous;
  std::vector<std::size_t> unanimous_correct;
};

SimTally simulate_on(const ConfusionSet& confusion, const Panel& panel, std::span<const std::size_t> items,
                     std::size_t sims, std::uint64_t seed, std::string_view stream, bool parallel) {
  if (sims < 1) throw std::invalid_argument("simulate_condorcet: sims must be positive");
  const std::size_t k = panel.votes.judge_count();
  const std::size_t labels = panel.votes.label_count();
  if (confusion.judge_count() != k || confusion.label_count() != labels) {
    throw std::invalid_argument("simulate_condorcet: confusion set does not match the panel");
  }

  SimTally tally;
  tally.predicted.assign(items.size(), 0.0);
  tally.unanimous.assign(items.size(), 0);
  tally.unanimous_correct.assign(items.size(), 0);

  const auto run_item = [&](std::size_t pos) {
    const std::size_t i = items[pos];
    const std::size_t bin = confusion.bins().assign(panel.entropy[i]);
    const LabelId truth = panel.gold[i];
    // Per-judge cumulative distributions for this item's (bin, gold label).
    std::vector<double> cdf(k * labels);
    for (std::size_t j = 0; j < k; ++j) {
      const auto row = confusion.row(j, bin, truth);
      double acc = 0.0;
      for (std::size_t p = 0; p < labels; ++p) cdf[j * labels + p] = (acc += row[p]);
    }
    Rng rng = make_rng(seed, stream, pos);
    std::vector<std::uint32_t> counts(labels);
    std::vector<LabelId> top_labels;
    top_labels.reserve(labels);
    std::size_t correct = 0;
    std::size_t unanimous = 0;
    std::size_t unanimous_correct = 0;
    for (std::size_t s = 0; s < sims; ++s) {
      std::fill(counts.begin(), counts.end(), 0U);
      for (std::size_t j = 0; j < k; ++j) {
        const double u = uniform01(rng);
        const double* c = cdf.data() + j * labels;
        std::size_t p = 0;
        while (p + 1 < labels && u >= c[p]) ++p;
        ++counts[p];
      }
      const std::uint32_t top = *std::max_element(counts.begin(), counts.end());
      top_labels.clear();
      for (std::size_t p = 0; p < labels; ++p) {
        if (counts[p] == top) top_labels.push_back(static_cast<LabelId>(p));
      }
      const LabelId winner =
          top_labels.size() == 1 ? top_labels.front() : top_labels[uniform_index(rng, top_labels.size())];
      const bool hit = winner == truth;
      correct += hit ? 1 : 0;
      if (top == k) {
        ++unanimous;
        unanimous_correct += hit ? 1 : 0;
      }
    }
    tally.predicted[pos] = static_cast<double>(correct) / static_cast<double>(sims);
    tally.unanimous[pos] = unanimous;
    tally.unanimous_correct[pos] = unanimous_correct;
  };

  if (parallel) {
    parallel_for(items.size(), run_item);
  } else {
    for (std::size_t pos = 0; pos < items.size(); ++pos) run_item(pos);
  }
  return tally;
}

/// Predicted minus actual accuracy over the listed items.
double shortfall_on(const Panel& panel, std::span<const std::size_t> items, std::span<const double> predicted) {
  double sum = 0.0;
  for (std::size_t pos = 0; pos < items.size(); ++pos) {
    sum += predicted[pos] - static_cast<double>(panel.majority_correct[items[pos]]);
  }
  return sum / static_cast<double>(items.size());
}

double fit_and_shortfall(const Panel& panel, std::span<const std::size_t> fit_items,
                         std::span<const std::size_t> sim_items, std::size_t bins, std::size_t sims,
                         std::uint64_t seed, std::string_view stream, bool parallel) {
  const ConfusionSet confusion = fit_on(panel, fit_items, bins);
  const SimTally tally = simulate_on(confusion, panel, sim_items, sims, seed, stream, parallel);
  return shortfall_on(panel, sim_items, tally.predicted);
}

}  // namespace

ConfusionSet fit_confusion(const PanelDataset& dataset, std::span<const GoldLabel> gold, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("fit_confusion: bins must be at least 1");
  const Panel panel(dataset, gold);
  return fit_on(panel, panel.all_items(), bins);
}

CondorcetPrediction simulate_condorcet(const ConfusionSet& confusion, const PanelDataset& dataset,
                                       std::span<const GoldLabel> gold, std::size_t sims, std::uint64_t seed) {
  if (sims < 100) throw std::invalid_argument("simulate_condorcet: sims must be at least 100");
  const Panel panel(dataset, gold);
  const std::vector<std::size_t> items = panel.all_items();
  SimTally tally = simulate_on(confusion, panel, items, sims, seed, "condorcet", true);

  CondorcetPrediction out;
  out.sims = sims;
  out.per_item_pred = std::move(tally.predicted);
  const std::size_t n = items.size();
  const std::size_t labels = panel.votes.label_count();

  std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> profile(labels, 0);
    for (const LabelId v : panel.votes.row(i)) ++profile[v];
    std::sort(profile.begin(), profile.end(), std::greater<>());
    groups[profile].push_back(i);
  }

  for (const auto& [profile, members] : groups) {
    CondorcetBin bin;
    bin.profile = profile;
    std::vector<std::int64_t> counts(profile.begin(), profile.end());
    bin.panel_entropy = entropy_bits(counts) * std::log(2.0);
    bin.n = members.size();
    double predicted = 0.0;
    for (const std::size_t i : members) {
      bin.correct += panel.majority_correct[i];
      predicted += out.per_item_pred[i];
    }
    bin.actual_acc = static_cast<double>(bin.correct) / static_cast<double>(bin.n);
    bin.predicted_acc = predicted / static_cast<double>(bin.n);
    bin.gap = bin.actual_acc - bin.predicted_acc;
    bin.p_value = binomial_test_onesided(bin.correct, bin.n, std::clamp(bin.predicted_acc, 0.0, 1.0));
    std::tie(bin.wilson_low, bin.wilson_high) = wilson_interval(bin.correct, bin.n);
    bin.tabulated = bin.n >= 5;
    out.per_bin.push_back(std::move(bin));
  }
  std::stable_sort(out.per_bin.begin(), out.per_bin.end(), [](const CondorcetBin& a, const CondorcetBin& b) {
    return a.panel_entropy < b.panel_entropy;
  });

  std::size_t correct = 0;
  for (const std::uint8_t c : panel.majority_correct) correct += c;
  out.actual_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  out.predicted_accuracy =
      std::accumulate(out.per_item_pred.begin(), out.per_item_pred.end(), 0.0) / static_cast<double>(n);
  for (const CondorcetBin& bin : out.per_bin) {
    out.weighted_gap += static_cast<double>(bin.n) / static_cast<double>(n) * bin.gap;
  }
  return out;
}

std::pair<double, double> gap_ci(const PanelDataset& dataset, std::span<const GoldLabel> gold, std::size_t bins,
                                 std::size_t resamples, std::size_t sims, std::uint64_t seed) {
  if (resamples < 100) throw std::invalid_argument("gap_ci: resamples must be at least 100");
  const Panel panel(dataset, gold);
  const std::size_t n = panel.gold.size();
  std::vector<double> estimates(resamples);
  parallel_for(resamples, [&](std::size_t r) {
    Rng rng = make_rng(seed, "gap-bootstrap", r);
    std::vector<std::size_t> items(n);
    for (std::size_t& i : items) i = uniform_index(rng, n);
    estimates[r] = fit_and_shortfall(panel, items, items, bins, sims, derive_seed(seed, "gap-bootstrap-sim", r),
                                     "condorcet", false);
  });
  return {percentile(estimates, 2.5), percentile(estimates, 97.5)};
}

std::vector<DecompositionRow> difficulty_decomposition(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                                       std::span<const std::size_t> bins_list, std::size_t sims,
                                                       std::uint64_t seed) {
  if (std::find(bins_list.begin(), bins_list.end(), std::size_t{1}) == bins_list.end()) {
    throw std::invalid_argument("difficulty_decomposition: bins_list must contain 1");
  }
  const Panel panel(dataset, gold);
  const std::vector<std::size_t> items = panel.all_items();
  std::vector<DecompositionRow> rows;
  for (const std::size_t b : bins_list) {
    rows.push_back({b, fit_and_shortfall(panel, items, items, b, sims, seed, "condorcet", true), std::nullopt});
  }
  const double pooled =
      std::find_if(rows.begin(), rows.end(), [](const DecompositionRow& r) { return r.bins == 1; })->shortfall;
  if (pooled > 0.0) {
    for (DecompositionRow& row : rows) row.fraction_explained = (pooled - row.shortfall) / pooled;
  }
  return rows;
}

SplitHalfResult split_half(const PanelDataset& dataset, std::span<const GoldLabel> gold, std::size_t bins,
                           std::size_t sims, std::uint64_t seed) {
  const Panel panel(dataset, gold);
  const std::size_t n = panel.gold.size();
  if (n < 20) throw std::invalid_argument("split_half needs at least 20 items");

  const DifficultyBins terciles = DifficultyBins::fit(panel.entropy, 3);
  std::vector<std::vector<std::size_t>> groups(3);
  for (std::size_t i = 0; i < n; ++i) groups[terciles.assign(panel.entropy[i])].push_back(i);
  std::vector<std::size_t> half_a;
  std::vector<std::size_t> half_b;
  bool next_to_a = true;
  for (std::size_t t = 0; t < groups.size(); ++t) {
    Rng rng = make_rng(seed, "split-half", t);
    shuffle(std::span<std::size_t>(groups[t]), rng);
    for (const std::size_t i : groups[t]) {
      (next_to_a ? half_a : half_b).push_back(i);
      next_to_a = !next_to_a;
    }
  }
  std::sort(half_a.begin(), half_a.end());
  std::sort(half_b.begin(), half_b.end());

  SplitHalfResult r;
  const std::vector<std::size_t> all = panel.all_items();
  r.in_sample_gap = fit_and_shortfall(panel, all, all, bins, sims, seed, "condorcet", true);
  r.gap_a_to_b = fit_and_shortfall(panel, half_a, half_b, bins, sims, seed, "split-half-b", true);
  r.gap_b_to_a = fit_and_shortfall(panel, half_b, half_a, bins, sims, seed, "split-half-a", true);
  r.cv_gap = 0.5 * (r.gap_a_to_b + r.gap_b_to_a);
  if (r.cv_gap == r.in_sample_gap) {
    r.ratio = 1.0;
  } else if (r.in_sample_gap != 0.0) {
    r.ratio = r.cv_gap / r.in_sample_gap;
  }
  return r;
}

double closed_form_binary(std::size_t k, double p) {
  if (k % 2 == 0) throw std::invalid_argument("closed_form_binary: k must be odd");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("closed_form_binary: p must lie in [0, 1]");
  double total = 0.0;
  for (std::size_t j = (k + 1) / 2; j <= k; ++j) {
    double binom = 1.0;
    for (std::size_t t = 1; t <= j; ++t) binom = binom * static_cast<double>(k - j + t) / static_cast<double>(t);
    total += binom * std::pow(p, static_cast<double>(j)) * std::pow(1.0 - p, static_cast<double>(k - j));
  }
  return total;
}

UnanimousCheck unanimous_error_check(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                     const ConfusionSet& confusion, std::size_t sims, std::uint64_t seed) {
  const Panel panel(dataset, gold);
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < panel.gold.size(); ++i) {
    const auto row = panel.votes.row(i);
    if (std::all_of(row.begin(), row.end(), [&](LabelId v) { return v == row.front(); })) items.push_back(i);
  }
  if (items.empty()) throw std::invalid_argument("unanimous_error_check: no unanimous items");

  UnanimousCheck out;
  out.unanimous_items = items.size();
  std::size_t correct = 0;
  for (const std::size_t i : items) correct += panel.majority_correct[i];
  out.actual_accuracy = static_cast<double>(correct) / static_cast<double>(items.size());

  const SimTally tally = simulate_on(confusion, panel, items, sims, seed, "unanimous", true);
  const std::size_t unanimous = std::accumulate(tally.unanimous.begin(), tally.unanimous.end(), std::size_t{0});
  const std::size_t hits =
      std::accumulate(tally.unanimous_correct.begin(), tally.unanimous_correct.end(), std::size_t{0});
  if (unanimous > 0) out.predicted_accuracy = static_cast<double>(hits) / static_cast<double>(unanimous);
  return out;
}

}  // namespace paneldiag
