#include "paneldiag/distributional.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "paneldiag/aggregation.hpp"
#include "paneldiag/parallel.hpp"
#include "paneldiag/rng.hpp"
#include "paneldiag/stat_tests.hpp"

namespace paneldiag {

std::string to_string(Tercile tercile) {
  switch (tercile) {
    case Tercile::low:
      return "low";
    case Tercile::medium:
      return "medium";
    case Tercile::high:
      return "high";
  }
  return "unknown";
}

std::vector<Tercile> entropy_terciles(const PanelDataset& dataset) {
  const std::vector<double> entropies = human_entropies(dataset);
  const DifficultyBins bins = DifficultyBins::fit(entropies, 3);
  std::vector<Tercile> out;
  out.reserve(entropies.size());
  for (const double h : entropies) out.push_back(static_cast<Tercile>(bins.assign(h)));
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: length mismatch");
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) sum += std::abs(p[c] - q[c]);
  return 0.5 * sum;
}

double symmetric_kl(std::span<const double> p, std::span<const double> q, double epsilon) {
  if (p.size() != q.size()) throw std::invalid_argument("symmetric_kl: length mismatch");
  if (!(epsilon > 0.0)) throw std::invalid_argument("symmetric_kl: epsilon must be positive");
  const double norm = 1.0 + static_cast<double>(p.size()) * epsilon;
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double a = (p[c] + epsilon) / norm;
    const double b = (q[c] + epsilon) / norm;
    sum += (a - b) * std::log(a / b);
  }
  return sum;
}

namespace {

AlignmentSummary summarize(const std::vector<const AlignmentRecord*>& members) {
  AlignmentSummary s;
  s.n = members.size();
  if (s.n == 0) return s;
  for (const AlignmentRecord* r : members) {
    s.mean_tv += r->tv;
    s.mean_sym_kl += r->sym_kl;
  }
  const auto n = static_cast<double>(s.n);
  s.mean_tv /= n;
  s.mean_sym_kl /= n;
  if (s.n > 1) {
    double ss = 0.0;
    for (const AlignmentRecord* r : members) ss += (r->tv - s.mean_tv) * (r->tv - s.mean_tv);
    s.sd_tv = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

}  // namespace

AlignmentResult alignment(const PanelDataset& dataset, double epsilon) {
  const VoteMatrix votes = resolved_votes(dataset);
  const std::vector<Tercile> terciles = entropy_terciles(dataset);
  const std::size_t labels = dataset.label_count();
  const auto k = static_cast<double>(dataset.judge_count());

  AlignmentResult out;
  out.records.resize(dataset.item_count());
  parallel_for(dataset.item_count(), [&](std::size_t i) {
    const ItemRecord& item = dataset.items()[i];
    std::vector<double> panel(labels, 0.0);
    for (const LabelId v : votes.row(i)) panel[v] += 1.0 / k;
    std::vector<double> human(labels, 0.0);
    double total = 0.0;
    for (const std::int64_t c : item.human_counts) total += static_cast<double>(c);
    for (std::size_t c = 0; c < labels; ++c) human[c] = static_cast<double>(item.human_counts[c]) / total;
    out.records[i] = {item.item_id, total_variation(panel, human), symmetric_kl(panel, human, epsilon),
                      entropy_bits(item.human_counts), terciles[i]};
  });

  std::vector<const AlignmentRecord*> all;
  std::array<std::vector<const AlignmentRecord*>, 3> groups;
  for (const AlignmentRecord& r : out.records) {
    all.push_back(&r);
    groups[static_cast<std::size_t>(r.tercile)].push_back(&r);
  }
  out.overall = summarize(all);
  for (std::size_t t = 0; t < 3; ++t) out.by_tercile[t] = summarize(groups[t]);
  return out;
}

double alignment_entropy_correlation(std::span<const AlignmentRecord> records) {
  std::vector<double> tv;
  std::vector<double> entropy;
  for (const AlignmentRecord& r : records) {
    tv.push_back(r.tv);
    entropy.push_back(r.human_entropy);
  }
  return spearman_rho(tv, entropy);
}

AllWrongBreakdown all_wrong_analysis(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                     const ErrorMatrix& errors) {
  if (gold.size() != dataset.item_count() || errors.item_count() != dataset.item_count() ||
      errors.judge_count() != dataset.judge_count()) {
    throw std::invalid_argument("all_wrong_analysis: inputs do not describe the same panel");
  }
  const VoteMatrix votes = resolved_votes(dataset);
  const std::vector<Tercile> terciles = entropy_terciles(dataset);

  AllWrongBreakdown out;
  std::map<std::pair<LabelId, LabelId>, std::size_t> directions;
  double support_sum = 0.0;
  for (std::size_t i = 0; i < dataset.item_count(); ++i) {
    if (errors.row_sum(i) != dataset.judge_count()) continue;
    const ItemRecord& item = dataset.items()[i];
    AllWrongItem row;
    row.item_id = item.item_id;
    row.tercile = terciles[i];
    row.biased = gold[i].support >= 0.5;
    row.gold = gold[i].label;
    row.panel = majority_vote(votes.row(i), i, dataset.vocabulary()).label;
    double total = 0.0;
    for (const std::int64_t c : item.human_counts) total += static_cast<double>(c);
    row.human_support_for_panel = static_cast<double>(item.human_counts[row.panel]) / total;

    ++out.total;
    ++out.by_tercile[static_cast<std::size_t>(row.tercile)];
    ++(row.biased ? out.biased : out.ambiguous);
    ++directions[{row.gold, row.panel}];
    support_sum += row.human_support_for_panel;
    out.items.push_back(std::move(row));
  }
  for (const auto& [key, count] : directions) out.directions.push_back({key.first, key.second, count});
  if (out.total > 0) out.mean_human_support_for_panel = support_sum / static_cast<double>(out.total);
  return out;
}

NeffResult human_neff(const PanelDataset& dataset, std::size_t annotators, std::uint64_t seed) {
  if (annotators < 2) throw std::invalid_argument("human_neff: at least 2 annotators required");
  const std::vector<GoldLabel> gold = derive_gold(dataset);
  const std::size_t n = dataset.item_count();
  std::vector<std::uint8_t> values(n * annotators);
  parallel_for(n, [&](std::size_t i) {
    const ItemRecord& item = dataset.items()[i];
    std::vector<double> cdf;
    double total = 0.0;
    for (const std::int64_t c : item.human_counts) total += static_cast<double>(c);
    double acc = 0.0;
    for (const std::int64_t c : item.human_counts) cdf.push_back(acc += static_cast<double>(c) / total);
    Rng rng = make_rng(seed, "human", i);
    for (std::size_t t = 0; t < annotators; ++t) {
      const double u = uniform01(rng);
      std::size_t label = 0;
      // Skip zero-count labels so floating-point slack never picks an empty class.
      while (label + 1 < cdf.size() && (u >= cdf[label] || item.human_counts[label] == 0)) ++label;
      while (item.human_counts[label] == 0) --label;
      values[t * n + i] = label == gold[i].label ? 0 : 1;
    }
  });

  std::vector<JudgeMeta> pseudo;
  for (std::size_t t = 0; t < annotators; ++t) pseudo.push_back({"annotator-" + std::to_string(t + 1), "human"});
  return summarize_neff(ErrorMatrix(n, annotators, std::move(values)), pseudo);
}

}  // namespace paneldiag
