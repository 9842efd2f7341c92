#include "paneldiag/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "paneldiag/errors.hpp"
#include "paneldiag/independence.hpp"
#include "paneldiag/rng.hpp"

namespace paneldiag {

std::string tie_message(std::size_t item_index, std::span<const LabelId> votes,
                        const LabelVocabulary& vocabulary) {
  std::string message = std::to_string(item_index);
  message.push_back('|');
  for (const LabelId v : votes) message += vocabulary.name(v);
  return message;
}

namespace {

/// Argmax over label scores; exact ties go through the hash tie-break.
template <class Score>
LabelId pick_top(std::span<const Score> scores, std::size_t item_index, std::span<const LabelId> votes,
                 const LabelVocabulary& vocabulary, bool* tied = nullptr) {
  const Score top = *std::max_element(scores.begin(), scores.end());
  std::vector<LabelId> candidates;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c] == top) candidates.push_back(static_cast<LabelId>(c));
  }
  if (tied != nullptr) *tied = candidates.size() > 1;
  if (candidates.size() == 1) return candidates.front();
  return candidates[hash_pick(tie_message(item_index, votes, vocabulary), candidates.size())];
}

}  // namespace

MajorityDecision majority_vote(std::span<const LabelId> votes, std::size_t item_index,
                               const LabelVocabulary& vocabulary) {
  if (votes.empty()) throw std::invalid_argument("majority_vote: no votes");
  std::vector<std::size_t> counts(vocabulary.size(), 0);
  for (const LabelId v : votes) ++counts.at(v);
  MajorityDecision d;
  d.label = pick_top<std::size_t>(counts, item_index, votes, vocabulary, &d.tied);
  return d;
}

LabelId weighted_vote(std::span<const LabelId> votes, std::span<const double> weights,
                      std::size_t item_index, const LabelVocabulary& vocabulary) {
  if (votes.size() != weights.size()) throw std::invalid_argument("weighted_vote: one weight per vote");
  std::vector<double> scores(vocabulary.size(), 0.0);
  for (std::size_t j = 0; j < votes.size(); ++j) scores.at(votes[j]) += weights[j];
  return pick_top<double>(scores, item_index, votes, vocabulary);
}

std::vector<MajorityDecision> majority_decisions(const VoteMatrix& votes, const LabelVocabulary& vocabulary) {
  std::vector<MajorityDecision> out;
  out.reserve(votes.item_count());
  for (std::size_t i = 0; i < votes.item_count(); ++i) out.push_back(majority_vote(votes.row(i), i, vocabulary));
  return out;
}

std::vector<MajorityDecision> majority_decisions(const VoteMatrix& votes, const LabelVocabulary& vocabulary,
                                                 std::span<const std::size_t> judges) {
  std::vector<MajorityDecision> out;
  out.reserve(votes.item_count());
  std::vector<LabelId> subset(judges.size());
  for (std::size_t i = 0; i < votes.item_count(); ++i) {
    for (std::size_t t = 0; t < judges.size(); ++t) subset[t] = votes.at(i, judges[t]);
    out.push_back(majority_vote(subset, i, vocabulary));
  }
  return out;
}

double accuracy(std::span<const LabelId> predicted, std::span<const GoldLabel> gold) {
  if (predicted.size() != gold.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (predicted.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == gold[i].label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double accuracy(std::span<const MajorityDecision> decisions, std::span<const GoldLabel> gold) {
  std::vector<LabelId> labels;
  labels.reserve(decisions.size());
  for (const MajorityDecision& d : decisions) labels.push_back(d.label);
  return accuracy(labels, gold);
}

// ---------------------------------------------------------------------------
// Dawid-Skene

DawidSkeneResult dawid_skene(const PanelDataset& dataset, std::size_t max_iters, double tol) {
  constexpr double kSmoothing = 0.01;
  const VoteMatrix votes = resolved_votes(dataset);
  const std::size_t n = votes.item_count();
  const std::size_t k = votes.judge_count();
  const std::size_t labels = votes.label_count();
  if (k < 2) throw std::invalid_argument("dawid_skene needs at least 2 judges");

  DawidSkeneResult r;
  auto& post = r.posteriors;
  post.assign(n, std::vector<double>(labels, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (const LabelId v : votes.row(i)) post[i][v] += 1.0 / static_cast<double>(k);
  }

  r.class_priors.assign(labels, 0.0);
  r.confusion.assign(k, std::vector<std::vector<double>>(labels, std::vector<double>(labels, 0.0)));
  std::vector<std::vector<double>> next(n, std::vector<double>(labels));
  std::vector<double> log_score(labels);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    // M-step
    double log_prior_density = 0.0;
    for (std::size_t c = 0; c < labels; ++c) {
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) mass += post[i][c];
      r.class_priors[c] = (mass + kSmoothing) / (static_cast<double>(n) + kSmoothing * static_cast<double>(labels));
      log_prior_density += kSmoothing * std::log(r.class_priors[c]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      auto& conf = r.confusion[j];
      for (auto& row : conf) std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const LabelId v = votes.at(i, j);
        for (std::size_t c = 0; c < labels; ++c) conf[c][v] += post[i][c];
      }
      for (std::size_t c = 0; c < labels; ++c) {
        const double row_mass = std::accumulate(conf[c].begin(), conf[c].end(), 0.0);
        for (double& cell : conf[c]) {
          cell = (cell + kSmoothing) / (row_mass + kSmoothing * static_cast<double>(labels));
          log_prior_density += kSmoothing * std::log(cell);
        }
      }
    }

    // E-step
    double log_likelihood = 0.0;
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < labels; ++c) {
        double s = std::log(r.class_priors[c]);
        for (std::size_t j = 0; j < k; ++j) s += std::log(r.confusion[j][c][votes.at(i, j)]);
        log_score[c] = s;
      }
      const double top = *std::max_element(log_score.begin(), log_score.end());
      double sum = 0.0;
      for (const double s : log_score) sum += std::exp(s - top);
      const double log_norm = top + std::log(sum);
      log_likelihood += log_norm;
      for (std::size_t c = 0; c < labels; ++c) {
        next[i][c] = std::exp(log_score[c] - log_norm);
        max_change = std::max(max_change, std::abs(next[i][c] - post[i][c]));
      }
    }
    post.swap(next);
    r.log_likelihood_trace.push_back(log_likelihood);
    r.objective_trace.push_back(log_likelihood + log_prior_density);
    r.iterations = iter + 1;
    if (max_change < tol) {
      r.converged = true;
      break;
    }
  }

  r.predicted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.predicted[i] = pick_top<double>(post[i], i, votes.row(i), dataset.vocabulary());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Weighted voting

std::string to_string(WeightRule rule) {
  return rule == WeightRule::accuracy ? "accuracy" : "phi_optimal";
}

std::vector<std::size_t> stratified_folds(std::span<const double> entropies, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (entropies.size() < folds) throw std::invalid_argument("fewer items than folds");
  const DifficultyBins terciles = DifficultyBins::fit(entropies, 3);
  std::vector<std::vector<std::size_t>> groups(3);
  for (std::size_t i = 0; i < entropies.size(); ++i) groups[terciles.assign(entropies[i])].push_back(i);

  std::vector<std::size_t> fold_of(entropies.size(), 0);
  std::size_t next_fold = 0;
  for (std::size_t t = 0; t < groups.size(); ++t) {
    Rng rng = make_rng(seed, "folds", t);
    shuffle(std::span<std::size_t>(groups[t]), rng);
    for (const std::size_t i : groups[t]) {
      fold_of[i] = next_fold;
      next_fold = (next_fold + 1) % folds;
    }
  }
  return fold_of;
}

std::vector<double> learn_weights(const VoteMatrix& votes, std::span<const GoldLabel> gold,
                                  std::span<const std::size_t> training_items, WeightRule rule) {
  const std::size_t k = votes.judge_count();
  if (training_items.empty()) throw std::invalid_argument("learn_weights: no training items");

  if (rule == WeightRule::accuracy) {
    std::vector<double> weights(k, 0.0);
    for (const std::size_t i : training_items) {
      for (std::size_t j = 0; j < k; ++j) weights[j] += votes.at(i, j) == gold[i].label ? 1.0 : 0.0;
    }
    for (double& w : weights) w /= static_cast<double>(training_items.size());
    return weights;
  }

  constexpr double kRidge = 1e-6;
  const ErrorMatrix errors = error_matrix(votes, gold).select_items(training_items);
  const PhiMatrix phi = phi_matrix(errors);
  const Eigen::MatrixXd sigma =
      phi.phi + kRidge * Eigen::MatrixXd::Identity(phi.phi.rows(), phi.phi.cols());
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
  if (!lu.isInvertible()) throw NumericalError("phi-optimal weights: error correlation matrix is singular");
  const Eigen::VectorXd raw = lu.solve(Eigen::VectorXd::Ones(sigma.rows()));
  const double total = raw.sum();
  if (!std::isfinite(total) || std::abs(total) < 1e-12) {
    throw NumericalError("phi-optimal weights: cannot normalize (1' Sigma^-1 1 = 0)");
  }
  std::vector<double> weights(k);
  for (std::size_t j = 0; j < k; ++j) weights[j] = raw(static_cast<Eigen::Index>(j)) / total;
  return weights;
}

WeightedVoteResult weighted_vote_cv(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                    WeightRule rule, std::size_t folds, std::uint64_t seed) {
  const VoteMatrix votes = resolved_votes(dataset);
  const std::size_t n = votes.item_count();
  if (gold.size() != n) throw std::invalid_argument("weighted_vote_cv: gold does not match items");

  WeightedVoteResult r;
  r.fold_of_item = stratified_folds(human_entropies(dataset), folds, seed);
  r.predicted.assign(n, 0);
  r.fold_weights.resize(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> training;
    for (std::size_t i = 0; i < n; ++i) {
      if (r.fold_of_item[i] != f) training.push_back(i);
    }
    r.fold_weights[f] = learn_weights(votes, gold, training, rule);
    for (std::size_t i = 0; i < n; ++i) {
      if (r.fold_of_item[i] == f) {
        r.predicted[i] = weighted_vote(votes.row(i), r.fold_weights[f], i, dataset.vocabulary());
      }
    }
  }
  r.accuracy = accuracy(r.predicted, gold);
  return r;
}

BestIndividual best_individual(const PanelDataset& dataset, std::span<const GoldLabel> gold) {
  const ErrorMatrix errors = error_matrix(dataset, gold);
  BestIndividual best;
  best.accuracy = -1.0;
  for (std::size_t j = 0; j < errors.judge_count(); ++j) {
    const double acc = 1.0 - errors.error_rate(j);
    if (acc > best.accuracy) best = {dataset.judges()[j].judge_id, acc};
  }
  return best;
}

AggregationReport aggregation_report(const PanelDataset& dataset, std::span<const GoldLabel> gold,
                                     double condorcet_predicted, std::size_t folds, std::uint64_t seed) {
  const VoteMatrix votes = resolved_votes(dataset);
  const std::vector<MajorityDecision> decisions = majority_decisions(votes, dataset.vocabulary());

  AggregationReport report;
  report.majority_accuracy = accuracy(decisions, gold);
  report.condorcet_predicted = condorcet_predicted;
  report.majority_ties = static_cast<std::size_t>(
      std::count_if(decisions.begin(), decisions.end(), [](const MajorityDecision& d) { return d.tied; }));

  const auto closed = [&](double acc) -> std::optional<double> {
    const double room = condorcet_predicted - report.majority_accuracy;
    if (!(room > 0.0)) return std::nullopt;
    return (acc - report.majority_accuracy) / room;
  };
  const auto add = [&](std::string method, bool oracle, bool cv, double acc) {
    report.outcomes.push_back({std::move(method), oracle, cv, acc, closed(acc)});
  };

  add("majority_vote", false, false, report.majority_accuracy);

  const DawidSkeneResult ds = dawid_skene(dataset);
  report.dawid_skene_iterations = ds.iterations;
  report.dawid_skene_converged = ds.converged;
  add("dawid_skene", false, false, accuracy(ds.predicted, gold));

  add("accuracy_weighted_cv", true, true,
      weighted_vote_cv(dataset, gold, WeightRule::accuracy, folds, seed).accuracy);
  add("phi_optimal_cv", true, true,
      weighted_vote_cv(dataset, gold, WeightRule::phi_optimal, folds, seed).accuracy);

  const BestIndividual best = best_individual(dataset, gold);
  report.best_judge = best.judge_id;
  add("best_individual", true, false, best.accuracy);
  return report;
}

}  // namespace paneldiag
