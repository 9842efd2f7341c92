#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "paneldiag/aggregation.hpp"
#include "paneldiag/parallel.hpp"
#include "paneldiag/synth.hpp"
#include "support.hpp"

using namespace paneldiag;
using Catch::Matchers::WithinAbs;

namespace {

const LabelVocabulary kNli({"contradiction", "entailment", "neutral"});

}  // namespace

TEST_CASE("majority vote") {
  constexpr LabelId c = 0, e = 1, n = 2;
  const std::vector<LabelId> votes{e, e, e, n, n, c, c, c, e};
  const MajorityDecision d = majority_vote(votes, 17, kNli);
  CHECK(d.label == e);
  CHECK_FALSE(d.tied);
  CHECK(tie_message(17, std::vector<LabelId>{e, e, n, c, c}, kNli) ==
        "17|entailmententailmentneutralcontradictioncontradiction");

  const std::vector<LabelId> tied{e, e, c, c, n};
  const MajorityDecision t = majority_vote(tied, 17, kNli);
  CHECK(t.tied);
  CHECK((t.label == c || t.label == e));
  // Stable across calls and equal to the documented tie-break.
  CHECK(majority_vote(tied, 17, kNli).label == t.label);
  const std::vector<std::string> candidates{"contradiction", "entailment"};
  CHECK(kNli.name(t.label) == hash_tiebreak(tie_message(17, tied, kNli), candidates));
}

TEST_CASE("weighted vote") {
  const std::vector<LabelId> votes{0, 0, 1};
  CHECK(weighted_vote(votes, std::vector<double>{1, 1, 1}, 0, kNli) == 0);
  CHECK(weighted_vote(votes, std::vector<double>{1, 1, 3}, 0, kNli) == 1);
  CHECK(weighted_vote(votes, std::vector<double>{-1, -1, 0.5}, 0, kNli) == 1);
}

TEST_CASE("dawid-skene") {
  const SynthData data = generate(uniform_spec(7, 800, 0.7, 0.0, 6));
  const DawidSkeneResult ds = dawid_skene(data.dataset);
  REQUIRE(ds.posteriors.size() == 800);
  for (const auto& row : ds.posteriors) {
    CHECK_THAT(std::accumulate(row.begin(), row.end(), 0.0), WithinAbs(1.0, 1e-9));
  }
  CHECK_THAT(std::accumulate(ds.class_priors.begin(), ds.class_priors.end(), 0.0), WithinAbs(1.0, 1e-9));
  for (const auto& judge : ds.confusion) {
    for (const auto& row : judge) CHECK_THAT(std::accumulate(row.begin(), row.end(), 0.0), WithinAbs(1.0, 1e-9));
  }
  CHECK(ds.converged);
  REQUIRE(ds.objective_trace.size() == ds.log_likelihood_trace.size());
  for (std::size_t t = 1; t < ds.objective_trace.size(); ++t) {
    CHECK(ds.objective_trace[t] >= ds.objective_trace[t - 1] - 1e-9);
    CHECK(ds.log_likelihood_trace[t] >= ds.log_likelihood_trace[t - 1] - 1e-6);
  }
  const std::vector<MajorityDecision> majority = majority_decisions(resolved_votes(data.dataset), kNli);
  CHECK(accuracy(ds.predicted, data.gold) >= accuracy(majority, data.gold) - 0.01);
}

TEST_CASE("dawid-skene with perfect judges") {
  std::vector<testing::Row> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({{i % 3 == 0 ? 5 : 0, i % 3 == 1 ? 5 : 0, i % 3 == 2 ? 5 : 0}, {i % 3, i % 3, i % 3}});
  const auto ds = testing::make_dataset({"a", "b", "c"}, 3, rows);
  const auto result = dawid_skene(ds);
  CHECK(accuracy(result.predicted, derive_gold(ds)) == 1.0);
}

TEST_CASE("folds are stratified and complete") {
  std::vector<double> entropies(100);
  for (std::size_t i = 0; i < 100; ++i) entropies[i] = static_cast<double>(i % 10);
  const auto folds = stratified_folds(entropies, 5, 3);
  std::vector<std::size_t> sizes(5, 0);
  for (const std::size_t f : folds) ++sizes.at(f);
  for (const std::size_t s : sizes) CHECK((s >= 19 && s <= 21));
  CHECK(stratified_folds(entropies, 5, 3) == folds);
}

TEST_CASE("equal-accuracy weighting reproduces the majority") {
  const SynthData data = generate(uniform_spec(9, 600, 0.7, 0.0, 14));
  const VoteMatrix votes = resolved_votes(data.dataset);
  const auto majority = majority_decisions(votes, kNli);
  const std::vector<double> equal(9, 0.7);
  for (std::size_t i = 0; i < 600; ++i) {
    CHECK(weighted_vote(votes.row(i), equal, i, kNli) == majority[i].label);
  }
}

TEST_CASE("best individual and weighted CV on a heterogeneous panel") {
  const SynthData data = generate_heterogeneous(heterogeneous_spec(5, 1500, 0.95, 0.6, 21));
  const BestIndividual best = best_individual(data.dataset, data.gold);
  CHECK(best.judge_id == data.dataset.judges().front().judge_id);
  CHECK_THAT(best.accuracy, WithinAbs(0.95, 0.02));

  const auto acc = weighted_vote_cv(data.dataset, data.gold, WeightRule::accuracy, 5, 2);
  const auto phi = weighted_vote_cv(data.dataset, data.gold, WeightRule::phi_optimal, 5, 2);
  CHECK(acc.predicted.size() == 1500);
  CHECK(acc.fold_weights.size() == 5);
  CHECK(phi.accuracy > 0.5);
  const auto majority = majority_decisions(resolved_votes(data.dataset), data.dataset.vocabulary());
  CHECK(accuracy(majority, data.gold) > 0.6);

  set_max_threads(1);
  const auto again = weighted_vote_cv(data.dataset, data.gold, WeightRule::accuracy, 5, 2);
  CHECK(again.predicted == acc.predicted);
  CHECK_THROWS_AS(weighted_vote_cv(data.dataset, data.gold, WeightRule::accuracy, 1, 2), std::invalid_argument);
}

TEST_CASE("aggregation report") {
  const SynthData data = generate(uniform_spec(9, 500, 0.7, 0.4, 9));
  const AggregationReport r = aggregation_report(data.dataset, data.gold, 0.97, 5, 3);
  REQUIRE(r.outcomes.size() == 5);
  std::vector<std::string> oracle;
  for (const AggregationOutcome& o : r.outcomes) {
    if (o.oracle_access) oracle.push_back(o.method);
    CHECK(o.accuracy >= 0.0);
    CHECK(o.accuracy <= 1.0);
    REQUIRE(o.gap_closed_fraction);
    CHECK_THAT(*o.gap_closed_fraction,
               WithinAbs((o.accuracy - r.majority_accuracy) / (0.97 - r.majority_accuracy), 1e-12));
  }
  CHECK(oracle.size() == 3);
  CHECK(r.outcomes.front().method == "majority_vote");
  CHECK(*r.outcomes.front().gap_closed_fraction == 0.0);

  const AggregationReport none = aggregation_report(data.dataset, data.gold, 0.1, 5, 3);
  for (const AggregationOutcome& o : none.outcomes) CHECK_FALSE(o.gap_closed_fraction);
}
