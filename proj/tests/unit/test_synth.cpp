#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "paneldiag/aggregation.hpp"
#include "paneldiag/condorcet.hpp"
#include "paneldiag/independence.hpp"
#include "paneldiag/synth.hpp"

using namespace paneldiag;
using Catch::Matchers::WithinAbs;

namespace {

NeffResult neff_of(const SynthData& data) { return summarize_neff(error_matrix(data.dataset, data.gold)); }

double majority_accuracy(const SynthData& data) {
  return accuracy(majority_decisions(resolved_votes(data.dataset), data.dataset.vocabulary()), data.gold);
}

std::vector<LabelId> flat_votes(const SynthData& data) {
  const VoteMatrix votes = resolved_votes(data.dataset);
  std::vector<LabelId> out;
  for (std::size_t i = 0; i < votes.item_count(); ++i) {
    const auto row = votes.row(i);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace

TEST_CASE("generator shape and determinism") {
  const SynthData a = generate(uniform_spec(9, 120, 0.7, 0.3, 5));
  CHECK(a.dataset.item_count() == 120);
  CHECK(a.dataset.judge_count() == 9);
  CHECK(a.dataset.items().front().item_id == "item-001");
  CHECK(a.dataset.judges().front().judge_id == "judge-1");
  CHECK(a.dataset.missing_count() == 0);
  for (const GoldLabel& g : a.gold) CHECK(g.support == 1.0);

  const SynthData b = generate(uniform_spec(9, 120, 0.7, 0.3, 5));
  CHECK(flat_votes(a) == flat_votes(b));
  const SynthData c = generate(uniform_spec(9, 120, 0.7, 0.3, 6));
  CHECK(flat_votes(a) != flat_votes(c));
}

TEST_CASE("generator rejects invalid specs") {
  SynthSpec spec = uniform_spec(3, 10, 0.7, 0.0, 1);
  spec.copy_prob = 1.5;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = uniform_spec(3, 10, 0.0, 0.0, 1);
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = uniform_spec(3, 10, 0.7, 0.0, 1);
  spec.per_judge_accuracy.pop_back();
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = uniform_spec(3, 10, 0.7, 0.0, 1);
  spec.difficulty_profile = std::vector<double>(9, 1.0);
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  CHECK_THROWS_AS(generate_heterogeneous(uniform_spec(3, 10, 0.7, 0.2, 1)), std::invalid_argument);
}

TEST_CASE("independent panel recovers zero correlation") {
  const SynthData data = generate(uniform_spec(9, 20000, 0.7, 0.0, 11));
  const NeffResult r = neff_of(data);
  CHECK_THAT(r.mean_phi, WithinAbs(0.0, 0.015));
  CHECK_THAT(r.kish_neff, WithinAbs(9.0, 0.4));
  for (const double e : error_matrix(data.dataset, data.gold).error_rates()) CHECK_THAT(e, WithinAbs(0.3, 0.015));
}

TEST_CASE("copy probability sets phi to its square") {
  const SynthData data = generate(uniform_spec(9, 20000, 0.68, 0.625, 12));
  const NeffResult r = neff_of(data);
  CHECK_THAT(r.mean_phi, WithinAbs(0.390625, 0.015));
  CHECK_THAT(r.kish_neff, WithinAbs(2.18, 0.1));

  const NeffResult full = neff_of(generate(uniform_spec(9, 2000, 0.7, 1.0, 12)));
  CHECK_THAT(full.mean_phi, WithinAbs(1.0, 1e-12));
  CHECK_THAT(full.kish_neff, WithinAbs(1.0, 1e-9));
}

TEST_CASE("independent panel matches its Condorcet prediction") {
  const SynthData data = generate(uniform_spec(9, 3000, 0.7, 0.0, 13));
  const ConfusionSet cs = fit_confusion(data.dataset, data.gold, 3);
  const CondorcetPrediction p = simulate_condorcet(cs, data.dataset, data.gold, 2000, 13);
  // Sampling noise of the observed majority accuracy dominates the simulation error.
  const double se = std::sqrt(p.actual_accuracy * (1.0 - p.actual_accuracy) / 3000.0);
  CHECK(std::abs(p.weighted_gap) < 3.0 * se);
}

TEST_CASE("difficulty profile moves human and judge disagreement together") {
  SynthSpec spec = uniform_spec(9, 4000, 0.8, 0.0, 15);
  std::vector<double> profile(4000);
  for (std::size_t i = 0; i < 4000; ++i) profile[i] = i % 2 == 0 ? 0.25 : 2.5;
  spec.difficulty_profile = profile;
  const SynthData data = generate(spec);
  const ErrorMatrix errors = error_matrix(data.dataset, data.gold);
  std::array<double, 2> err{};
  std::array<double, 2> support{};
  for (std::size_t i = 0; i < 4000; ++i) {
    err[i % 2] += static_cast<double>(errors.row_sum(i)) / 9.0 / 2000.0;
    support[i % 2] += data.gold[i].support / 2000.0;
    CHECK(data.gold[i].support > 0.5);
  }
  CHECK_THAT(err[0], WithinAbs(0.05, 0.01));
  CHECK_THAT(err[1], WithinAbs(0.5, 0.02));
  CHECK(support[0] > support[1]);
  CHECK_THAT(support[1], WithinAbs(0.55, 1e-9));
}

TEST_CASE("heterogeneous panel favours likelihood weighting") {
  const SynthData data = generate_heterogeneous(heterogeneous_spec(5, 5000, 0.9, 0.55, 16));
  const double mv = majority_accuracy(data);
  const DawidSkeneResult ds = dawid_skene(data.dataset);
  CHECK(accuracy(ds.predicted, data.gold) >= mv + 0.02);
  for (std::size_t t = 1; t < ds.log_likelihood_trace.size(); ++t) {
    CHECK(ds.log_likelihood_trace[t] >= ds.log_likelihood_trace[t - 1] - 1e-6);
  }
}

TEST_CASE("equal accuracies leave Dawid-Skene at the majority") {
  const SynthData data = generate(uniform_spec(5, 5000, 0.7, 0.0, 17));
  const double mv = majority_accuracy(data);
  CHECK_THAT(accuracy(dawid_skene(data.dataset).predicted, data.gold), WithinAbs(mv, 0.005));
}

TEST_CASE("a perfect judge dominates the likelihood") {
  const SynthData data = generate_heterogeneous(heterogeneous_spec(5, 3000, 1.0, 0.55, 18));
  CHECK(accuracy(dawid_skene(data.dataset).predicted, data.gold) > 0.99);
}
