#include "paneldiag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "paneldiag/parallel.hpp"
#include "paneldiag/rng.hpp"

namespace paneldiag {
namespace {

constexpr std::int64_t kAnnotators = 100;
constexpr double kMaxHumanNoise = 0.45;

void validate(const SynthSpec& spec) {
  if (spec.judges < 2) throw std::invalid_argument("synth: at least 2 judges required");
  if (spec.items < 1) throw std::invalid_argument("synth: at least 1 item required");
  if (spec.labels.size() < 2) throw std::invalid_argument("synth: at least 2 labels required");
  if (std::set<std::string>(spec.labels.begin(), spec.labels.end()).size() != spec.labels.size()) {
    throw std::invalid_argument("synth: duplicate labels");
  }
  if (spec.per_judge_accuracy.size() != spec.judges) {
    throw std::invalid_argument("synth: one accuracy per judge required");
  }
  for (const double a : spec.per_judge_accuracy) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("synth: accuracies must lie in (0, 1]");
  }
  if (!(spec.copy_prob >= 0.0 && spec.copy_prob <= 1.0)) {
    throw std::invalid_argument("synth: copy probability must lie in [0, 1]");
  }
  if (spec.difficulty_profile) {
    if (spec.difficulty_profile->size() != spec.items) {
      throw std::invalid_argument("synth: one difficulty multiplier per item required");
    }
    for (const double m : *spec.difficulty_profile) {
      if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("synth: multipliers must be finite and >= 0");
    }
  }
}

std::string padded_id(const char* prefix, std::size_t index, std::size_t count) {
  const int width = static_cast<int>(std::to_string(count).size());
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%s%0*zu", prefix, width, index + 1);
  return buffer;
}

/// Uniform label from the vocabulary other than `gold`.
LabelId wrong_label(Rng& rng, LabelId gold, std::size_t labels) {
  const auto pick = static_cast<LabelId>(uniform_index(rng, labels - 1));
  return pick >= gold ? pick + 1 : pick;
}

}  // namespace

SynthSpec uniform_spec(std::size_t judges, std::size_t items, double accuracy, double copy_prob, std::uint64_t seed) {
  SynthSpec spec;
  spec.judges = judges;
  spec.items = items;
  spec.per_judge_accuracy.assign(judges, accuracy);
  spec.copy_prob = copy_prob;
  spec.seed = seed;
  return spec;
}

SynthData generate(const SynthSpec& spec) {
  validate(spec);
  std::vector<std::string> sorted = spec.labels;
  std::sort(sorted.begin(), sorted.end());
  LabelVocabulary vocabulary(sorted);
  const std::size_t labels = sorted.size();
  const std::size_t k = spec.judges;

  std::vector<double> error_rate;
  for (const double a : spec.per_judge_accuracy) error_rate.push_back(1.0 - a);
  const double mean_error = std::accumulate(error_rate.begin(), error_rate.end(), 0.0) / static_cast<double>(k);

  std::vector<JudgeMeta> judges;
  for (std::size_t j = 0; j < k; ++j) judges.push_back({padded_id("judge-", j, k), "synthetic"});

  std::vector<ItemRecord> items(spec.items);
  parallel_for(spec.items, [&](std::size_t i) {
    Rng rng = make_rng(spec.seed, "synth", i);
    const double multiplier = spec.difficulty_profile ? (*spec.difficulty_profile)[i] : 1.0;
    const auto truth = static_cast<LabelId>(uniform_index(rng, labels));
    const double shared_u = uniform01(rng);
    const LabelId shared_wrong = wrong_label(rng, truth, labels);

    ItemRecord& item = items[i];
    item.item_id = padded_id("item-", i, spec.items);
    item.votes.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double e = std::min(1.0, error_rate[j] * multiplier);
      const bool copies = uniform01(rng) < spec.copy_prob;
      const double u = copies ? shared_u : uniform01(rng);
      const LabelId wrong = copies ? shared_wrong : wrong_label(rng, truth, labels);
      item.votes[j] = u < e ? wrong : truth;
    }

    item.human_counts.assign(labels, 0);
    if (spec.difficulty_profile) {
      const double noise = std::min(kMaxHumanNoise, mean_error * multiplier);
      const auto spread = static_cast<std::int64_t>(std::llround(noise * static_cast<double>(kAnnotators)));
      const auto others = static_cast<std::int64_t>(labels - 1);
      item.human_counts[truth] = kAnnotators - spread;
      std::int64_t slot = 0;
      for (std::size_t c = 0; c < labels; ++c) {
        if (c == truth) continue;
        item.human_counts[c] = spread / others + (slot < spread % others ? 1 : 0);
        ++slot;
      }
    } else {
      item.human_counts[truth] = kAnnotators;
    }
  });

  PanelDataset dataset(std::move(vocabulary), std::move(judges), std::move(items));
  std::vector<GoldLabel> gold = derive_gold(dataset);
  return {std::move(dataset), std::move(gold)};
}

SynthSpec heterogeneous_spec(std::size_t judges, std::size_t items, double strong, double weak, std::uint64_t seed) {
  if (judges < 2) throw std::invalid_argument("synth: at least 2 judges required");
  SynthSpec spec = uniform_spec(judges, items, weak, 0.0, seed);
  spec.per_judge_accuracy.front() = strong;
  return spec;
}

SynthData generate_heterogeneous(const SynthSpec& spec) {
  if (spec.copy_prob != 0.0) throw std::invalid_argument("generate_heterogeneous: judges must be independent");
  return generate(spec);
}

}  // namespace paneldiag
