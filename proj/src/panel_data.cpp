#include "paneldiag/panel_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "paneldiag/digest.hpp"
#include "paneldiag/errors.hpp"
#include "paneldiag/rng.hpp"

namespace paneldiag {

using nlohmann::json;

// ---------------------------------------------------------------------------
// LabelVocabulary

LabelVocabulary::LabelVocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("label vocabulary is empty");
  std::sort(labels_.begin(), labels_.end());
  if (const auto dup = std::adjacent_find(labels_.begin(), labels_.end()); dup != labels_.end()) {
    throw ValidationError("duplicate label in vocabulary: \"" + *dup + "\"");
  }
}

std::optional<LabelId> LabelVocabulary::find(std::string_view label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<LabelId>(it - labels_.begin());
}

// ---------------------------------------------------------------------------
// PanelDataset

PanelDataset::PanelDataset(LabelVocabulary vocabulary, std::vector<JudgeMeta> judges,
                           std::vector<ItemRecord> items)
    : vocabulary_(std::move(vocabulary)), judges_(std::move(judges)), items_(std::move(items)) {
  const std::size_t k = judges_.size();
  if (k < 2) throw ValidationError("a panel needs at least 2 judges");
  if (items_.empty()) throw ValidationError("dataset has no items");

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return judges_[a].judge_id < judges_[b].judge_id;
  });
  for (std::size_t j = 1; j < k; ++j) {
    if (judges_[order[j]].judge_id == judges_[order[j - 1]].judge_id) {
      throw ValidationError("duplicate judge_id \"" + judges_[order[j]].judge_id + "\"");
    }
  }
  std::vector<JudgeMeta> sorted_judges;
  sorted_judges.reserve(k);
  for (const std::size_t j : order) sorted_judges.push_back(judges_[j]);
  judges_ = std::move(sorted_judges);

  std::unordered_set<std::string> seen_ids;
  const std::size_t labels = vocabulary_.size();
  for (ItemRecord& item : items_) {
    if (!seen_ids.insert(item.item_id).second) {
      throw ValidationError("duplicate item_id \"" + item.item_id + "\"");
    }
    if (item.human_counts.size() != labels) {
      throw ValidationError("item \"" + item.item_id + "\": human_counts has " +
                            std::to_string(item.human_counts.size()) + " entries, expected " +
                            std::to_string(labels));
    }
    std::int64_t total = 0;
    for (const std::int64_t c : item.human_counts) {
      if (c < 0) throw ValidationError("item \"" + item.item_id + "\": negative human count");
      total += c;
    }
    if (total <= 0) throw ValidationError("item \"" + item.item_id + "\": human counts sum to 0");
    if (item.votes.size() != k) {
      throw ValidationError("item \"" + item.item_id + "\": expected " + std::to_string(k) +
                            " votes, found " + std::to_string(item.votes.size()));
    }
    std::vector<std::optional<LabelId>> permuted(k);
    for (std::size_t j = 0; j < k; ++j) {
      const auto& vote = item.votes[order[j]];
      if (vote && *vote >= labels) {
        throw ValidationError("item \"" + item.item_id + "\", judge \"" + judges_[j].judge_id +
                              "\": label id out of range");
      }
      permuted[j] = vote;
    }
    item.votes = std::move(permuted);
  }
}

std::size_t PanelDataset::missing_count() const noexcept {
  std::size_t missing = 0;
  for (const ItemRecord& item : items_) {
    missing += static_cast<std::size_t>(
        std::count_if(item.votes.begin(), item.votes.end(), [](const auto& v) { return !v; }));
  }
  return missing;
}

PanelDataset PanelDataset::select_items(std::span<const std::size_t> indices) const {
  std::vector<ItemRecord> picked;
  picked.reserve(indices.size());
  for (const std::size_t i : indices) picked.push_back(items_.at(i));
  return PanelDataset(vocabulary_, judges_, std::move(picked));
}

VoteMatrix::VoteMatrix(std::size_t items, std::size_t judges, std::size_t labels,
                       std::vector<LabelId> values)
    : items_(items), judges_(judges), labels_(labels), values_(std::move(values)) {
  if (values_.size() != items_ * judges_) {
    throw std::invalid_argument("VoteMatrix: value count does not match shape");
  }
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace

LabelVocabulary load_vocabulary(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_array()) throw ParseError(path.string() + ": vocabulary must be a JSON array", 0);
  std::vector<std::string> labels;
  for (const json& entry : doc) {
    if (!entry.is_string()) throw ParseError(path.string() + ": labels must be strings", 0);
    labels.push_back(entry.get<std::string>());
  }
  return LabelVocabulary(std::move(labels));
}

std::vector<JudgeMeta> load_judges(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_array()) throw ParseError(path.string() + ": judge metadata must be a JSON array", 0);
  std::vector<JudgeMeta> judges;
  for (const json& entry : doc) {
    if (!entry.is_object() || !entry.contains("judge_id") || !entry["judge_id"].is_string() ||
        !entry.contains("family") || !entry["family"].is_string()) {
      throw ParseError(path.string() + ": each judge needs string judge_id and family", 0);
    }
    judges.push_back({entry["judge_id"].get<std::string>(), entry["family"].get<std::string>()});
  }
  return judges;
}

PanelDataset parse_dataset(std::istream& in, const LabelVocabulary& vocabulary,
                           std::vector<JudgeMeta> judges) {
  std::unordered_map<std::string, std::size_t> judge_index;
  for (std::size_t j = 0; j < judges.size(); ++j) judge_index.emplace(judges[j].judge_id, j);

  std::vector<ItemRecord> items;
  std::unordered_set<std::string> item_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw ParseError("record must be a JSON object", line_no);
    const auto field = [&](const char* name, bool (json::*check)() const noexcept,
                           const char* kind) -> const json& {
      const auto it = record.find(name);
      if (it == record.end() || !((*it).*check)()) {
        throw ParseError(std::string("field \"") + name + "\" must be " + kind, line_no);
      }
      return *it;
    };
    const json& id_field = field("item_id", &json::is_string, "a string");
    const json& counts_field = field("human_counts", &json::is_object, "an object");
    const json& votes_field = field("votes", &json::is_object, "an object");

    ItemRecord item;
    item.item_id = id_field.get<std::string>();
    if (!item_ids.insert(item.item_id).second) {
      throw ValidationError("duplicate item_id \"" + item.item_id + "\" (line " +
                            std::to_string(line_no) + ")");
    }

    item.human_counts.assign(vocabulary.size(), 0);
    for (const auto& [label, count] : counts_field.items()) {
      if (!count.is_number_integer()) {
        throw ParseError("human count for \"" + label + "\" must be an integer", line_no);
      }
      const auto id = vocabulary.find(label);
      if (!id) {
        throw ValidationError("item \"" + item.item_id + "\": human label \"" + label +
                              "\" is not in the vocabulary");
      }
      item.human_counts[*id] = count.get<std::int64_t>();
    }

    if (judges.empty()) {
      for (const auto& [judge_id, vote] : votes_field.items()) {
        judge_index.emplace(judge_id, judges.size());
        judges.push_back({judge_id, "unknown"});
      }
    }
    if (votes_field.size() != judges.size()) {
      throw ValidationError("item \"" + item.item_id + "\": expected votes from " +
                            std::to_string(judges.size()) + " judges, found " +
                            std::to_string(votes_field.size()));
    }
    item.votes.assign(judges.size(), std::nullopt);
    for (const auto& [judge_id, vote] : votes_field.items()) {
      const auto j = judge_index.find(judge_id);
      if (j == judge_index.end()) {
        throw ValidationError("item \"" + item.item_id + "\": unknown judge \"" + judge_id + "\"");
      }
      if (vote.is_null()) continue;
      if (!vote.is_string()) {
        throw ParseError("vote of judge \"" + judge_id + "\" must be a string or null", line_no);
      }
      const auto id = vocabulary.find(vote.get<std::string>());
      if (!id) {
        throw ValidationError("item \"" + item.item_id + "\", judge \"" + judge_id +
                              "\": label \"" + vote.get<std::string>() +
                              "\" is not in the vocabulary");
      }
      item.votes[j->second] = *id;
    }
    items.push_back(std::move(item));
  }
  return PanelDataset(vocabulary, std::move(judges), std::move(items));
}

PanelDataset load_dataset(const std::filesystem::path& path, const LabelVocabulary& vocabulary,
                          std::vector<JudgeMeta> judges) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_dataset(in, vocabulary, std::move(judges));
}

void write_dataset(std::ostream& out, const PanelDataset& dataset) {
  const auto& vocab = dataset.vocabulary();
  for (const ItemRecord& item : dataset.items()) {
    nlohmann::ordered_json record;
    record["item_id"] = item.item_id;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < vocab.size(); ++c) {
      counts[vocab.name(static_cast<LabelId>(c))] = item.human_counts[c];
    }
    record["human_counts"] = std::move(counts);
    nlohmann::ordered_json votes = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < dataset.judge_count(); ++j) {
      const auto& vote = item.votes[j];
      votes[dataset.judges()[j].judge_id] =
          vote ? nlohmann::ordered_json(vocab.name(*vote)) : nlohmann::ordered_json(nullptr);
    }
    record["votes"] = std::move(votes);
    out << record.dump() << '\n';
  }
}

void write_judges(std::ostream& out, std::span<const JudgeMeta> judges) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const JudgeMeta& judge : judges) {
    doc.push_back({{"judge_id", judge.judge_id}, {"family", judge.family}});
  }
  out << doc.dump(2) << '\n';
}

void write_vocabulary(std::ostream& out, const LabelVocabulary& vocabulary) {
  out << json(vocabulary.labels()).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Deterministic primitives

std::size_t hash_pick(std::string_view message, std::size_t count) {
  if (count == 0) throw std::invalid_argument("hash_pick: no candidates");
  return static_cast<std::size_t>(sha256_prefix_u64(message) % count);
}

std::string hash_tiebreak(std::string_view message, std::span<const std::string> candidates) {
  if (candidates.empty()) throw std::invalid_argument("hash_tiebreak: no candidates");
  if (!std::is_sorted(candidates.begin(), candidates.end())) {
    throw std::invalid_argument("hash_tiebreak: candidates must be sorted");
  }
  return candidates[hash_pick(message, candidates.size())];
}

GoldLabel derive_gold(const ItemRecord& item) {
  if (item.human_counts.empty()) throw ValidationError("item \"" + item.item_id + "\": no counts");
  const std::int64_t total =
      std::accumulate(item.human_counts.begin(), item.human_counts.end(), std::int64_t{0});
  if (total <= 0) throw ValidationError("item \"" + item.item_id + "\": human counts sum to 0");
  const std::int64_t top = *std::max_element(item.human_counts.begin(), item.human_counts.end());

  std::vector<LabelId> tied;
  for (std::size_t c = 0; c < item.human_counts.size(); ++c) {
    if (item.human_counts[c] == top) tied.push_back(static_cast<LabelId>(c));
  }
  GoldLabel gold;
  gold.item_id = item.item_id;
  gold.support = static_cast<double>(top) / static_cast<double>(total);
  gold.tied = tied.size() > 1;
  // Label ids ascend in lexicographic order, so `tied` is already sorted by name.
  gold.label = gold.tied ? tied[hash_pick(item.item_id, tied.size())] : tied.front();
  return gold;
}

std::vector<GoldLabel> derive_gold(const PanelDataset& dataset) {
  std::vector<GoldLabel> gold;
  gold.reserve(dataset.item_count());
  for (const ItemRecord& item : dataset.items()) {
    gold.push_back(derive_gold(item));
  }
  return gold;
}

PanelDataset fill_missing(const PanelDataset& dataset) {
  std::vector<ItemRecord> items = dataset.items();
  const std::size_t labels = dataset.label_count();
  for (ItemRecord& item : items) {
    for (std::size_t j = 0; j < item.votes.size(); ++j) {
      if (item.votes[j]) continue;
      const std::string message = dataset.judges()[j].judge_id + "|" + item.item_id;
      item.votes[j] = static_cast<LabelId>(hash_pick(message, labels));
    }
  }
  return PanelDataset(dataset.vocabulary(), dataset.judges(), std::move(items));
}

VoteMatrix resolved_votes(const PanelDataset& dataset) {
  const std::size_t k = dataset.judge_count();
  std::vector<LabelId> values;
  values.reserve(dataset.item_count() * k);
  for (const ItemRecord& item : dataset.items()) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!item.votes[j]) {
        throw ValidationError("item \"" + item.item_id + "\", judge \"" +
                              dataset.judges()[j].judge_id +
                              "\": vote is missing (run fill_missing first)");
      }
      values.push_back(*item.votes[j]);
    }
  }
  return VoteMatrix(dataset.item_count(), k, dataset.label_count(), std::move(values));
}

// ---------------------------------------------------------------------------
// Entropy and stratification

double entropy_bits(std::span<const std::int64_t> counts) {
  std::int64_t total = 0;
  for (const std::int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("entropy_bits: negative count");
    total += c;
  }
  if (total <= 0) throw std::invalid_argument("entropy_bits: counts sum to zero");
  double h = 0.0;
  for (const std::int64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double panel_entropy_nats(std::span<const LabelId> votes, std::size_t label_count) {
  if (votes.empty()) throw std::invalid_argument("panel_entropy_nats: no votes");
  std::vector<std::size_t> counts(label_count, 0);
  for (const LabelId v : votes) ++counts.at(v);
  double h = 0.0;
  const auto total = static_cast<double>(votes.size());
  for (const std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

std::vector<double> human_entropies(const PanelDataset& dataset) {
  std::vector<double> out;
  out.reserve(dataset.item_count());
  for (const ItemRecord& item : dataset.items()) out.push_back(entropy_bits(item.human_counts));
  return out;
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

DifficultyBins DifficultyBins::fit(std::span<const double> values, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("bins must be at least 1");
  if (values.empty()) throw std::invalid_argument("cannot fit difficulty bins on no items");
  std::vector<double> edges;
  edges.reserve(bins - 1);
  for (std::size_t b = 1; b < bins; ++b) {
    edges.push_back(percentile(values, 100.0 * static_cast<double>(b) / static_cast<double>(bins)));
  }
  return DifficultyBins(std::move(edges));
}

std::size_t DifficultyBins::assign(double value) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [value](double e) { return value > e; }));
}

std::vector<std::size_t> DifficultyBins::assign(std::span<const double> values) const {
  std::vector<std::size_t> out;
  out.reserve(values.size());
  for (const double v : values) out.push_back(assign(v));
  return out;
}

std::vector<std::size_t> stratified_indices(std::span<const double> entropies, std::size_t n,
                                            std::uint64_t seed, std::string_view stream) {
  if (n > entropies.size()) {
    throw std::invalid_argument("stratified sample of " + std::to_string(n) + " from " +
                                std::to_string(entropies.size()) + " items");
  }
  constexpr std::size_t kStrata = 3;
  const DifficultyBins bins = DifficultyBins::fit(entropies, kStrata);
  std::array<std::vector<std::size_t>, kStrata> members;
  for (std::size_t i = 0; i < entropies.size(); ++i) members[bins.assign(entropies[i])].push_back(i);

  std::array<std::size_t, kStrata> quota{};
  for (std::size_t t = 0; t < kStrata; ++t) quota[t] = n / kStrata + (t < n % kStrata ? 1 : 0);
  // Pass any shortfall of an undersized tercile on to terciles with spare items.
  std::size_t shortfall = 0;
  for (std::size_t t = 0; t < kStrata; ++t) {
    if (quota[t] > members[t].size()) {
      shortfall += quota[t] - members[t].size();
      quota[t] = members[t].size();
    }
  }
  for (std::size_t t = 0; t < kStrata && shortfall > 0; ++t) {
    const std::size_t spare = members[t].size() - quota[t];
    const std::size_t take = std::min(spare, shortfall);
    quota[t] += take;
    shortfall -= take;
  }

  std::vector<std::size_t> picked;
  picked.reserve(n);
  for (std::size_t t = 0; t < kStrata; ++t) {
    Rng rng = make_rng(seed, stream, t);
    std::vector<std::size_t>& pool = members[t];
    // Partial Fisher-Yates: the first quota[t] slots become a uniform sample.
    for (std::size_t s = 0; s < quota[t]; ++s) {
      const std::size_t j = s + uniform_index(rng, pool.size() - s);
      std::swap(pool[s], pool[j]);
    }
    picked.insert(picked.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(quota[t]));
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

PanelDataset stratified_sample(const PanelDataset& dataset, std::size_t n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("stratified_sample: n must be at least 3");
  if (n > dataset.item_count()) {
    throw std::invalid_argument("stratified_sample: n exceeds the item count");
  }
  const std::vector<double> entropies = human_entropies(dataset);
  const std::vector<std::size_t> picked = stratified_indices(entropies, n, seed);
  return dataset.select_items(picked);
}

}  // namespace paneldiag
