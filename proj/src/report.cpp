#include "paneldiag/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "paneldiag/digest.hpp"
#include "paneldiag/errors.hpp"
#include "paneldiag/synth.hpp"

namespace paneldiag {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (!seed) throw ValidationError("--seed is required");
  const std::pair<const char*, std::size_t> counts[] = {
      {"--bins", bins},
      {"--sims", sims},
      {"--resamples", neff_resamples},
      {"--gap-resamples", gap_resamples},
      {"--gap-sims", gap_sims},
      {"--permutations", permutations},
      {"--strata", strata},
      {"--folds", folds},
      {"--annotators", annotators},
      {"--convergence-repeats", convergence_repeats},
  };
  for (const auto& [flag, value] : counts) {
    if (value == 0) throw ValidationError(std::string(flag) + " must be positive");
  }
  if (folds < 2) throw ValidationError("--folds must be at least 2");
}

Json to_json(const RunConfig& c) {
  Json j;
  j["votes"] = c.votes;
  j["judges"] = c.judges;
  j["labels"] = c.labels;
  j["out"] = c.out;
  j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  j["bins"] = c.bins;
  j["sims"] = c.sims;
  j["neff_resamples"] = c.neff_resamples;
  j["gap_resamples"] = c.gap_resamples;
  j["gap_sims"] = c.gap_sims;
  j["permutations"] = c.permutations;
  j["strata"] = c.strata;
  j["folds"] = c.folds;
  j["annotators"] = c.annotators;
  j["convergence_repeats"] = c.convergence_repeats;
  return j;
}

namespace {

template <typename T>
Json optional_json(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

Json to_json(const NeffResult& r) {
  Json j;
  j["k"] = r.k;
  j["mean_phi"] = r.mean_phi;
  j["phi_sd"] = r.phi_sd;
  j["phi_min"] = r.phi_min;
  j["phi_max"] = r.phi_max;
  j["kish_neff"] = r.kish_neff;
  j["eigen_neff"] = r.eigen_neff;
  j["lambda_max"] = r.lambda_max;
  j["independence_ratio"] = r.independence_ratio;
  j["ci_low"] = optional_json(r.ci_low);
  j["ci_high"] = optional_json(r.ci_high);
  j["zero_variance_judges"] = r.zero_variance_judges;
  return j;
}

Json to_json(const PermutationResult& r) {
  Json j;
  j["observed_mean_phi"] = r.observed_mean_phi;
  j["null_mean"] = r.null_mean;
  j["null_sd"] = r.null_sd;
  j["z"] = r.z;
  j["exceed_count"] = r.exceed_count;
  j["p_value"] = r.p_value;
  j["p_value_corrected"] = r.p_value_corrected;
  j["p_value_display"] =
      r.exceed_count == 0 ? "< 1/" + std::to_string(r.permutations) : std::to_string(r.exceed_count) + "/" +
                                                                          std::to_string(r.permutations);
  j["permutations"] = r.permutations;
  return j;
}

Json to_json(const CondorcetBin& b) {
  Json j;
  j["profile"] = b.profile;
  j["panel_entropy"] = b.panel_entropy;
  j["n"] = b.n;
  j["correct"] = b.correct;
  j["actual_acc"] = b.actual_acc;
  j["predicted_acc"] = b.predicted_acc;
  j["gap"] = b.gap;
  j["p_value"] = b.p_value;
  j["wilson_low"] = b.wilson_low;
  j["wilson_high"] = b.wilson_high;
  j["tabulated"] = b.tabulated;
  return j;
}

Json to_json(const AggregationReport& r) {
  Json j;
  j["majority_accuracy"] = r.majority_accuracy;
  j["condorcet_predicted"] = r.condorcet_predicted;
  j["majority_ties"] = r.majority_ties;
  j["best_judge"] = r.best_judge;
  j["dawid_skene_iterations"] = r.dawid_skene_iterations;
  j["dawid_skene_converged"] = r.dawid_skene_converged;
  Json rows = Json::array();
  for (const AggregationOutcome& o : r.outcomes) {
    rows.push_back({{"method", o.method},
                    {"oracle_access", o.oracle_access},
                    {"cross_validated", o.cross_validated},
                    {"accuracy", o.accuracy},
                    {"gap_closed_fraction", optional_json(o.gap_closed_fraction)}});
  }
  j["outcomes"] = std::move(rows);
  return j;
}

Json to_json(const LeaveOneOutResult& r) {
  Json j;
  j["full_neff"] = r.full_neff;
  j["full_accuracy"] = r.full_accuracy;
  Json rows = Json::array();
  for (const LeaveOneOutRow& row : r.rows) {
    rows.push_back({{"judge_id", row.judge_id},
                    {"neff_without", row.neff_without},
                    {"delta_neff", row.delta_neff},
                    {"acc_without", row.acc_without},
                    {"delta_acc", row.delta_acc},
                    {"delta_acc_ci_low", row.delta_acc_ci_low},
                    {"delta_acc_ci_high", row.delta_acc_ci_high}});
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const ScalingCurve& c) {
  Json j;
  j["global_mean_phi"] = c.global_mean_phi;
  j["asymptote"] = optional_json(c.asymptote);
  j["sampled"] = c.sampled;
  Json rows = Json::array();
  for (const ScalingRow& row : c.rows) {
    rows.push_back({{"k", row.k},
                    {"subsets", row.subsets},
                    {"mean_neff", row.mean_neff},
                    {"min_neff", row.min_neff},
                    {"max_neff", row.max_neff},
                    {"kish_prediction", row.kish_prediction}});
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const SplitHalfResult& r) {
  Json j;
  j["in_sample_gap"] = r.in_sample_gap;
  j["gap_a_to_b"] = r.gap_a_to_b;
  j["gap_b_to_a"] = r.gap_b_to_a;
  j["cv_gap"] = r.cv_gap;
  j["ratio"] = optional_json(r.ratio);
  return j;
}

Json dataset_fingerprint(const PanelDataset& dataset) {
  std::ostringstream canonical;
  write_dataset(canonical, dataset);
  Json j;
  j["items"] = dataset.item_count();
  j["judges"] = dataset.judge_count();
  j["labels"] = dataset.vocabulary().labels();
  j["sha256"] = sha256_hex(canonical.str());
  return j;
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"neff", "condorcet", "permtest", "aggregate", "loo",
                                              "scaling", "splithalf", "dist", "synth", "report"};
  return names;
}

namespace {

// ---------------------------------------------------------------------------
// Output helpers

std::string num(double value) {
  if (!std::isfinite(value)) return "";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

std::string num(std::size_t value) { return std::to_string(value); }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (const char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t c = 0; c < fields.size(); ++c) out_ << (c ? "," : "") << csv_field(fields[c]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const Json& document) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << document.dump(2) << '\n';
}

/// Inputs shared by every data-driven subcommand.
struct Inputs {
  PanelDataset dataset;
  std::vector<GoldLabel> gold;
  Json fingerprint;
  std::size_t filled_votes = 0;
};

Inputs load_inputs(const RunConfig& config) {
  if (config.votes.empty()) throw ValidationError("--votes is required");
  if (config.labels.empty()) throw ValidationError("--labels is required");
  const LabelVocabulary vocabulary = load_vocabulary(config.labels);
  std::vector<JudgeMeta> judges;
  if (!config.judges.empty()) judges = load_judges(config.judges);
  const PanelDataset raw = load_dataset(config.votes, vocabulary, std::move(judges));
  Json fingerprint = dataset_fingerprint(raw);
  const std::size_t missing = raw.missing_count();
  PanelDataset filled = fill_missing(raw);
  std::vector<GoldLabel> gold = derive_gold(filled);
  return {std::move(filled), std::move(gold), std::move(fingerprint), missing};
}

Json envelope(const RunConfig& config, const Inputs* inputs) {
  Json j;
  j["tool_version"] = std::string(kToolVersion);
  j["config"] = to_json(config);
  if (inputs) {
    j["dataset"] = inputs->fingerprint;
    j["dataset"]["missing_votes_filled"] = inputs->filled_votes;
  }
  return j;
}

std::vector<std::size_t> entropy_strata(const PanelDataset& dataset, std::size_t strata) {
  const std::vector<double> entropies = human_entropies(dataset);
  return DifficultyBins::fit(entropies, strata).assign(entropies);
}

// ---------------------------------------------------------------------------
// Sections. Each returns its JSON block and writes its tables into `dir`.

Json neff_section(const Inputs& in, const RunConfig& config, const fs::path& dir) {
  const ErrorMatrix errors = error_matrix(in.dataset, in.gold);
  const NeffResult neff = compute_neff(errors, in.dataset.judges(), config.neff_resamples, *config.seed);
  const PhiMatrix phi = phi_matrix(errors);
  const FamilyContrast families = family_contrast(phi, in.dataset.judges());
  const ErrorHistogram histogram = error_count_histogram(errors);

  Json j;
  j["neff"] = to_json(neff);
  j["krippendorff_alpha"] = krippendorff_alpha(in.dataset);
  j["judge_error_rates"] = Json::object();
  for (std::size_t k = 0; k < errors.judge_count(); ++k) {
    j["judge_error_rates"][in.dataset.judges()[k].judge_id] = errors.error_rate(k);
  }
  Json fam;
  fam["mean_phi_same_family"] = optional_json(families.mean_phi_same_family);
  fam["mean_phi_cross_family"] = families.mean_phi_cross_family;
  fam["difference"] = optional_json(families.difference);
  fam["top_pairs"] = Json::array();
  for (const JudgePair& p : families.top_pairs) {
    fam["top_pairs"].push_back({{"judge_a", p.judge_a},
                                {"judge_b", p.judge_b},
                                {"family_a", p.family_a},
                                {"family_b", p.family_b},
                                {"phi", p.phi}});
  }
  j["family_contrast"] = std::move(fam);
  j["error_histogram"] = {{"observed", histogram.observed}, {"independence_null", histogram.independence_null}};

  std::vector<std::string> header{"judge_id"};
  for (const JudgeMeta& m : in.dataset.judges()) header.push_back(m.judge_id);
  Csv phi_csv(dir / "phi_matrix.csv", header);
  for (std::size_t a = 0; a < phi.size(); ++a) {
    std::vector<std::string> row{in.dataset.judges()[a].judge_id};
    for (std::size_t b = 0; b < phi.size(); ++b) {
      row.push_back(num(phi.phi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))));
    }
    phi_csv.row(row);
  }
  Csv hist_csv(dir / "error_histogram.csv", {"errors", "observed", "independence_null"});
  for (std::size_t e = 0; e < histogram.observed.size(); ++e) {
    hist_csv.row({num(e), num(histogram.observed[e]), num(histogram.independence_null[e])});
  }
  return j;
}

struct CondorcetRun {
  ConfusionSet confusion;
  CondorcetPrediction prediction;
};

CondorcetRun run_condorcet(const Inputs& in, const RunConfig& config) {
  ConfusionSet confusion = fit_confusion(in.dataset, in.gold, config.bins);
  CondorcetPrediction prediction = simulate_condorcet(confusion, in.dataset, in.gold, config.sims, *config.seed);
  return {std::move(confusion), std::move(prediction)};
}

Json condorcet_section(const Inputs& in, const RunConfig& config, const CondorcetRun& run, const fs::path& dir) {
  const CondorcetPrediction& pred = run.prediction;
  const auto ci = gap_ci(in.dataset, in.gold, config.bins, config.gap_resamples, config.gap_sims, *config.seed);

  std::vector<std::size_t> bins_list{1, 2, 3, 4, 5, config.bins};
  std::sort(bins_list.begin(), bins_list.end());
  bins_list.erase(std::unique(bins_list.begin(), bins_list.end()), bins_list.end());
  const auto decomposition = difficulty_decomposition(in.dataset, in.gold, bins_list, config.sims, *config.seed);

  Json j;
  j["bins"] = run.confusion.bin_count();
  j["edges"] = run.confusion.bins().edges();
  j["sims"] = pred.sims;
  j["actual_accuracy"] = pred.actual_accuracy;
  j["predicted_accuracy"] = pred.predicted_accuracy;
  j["weighted_gap"] = pred.weighted_gap;
  j["gap"] = pred.shortfall();
  j["gap_ci"] = {ci.first, ci.second};
  j["per_bin"] = Json::array();
  for (const CondorcetBin& b : pred.per_bin) j["per_bin"].push_back(to_json(b));
  j["decomposition"] = Json::array();
  for (const DecompositionRow& row : decomposition) {
    j["decomposition"].push_back({{"bins", row.bins},
                                  {"gap", row.shortfall},
                                  {"fraction_explained", optional_json(row.fraction_explained)}});
  }
  try {
    const UnanimousCheck check = unanimous_error_check(in.dataset, in.gold, run.confusion, config.sims, *config.seed);
    j["unanimous"] = {{"items", check.unanimous_items},
                      {"actual_accuracy", check.actual_accuracy},
                      {"predicted_accuracy", optional_json(check.predicted_accuracy)}};
  } catch (const std::invalid_argument&) {
    j["unanimous"] = nullptr;
  }

  Csv bins_csv(dir / "condorcet_bins.csv",
               {"profile", "H_panel", "n", "correct", "actual", "predicted", "gap", "p", "tabulated"});
  Csv gap_csv(dir / "condorcet_gap.csv", {"H_panel", "n", "actual", "predicted", "wilson_low", "wilson_high"});
  for (const CondorcetBin& b : pred.per_bin) {
    std::string profile;
    for (std::size_t t = 0; t < b.profile.size(); ++t) profile += (t ? "-" : "") + std::to_string(b.profile[t]);
    bins_csv.row({profile, num(b.panel_entropy), num(b.n), num(b.correct), num(b.actual_acc), num(b.predicted_acc),
                  num(b.gap), num(b.p_value), b.tabulated ? "1" : "0"});
    gap_csv.row({num(b.panel_entropy), num(b.n), num(b.actual_acc), num(b.predicted_acc), num(b.wilson_low),
                 num(b.wilson_high)});
  }
  Csv decomposition_csv(dir / "decomposition.csv", {"bins", "gap", "fraction_explained"});
  for (const DecompositionRow& row : decomposition) {
    decomposition_csv.row(
        {num(row.bins), num(row.shortfall), row.fraction_explained ? num(*row.fraction_explained) : ""});
  }

  const ConfusionSet& cs = run.confusion;
  const auto& labels = in.dataset.vocabulary().labels();
  Json confusion;
  confusion["labels"] = labels;
  confusion["edges"] = cs.bins().edges();
  confusion["judges"] = Json::object();
  for (std::size_t jdx = 0; jdx < cs.judge_count(); ++jdx) {
    Json per_bin = Json::array();
    for (std::size_t b = 0; b < cs.bin_count(); ++b) {
      Json matrix = Json::array();
      for (std::size_t t = 0; t < cs.label_count(); ++t) {
        const auto row = cs.row(jdx, b, static_cast<LabelId>(t));
        matrix.push_back(std::vector<double>(row.begin(), row.end()));
      }
      per_bin.push_back(std::move(matrix));
    }
    confusion["judges"][in.dataset.judges()[jdx].judge_id] = std::move(per_bin);
  }
  write_json(dir / "confusion.json", confusion);
  return j;
}

Json permtest_section(const Inputs& in, const RunConfig& config) {
  const ErrorMatrix errors = error_matrix(in.dataset, in.gold);
  const std::vector<std::size_t> strata = entropy_strata(in.dataset, config.strata);
  Json j = to_json(permutation_test(errors, strata, config.permutations, *config.seed));
  j["strata"] = {{"by", "human entropy"}, {"count", config.strata}};
  return j;
}

Json aggregate_section(const Inputs& in, const RunConfig& config, double condorcet_predicted, const fs::path& dir) {
  const AggregationReport report =
      aggregation_report(in.dataset, in.gold, condorcet_predicted, config.folds, *config.seed);
  Csv csv(dir / "aggregation.csv", {"method", "oracle_access", "cross_validated", "accuracy", "gap_closed_fraction"});
  for (const AggregationOutcome& o : report.outcomes) {
    csv.row({o.method, o.oracle_access ? "1" : "0", o.cross_validated ? "1" : "0", num(o.accuracy),
             o.gap_closed_fraction ? num(*o.gap_closed_fraction) : ""});
  }
  return to_json(report);
}

Json loo_section(const Inputs& in, const RunConfig& config, const fs::path& dir) {
  const LeaveOneOutResult result = leave_one_out(in.dataset, in.gold, config.gap_resamples, *config.seed);
  Csv csv(dir / "loo.csv", {"judge_id", "neff_without", "delta_neff", "acc_without", "delta_acc", "delta_acc_ci_low",
                            "delta_acc_ci_high"});
  for (const LeaveOneOutRow& r : result.rows) {
    csv.row({r.judge_id, num(r.neff_without), num(r.delta_neff), num(r.acc_without), num(r.delta_acc),
             num(r.delta_acc_ci_low), num(r.delta_acc_ci_high)});
  }
  return to_json(result);
}

Json scaling_section(const Inputs& in, const RunConfig& config, const fs::path& dir) {
  const ScalingCurve curve = scaling_curve(phi_matrix(error_matrix(in.dataset, in.gold)), *config.seed);
  Csv csv(dir / "scaling_curve.csv", {"k", "subsets", "mean_neff", "min_neff", "max_neff", "kish_prediction"});
  for (const ScalingRow& r : curve.rows) {
    csv.row({num(r.k), num(r.subsets), num(r.mean_neff), num(r.min_neff), num(r.max_neff), num(r.kish_prediction)});
  }
  return to_json(curve);
}

Json splithalf_section(const Inputs& in, const RunConfig& config) {
  return to_json(split_half(in.dataset, in.gold, config.bins, config.sims, *config.seed));
}

Json summary_json(const AlignmentSummary& s) {
  return {{"n", s.n}, {"mean_tv", s.mean_tv}, {"sd_tv", s.sd_tv}, {"mean_sym_kl", s.mean_sym_kl}};
}

Json dist_section(const Inputs& in, const RunConfig& config, const fs::path& dir) {
  const AlignmentResult aligned = alignment(in.dataset);
  const ErrorMatrix errors = error_matrix(in.dataset, in.gold);
  const AllWrongBreakdown wrong = all_wrong_analysis(in.dataset, in.gold, errors);
  const auto& vocab = in.dataset.vocabulary();

  Json j;
  Json align;
  align["overall"] = summary_json(aligned.overall);
  for (std::size_t t = 0; t < 3; ++t) {
    align[to_string(static_cast<Tercile>(t))] = summary_json(aligned.by_tercile[t]);
  }
  try {
    align["tv_entropy_spearman"] = alignment_entropy_correlation(aligned.records);
  } catch (const std::invalid_argument&) {
    align["tv_entropy_spearman"] = nullptr;
  }
  j["alignment"] = std::move(align);

  Json aw;
  aw["total"] = wrong.total;
  aw["by_tercile"] = Json::object();
  for (std::size_t t = 0; t < 3; ++t) aw["by_tercile"][to_string(static_cast<Tercile>(t))] = wrong.by_tercile[t];
  aw["biased"] = wrong.biased;
  aw["ambiguous"] = wrong.ambiguous;
  aw["directions"] = Json::array();
  for (const ConfusionDirection& d : wrong.directions) {
    aw["directions"].push_back({{"gold", vocab.name(d.gold)}, {"panel", vocab.name(d.panel)}, {"count", d.count}});
  }
  aw["mean_human_support_for_panel"] = optional_json(wrong.mean_human_support_for_panel);
  j["all_wrong"] = std::move(aw);
  j["human_neff"] = to_json(human_neff(in.dataset, config.annotators, *config.seed));

  Csv align_csv(dir / "alignment.csv", {"item_id", "tv", "sym_kl", "human_entropy", "tercile"});
  for (const AlignmentRecord& r : aligned.records) {
    align_csv.row({r.item_id, num(r.tv), num(r.sym_kl), num(r.human_entropy), to_string(r.tercile)});
  }
  Csv wrong_csv(dir / "all_wrong.csv", {"item_id", "tercile", "type", "gold", "panel", "human_support_for_panel"});
  for (const AllWrongItem& r : wrong.items) {
    wrong_csv.row({r.item_id, to_string(r.tercile), r.biased ? "biased" : "ambiguous", vocab.name(r.gold),
                   vocab.name(r.panel), num(r.human_support_for_panel)});
  }
  return j;
}

Json convergence_section(const Inputs& in, const RunConfig& config, const fs::path& dir) {
  const ErrorMatrix errors = error_matrix(in.dataset, in.gold);
  const std::vector<double> entropies = human_entropies(in.dataset);
  const std::size_t n = in.dataset.item_count();
  std::vector<std::size_t> sizes;
  for (const std::size_t s : {50, 100, 200, 300, 500, 750}) {
    if (s < n) sizes.push_back(s);
  }
  sizes.push_back(n);
  const auto rows =
      convergence_curve(errors, entropies, sizes, config.convergence_repeats, config.neff_resamples, *config.seed);
  Json j = Json::array();
  Csv csv(dir / "convergence.csv", {"n", "mean_neff", "pct2_5", "pct97_5", "std", "bootstrap"});
  for (const ConvergenceRow& r : rows) {
    j.push_back({{"n", r.n},
                 {"mean_neff", r.mean_neff},
                 {"pct2_5", r.pct2_5},
                 {"pct97_5", r.pct97_5},
                 {"std", r.std},
                 {"bootstrap", r.bootstrap}});
    csv.row({num(r.n), num(r.mean_neff), num(r.pct2_5), num(r.pct97_5), num(r.std), r.bootstrap ? "1" : "0"});
  }
  return j;
}

void run_synth(const RunConfig& config, const fs::path& dir) {
  if (!(config.synth_accuracy > 0.0 && config.synth_accuracy <= 1.0)) {
    throw ValidationError("--accuracy must lie in (0, 1]");
  }
  if (!(config.synth_copy >= 0.0 && config.synth_copy <= 1.0)) throw ValidationError("--copy must lie in [0, 1]");
  const SynthData data = generate(
      uniform_spec(config.synth_judges, config.synth_items, config.synth_accuracy, config.synth_copy, *config.seed));
  const auto write = [&](const char* name, const auto& writer) {
    std::ofstream out(dir / name);
    if (!out) throw ValidationError("cannot write " + (dir / name).string());
    writer(out);
  };
  write("votes.jsonl", [&](std::ostream& out) { write_dataset(out, data.dataset); });
  write("judges.json", [&](std::ostream& out) { write_judges(out, data.dataset.judges()); });
  write("labels.json", [&](std::ostream& out) { write_vocabulary(out, data.dataset.vocabulary()); });

  Json j = envelope(config, nullptr);
  j["synth"] = {{"judges", config.synth_judges},
                {"items", config.synth_items},
                {"accuracy", config.synth_accuracy},
                {"copy_prob", config.synth_copy},
                {"analytic_phi", config.synth_copy * config.synth_copy}};
  j["dataset"] = dataset_fingerprint(data.dataset);
  write_json(dir / "synth.json", j);
}

void run_named(std::string_view name, const RunConfig& config) {
  config.validate();
  if (config.out.empty()) throw ValidationError("--out is required");
  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir.string() + ": " + ec.message());

  if (name == "synth") {
    run_synth(config, dir);
    return;
  }

  const Inputs in = load_inputs(config);
  Json j = envelope(config, &in);
  if (name == "neff") {
    j.update(neff_section(in, config, dir));
  } else if (name == "condorcet") {
    j["condorcet"] = condorcet_section(in, config, run_condorcet(in, config), dir);
  } else if (name == "permtest") {
    j["permutation_test"] = permtest_section(in, config);
  } else if (name == "aggregate") {
    j["aggregation"] = aggregate_section(in, config, run_condorcet(in, config).prediction.predicted_accuracy, dir);
  } else if (name == "loo") {
    j["leave_one_out"] = loo_section(in, config, dir);
  } else if (name == "scaling") {
    j["scaling"] = scaling_section(in, config, dir);
  } else if (name == "splithalf") {
    j["split_half"] = splithalf_section(in, config);
  } else if (name == "dist") {
    j["distributional"] = dist_section(in, config, dir);
  } else if (name == "report") {
    j.update(neff_section(in, config, dir));
    const CondorcetRun run = run_condorcet(in, config);
    j["condorcet"] = condorcet_section(in, config, run, dir);
    j["permutation_test"] = permtest_section(in, config);
    j["aggregation"] = aggregate_section(in, config, run.prediction.predicted_accuracy, dir);
    j["leave_one_out"] = in.dataset.judge_count() >= 3 ? loo_section(in, config, dir) : Json(nullptr);
    j["scaling"] = scaling_section(in, config, dir);
    j["split_half"] = in.dataset.item_count() >= 20 ? splithalf_section(in, config) : Json(nullptr);
    j["distributional"] = dist_section(in, config, dir);
    j["convergence"] = convergence_section(in, config, dir);
  } else {
    throw ValidationError("unknown subcommand '" + std::string(name) + "'");
  }
  write_json(dir / (name == "report" ? std::string("report.json") : std::string(name) + ".json"), j);
}

}  // namespace

int run_subcommand(std::string_view name, const RunConfig& config, std::ostream& err) {
  try {
    run_named(name, config);
    return 0;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace paneldiag
