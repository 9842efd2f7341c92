// Acceptance gate: one PASS/FAIL line per criterion; exit status is the number of failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>

#include "paneldiag/aggregation.hpp"
#include "paneldiag/condorcet.hpp"
#include "paneldiag/independence.hpp"
#include "paneldiag/panel_data.hpp"
#include "paneldiag/stat_tests.hpp"
#include "paneldiag/synth.hpp"

using namespace paneldiag;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  std::array<char, 256> buf{};
  std::snprintf(buf.data(), buf.size(), format, a, b, c, d);
  return buf.data();
}

Outcome kish_fidelity() {
  struct Case {
    std::size_t k;
    double phi;
    double published;
  };
  const std::vector<Case> cases{{9, 0.391, 2.18}, {9, 0.354, 2.35}, {9, 0.328, 2.48}, {9, 0.456, 1.94},
                                {9, 0.440, 1.99}, {2, 0.391, 1.44}, {3, 0.391, 1.68}, {4, 0.391, 1.84},
                                {5, 0.391, 1.95}, {6, 0.391, 2.03}, {7, 0.391, 2.09}, {8, 0.391, 2.14}};
  double worst = 0.0;
  for (const Case& c : cases) worst = std::max(worst, std::abs(kish_neff(c.k, c.phi) - c.published));
  return {worst <= 0.01, fmt("%g pairs, max |error| %.4f (tol 0.01)", static_cast<double>(cases.size()), worst)};
}

Outcome eigen_consistency() {
  double worst = 0.0;
  for (const std::size_t k : {2, 5, 9, 20}) {
    for (const double rho : {0.0, 0.2, 0.391, 0.8}) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), rho);
      m.diagonal().setOnes();
      const EigenNeff e = eigen_neff(m);
      worst = std::max(worst, std::abs(e.neff - kish_neff(k, rho)));
      worst = std::max(worst, std::abs(e.lambda_max - (1.0 + static_cast<double>(k - 1) * rho)));
    }
  }
  return {worst <= 1e-6, fmt("max |eigen - kish| %.2e (tol 1e-6)", worst)};
}

Outcome condorcet_closed_form() {
  SynthSpec spec = uniform_spec(9, 1000, 0.68, 0.0, 2024);
  spec.labels = {"A", "B"};
  const SynthData data = generate(spec);
  std::vector<double> values;
  for (std::size_t j = 0; j < 9; ++j) {
    for (const double v : {0.68, 0.32, 0.32, 0.68}) values.push_back(v);
  }
  const ConfusionSet exchangeable(9, 2, DifficultyBins{}, std::move(values));
  const CondorcetPrediction p = simulate_condorcet(exchangeable, data.dataset, data.gold, 10000, 7);
  const double expected = closed_form_binary(9, 0.68);
  const double err = std::abs(p.predicted_accuracy - expected);
  return {err <= 0.005, fmt("simulated %.5f vs closed form %.5f, |diff| %.5f (tol 0.005)", p.predicted_accuracy,
                            expected, err)};
}

std::vector<std::size_t> tercile_strata(const PanelDataset& dataset) {
  const std::vector<double> entropies = human_entropies(dataset);
  return DifficultyBins::fit(entropies, 3).assign(entropies);
}

Outcome null_calibration() {
  constexpr std::size_t kRuns = 50;
  std::size_t both = 0;
  std::size_t gap_ok = 0;
  std::size_t p_ok = 0;
  double worst_gap = 0.0;
  for (std::size_t run = 0; run < kRuns; ++run) {
    const std::uint64_t seed = 5000 + run;
    const SynthData data = generate(uniform_spec(9, 2000, 0.7, 0.0, seed));
    const ConfusionSet cs = fit_confusion(data.dataset, data.gold, 3);
    const double gap = simulate_condorcet(cs, data.dataset, data.gold, 1000, seed).weighted_gap;
    const ErrorMatrix errors = error_matrix(data.dataset, data.gold);
    const double p = permutation_test(errors, tercile_strata(data.dataset), 1000, seed).p_value;
    const bool g = std::abs(gap) <= 0.015;
    const bool q = p > 0.05;
    gap_ok += g;
    p_ok += q;
    both += g && q;
    worst_gap = std::max(worst_gap, std::abs(gap));
  }
  const bool null_pass = both * 10 >= kRuns * 9;

  const SynthData coupled = generate(uniform_spec(9, 20000, 0.68, 0.625, 77));
  const ErrorMatrix errors = error_matrix(coupled.dataset, coupled.gold);
  const NeffResult n = summarize_neff(errors);
  const PermutationResult perm = permutation_test(errors, tercile_strata(coupled.dataset), 2000, 77);
  const bool coupled_pass = std::abs(n.mean_phi - 0.391) <= 0.015 && std::abs(n.kish_neff - 2.18) <= 0.1 &&
                            perm.p_value_corrected < 1e-3;

  std::ostringstream detail;
  detail << "c=0: " << both << "/" << kRuns << " runs with |gap| <= 1.5pp and p > 0.05 (gap " << gap_ok << ", p "
         << p_ok << ", max |gap| " << fmt("%.4f", worst_gap) << "); c=0.625: phi "
         << fmt("%.4f, n_eff %.3f, p %.2e", n.mean_phi, n.kish_neff, perm.p_value_corrected);
  return {null_pass && coupled_pass, detail.str()};
}

Outcome dawid_skene_oracle() {
  const SynthData data = generate_heterogeneous(heterogeneous_spec(5, 5000, 0.9, 0.55, 31));
  const double mv =
      accuracy(majority_decisions(resolved_votes(data.dataset), data.dataset.vocabulary()), data.gold);
  const DawidSkeneResult ds = dawid_skene(data.dataset);
  const double acc = accuracy(ds.predicted, data.gold);
  double worst_drop = 0.0;
  for (std::size_t t = 1; t < ds.log_likelihood_trace.size(); ++t) {
    worst_drop = std::max(worst_drop, ds.log_likelihood_trace[t - 1] - ds.log_likelihood_trace[t]);
  }
  // Rounding noise only: relative to the magnitude of the log-likelihood.
  const double tolerance = 1e-12 * std::abs(ds.log_likelihood_trace.back());
  return {acc >= mv + 0.02 && worst_drop <= tolerance,
          fmt("DS %.4f vs majority %.4f (need +0.02); largest log-likelihood drop %.2e over %g iterations", acc, mv,
              worst_drop, static_cast<double>(ds.iterations))};
}

Outcome entropy_fidelity() {
  struct Split {
    std::array<LabelId, 3> counts;
    double published;
  };
  const std::vector<Split> splits{{{9, 0, 0}, 0.000}, {{8, 1, 0}, 0.349}, {{7, 2, 0}, 0.530}, {{6, 3, 0}, 0.637},
                                  {{7, 1, 1}, 0.684}, {{5, 4, 0}, 0.687}, {{6, 2, 1}, 0.849}, {{5, 3, 1}, 0.937},
                                  {{4, 4, 1}, 0.965}, {{5, 2, 2}, 0.995}, {{4, 3, 2}, 1.061}};
  double worst = 0.0;
  for (const Split& s : splits) {
    std::vector<LabelId> votes;
    for (LabelId label = 0; label < 3; ++label) votes.insert(votes.end(), s.counts[label], label);
    worst = std::max(worst, std::abs(panel_entropy_nats(votes, 3) - s.published));
  }
  return {worst <= 0.001, fmt("%g splits, max |error| %.5f nats (tol 0.001)", static_cast<double>(splits.size()),
                              worst)};
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome report_determinism() {
  const fs::path root = fs::temp_directory_path() / ("paneldiag-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  const fs::path data = root / "data";
  const fs::path out = root / "out";
  const std::string cli = PANELDIAG_CLI_PATH;
  const std::string quiet = " >/dev/null 2>&1";
  if (run(cli + " synth --seed 11 --k 9 --n 1000 --accuracy 0.7 --copy 0.3 --out " + data.string() + quiet) != 0) {
    return {false, "synth subcommand failed"};
  }
  const std::string report = cli + " report --seed 42 --votes " + (data / "votes.jsonl").string() + " --judges " +
                             (data / "judges.json").string() + " --labels " + (data / "labels.json").string() +
                             " --sims 1000 --resamples 500 --gap-resamples 200 --gap-sims 200 --permutations 1000" +
                             " --convergence-repeats 20 --out " + out.string();
  std::vector<std::string> outputs;
  for (const char* threads : {"", " --threads 1", " --threads 8"}) {
    if (run(report + threads + quiet) != 0) return {false, "report subcommand failed"};
    outputs.push_back(slurp(out / "report.json"));
  }
  fs::remove_all(root);
  const bool repeat = outputs[0] == outputs[1];
  const bool threads = outputs[1] == outputs[2];
  return {!outputs[0].empty() && repeat && threads,
          std::string("repeat run ") + (repeat ? "identical" : "differs") + ", --threads 1 vs 8 " +
              (threads ? "identical" : "differs") + " (" + std::to_string(outputs[0].size()) + " bytes)"};
}

Outcome statistical_primitives() {
  const double p = binomial_test_onesided(4, 7, 0.488);
  const auto [lo, hi] = wilson_interval(5, 10, 0.95);
  const bool pass = std::abs(p - 0.793) <= 0.005 && std::abs(lo - 0.2366) <= 0.001 && std::abs(hi - 0.7634) <= 0.001;
  return {pass, fmt("binomial %.4f (0.793 +/- 0.005); wilson (%.4f, %.4f)", p, lo, hi)};
}

Outcome readme_limitation() {
  std::string text = slurp(PANELDIAG_README_PATH);
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  const bool pass = text.find("original judge-vote files") != std::string::npos &&
                    text.find("synthetic") != std::string::npos;
  return {pass, pass ? "README states that full-data reproduction needs the original judge-vote files"
                     : "README lacks the full-data reproduction statement"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"kish closed form", kish_fidelity},
      {"eigenvalue consistency", eigen_consistency},
      {"condorcet simulator vs closed form", condorcet_closed_form},
      {"null-model calibration", null_calibration},
      {"dawid-skene oracle", dawid_skene_oracle},
      {"panel entropy", entropy_fidelity},
      {"report determinism", report_determinism},
      {"statistical primitives", statistical_primitives},
      {"full-data reproduction statement", readme_limitation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures;
}
