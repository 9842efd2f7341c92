// Command-line front end: one subcommand per analysis, shared flags.
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "paneldiag/parallel.hpp"
#include "paneldiag/report.hpp"

namespace {

struct CliState {
  paneldiag::RunConfig config;
  std::optional<std::size_t> resamples;
  std::optional<std::size_t> gap_resamples;
  unsigned threads = 0;
};

void add_shared_flags(CLI::App& cmd, CliState& s) {
  auto& c = s.config;
  cmd.add_option("--votes", c.votes, "JSON Lines votes file");
  cmd.add_option("--judges", c.judges, "JSON judge metadata (judge_id, family)");
  cmd.add_option("--labels", c.labels, "JSON label vocabulary");
  cmd.add_option("--seed", c.seed, "master seed (required)");
  cmd.add_option("--bins", c.bins, "difficulty bins")->capture_default_str();
  cmd.add_option("--sims", c.sims, "Monte Carlo panels per item")->capture_default_str();
  cmd.add_option("--resamples", s.resamples, "bootstrap resamples (default 10000 for n_eff, 1000 for the gap)");
  cmd.add_option("--gap-resamples", s.gap_resamples, "bootstrap resamples for the gap interval");
  cmd.add_option("--gap-sims", c.gap_sims, "panels per item inside each gap resample")->capture_default_str();
  cmd.add_option("--permutations", c.permutations, "permutations")->capture_default_str();
  cmd.add_option("--strata", c.strata, "human-entropy strata for the permutation test")->capture_default_str();
  cmd.add_option("--folds", c.folds, "cross-validation folds")->capture_default_str();
  cmd.add_option("--annotators", c.annotators, "pseudo-annotators for the human panel")->capture_default_str();
  cmd.add_option("--convergence-repeats", c.convergence_repeats, "subsamples per convergence size")
      ->capture_default_str();
  cmd.add_option("--out", c.out, "output directory");
  cmd.add_option("--threads", s.threads, "worker cap (0 = hardware concurrency)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panel diagnostics: error correlation, Condorcet gap and aggregation for LLM judge panels"};
  app.set_version_flag("--version", std::string(paneldiag::kToolVersion));
  app.require_subcommand(1);

  const std::map<std::string, std::string> about{
      {"neff", "error correlation, Kish and eigenvalue n_eff, Krippendorff alpha"},
      {"condorcet", "item-aware Condorcet prediction, gap interval, difficulty decomposition"},
      {"permtest", "stratified permutation test of mean error correlation"},
      {"aggregate", "majority, Dawid-Skene, weighted votes and best individual"},
      {"loo", "leave-one-judge-out deltas"},
      {"scaling", "n_eff over every judge subset size"},
      {"splithalf", "split-half check of the confusion model"},
      {"dist", "panel vs human distributions, all-wrong items, human n_eff"},
      {"synth", "write a synthetic correlated panel"},
      {"report", "every analysis in one report.json"},
  };
  CliState state;
  for (const std::string& name : paneldiag::subcommand_names()) {
    CLI::App* cmd = app.add_subcommand(name, about.at(name));
    add_shared_flags(*cmd, state);
    if (name == "synth") {
      cmd->add_option("--k", state.config.synth_judges, "judges")->capture_default_str();
      cmd->add_option("--n", state.config.synth_items, "items")->capture_default_str();
      cmd->add_option("--accuracy", state.config.synth_accuracy, "per-judge accuracy")->capture_default_str();
      cmd->add_option("--copy", state.config.synth_copy, "common-mode copy probability")->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (state.resamples) {
    state.config.neff_resamples = *state.resamples;
    state.config.gap_resamples = *state.resamples;
  }
  if (state.gap_resamples) state.config.gap_resamples = *state.gap_resamples;
  if (state.threads > 0) paneldiag::set_max_threads(state.threads);

  const std::string name = app.get_subcommands().front()->get_name();
  return paneldiag::run_subcommand(name, state.config, std::cerr);
}
