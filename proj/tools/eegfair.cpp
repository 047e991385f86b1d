#include "eegfair/error.hpp"
#include "eegfair/parallel.hpp"
#include "eegfair/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <map>

int main(int argc, char** argv) {
  CLI::App app{"EEG Parkinson's classifier fairness toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", EEGFAIR_VERSION);

  std::string config_path, out_dir, mode;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  int replicates = 0;
  bool train_flag = false;
  auto* config_opt = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "run seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* threads_opt = app.add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
  auto* reps_opt = app.add_option("--replicates", replicates, "bootstrap replicates (default 100)")
                       ->check(CLI::PositiveNumber);
  auto* mode_opt = app.add_option("--mode", mode, "harmonization mode")->check(CLI::IsMember({"eb", "direct"}));

  using Command = std::function<void(const eegfair::RunConfig&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands = {
      {"synth", {"generate a synthetic cohort", eegfair::cmd_synth}},
      {"extract", {"compute spectral features from epoch files", eegfair::cmd_extract}},
      {"harmonize", {"split, fit ComBat on the training set and harmonize", eegfair::cmd_harmonize}},
      {"train", {"nested cross-validation and final model", eegfair::cmd_train}},
      {"audit", {"bootstrap subgroup audit, staging breakdown and group comparison",
                 [&](const eegfair::RunConfig& c) { eegfair::cmd_audit(c, train_flag); }}},
      {"compare", {"gender-specific retraining and common-feature t-tests", eegfair::cmd_compare}},
      {"stage", {"misclassification breakdown by disease stage", eegfair::cmd_stage}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    if (name == "audit") sub->add_flag("--train", train_flag, "train the model instead of reading model.json");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    eegfair::RunConfig cfg = config_opt->count() ? eegfair::load_run_config(config_path) : eegfair::RunConfig{};
    if (seed_opt->count()) cfg.seed = seed;
    if (out_opt->count()) cfg.paths.output_dir = out_dir;
    if (reps_opt->count()) cfg.bootstrap.n_replicates = replicates;
    if (mode_opt->count()) cfg.harmonization.mode = eegfair::parse_combat_mode(mode);
    eegfair::set_max_threads(threads_opt->count() ? threads : 1u);
    for (const auto* sub : app.get_subcommands()) commands.at(sub->get_name()).second(cfg);
  } catch (const eegfair::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Internal: %s\n", e.what());
    return 3;
  }
  return 0;
}
