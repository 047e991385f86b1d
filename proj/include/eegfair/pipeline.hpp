#pragma once

#include "eegfair/bootstrap.hpp"
#include "eegfair/combat.hpp"
#include "eegfair/gender_analysis.hpp"
#include "eegfair/model_selection.hpp"
#include "eegfair/psd.hpp"
#include "eegfair/serialization.hpp"
#include "eegfair/staging.hpp"
#include "eegfair/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace eegfair {

struct PreprocessConfig {
  bool filter = true;
  double highpass_hz = 1.0;
  double lowpass_hz = 30.0;
  double reject_uv = 100.0;
};

// Relative paths resolve against output_dir.
struct RunPaths {
  std::filesystem::path metadata = "metadata.csv";
  std::filesystem::path epochs_dir = "epochs";
  std::filesystem::path features = "features.csv";
  std::filesystem::path output_dir = ".";
};

struct RunConfig {
  std::optional<std::uint64_t> seed;  // mandatory at validation
  RunPaths paths;
  SpectralConfig spectral;
  PreprocessConfig preprocess;
  CombatOptions harmonization;
  SplitSpec split;
  CvOptions cv;
  BootstrapSpec bootstrap;
  StagingRules staging;
  bool conversion_configured = false;
  CompareOptions compare;
  std::vector<int> gender_k_grid{10, 25, 50, 100, 150, 181, 188, 203};
  SynthConfig synth = SynthConfig::reference_cohort();
  bool synth_signals = true;
  SignalConfig signal;

  // Seeds every stage from `seed`. Throws InvalidArgument.
  void validate() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
  // Stage seeds derived from the run seed.
  std::uint64_t stage_seed(std::uint64_t stage) const;
};

// Missing fields keep their defaults. Throws InvalidArgument / Io.
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);
// Effective configuration without paths; its hash identifies a run.
Json run_config_to_json(const RunConfig& cfg);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// Each command reads its inputs from, and writes its outputs to,
// cfg.paths.output_dir, and records itself in run_log.json there.
void cmd_synth(const RunConfig& cfg);
void cmd_extract(const RunConfig& cfg);
void cmd_harmonize(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_audit(const RunConfig& cfg, bool train_on_the_fly = false);
void cmd_compare(const RunConfig& cfg);
void cmd_stage(const RunConfig& cfg);

}  // namespace eegfair
