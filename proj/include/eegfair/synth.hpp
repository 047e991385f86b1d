#pragma once

#include "eegfair/psd.hpp"
#include "eegfair/records.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eegfair {

struct SynthCenter {
  std::string name;
  int n_pd = 0;
  int n_nonpd = 0;
  int n_pd_female = 0;
  int n_nonpd_female = 0;
  double batch_shift = 0.0;  // in noise SDs, added to every feature
  double batch_scale = 1.0;  // multiplies the noise
  double age_mean = 65.0, age_sd = 8.0;
  double updrs_mean = 28.0, updrs_sd = 12.0;
  UpdrsVersion updrs_version = UpdrsVersion::MDS_UPDRS;
  double duration_mean = 65.0, duration_sd = 40.0;  // months
  int n_missing_duration_female = 0;                // PD females without a duration
};

struct SynthConfig {
  std::vector<SynthCenter> centers;
  std::vector<FeatureKey> informative_keys;  // empty: draw n_informative keys from the seed
  int n_informative = 20;
  double effect_size_male = 2.0;    // PD shift per informative key, in noise SDs
  double effect_size_female = 0.4;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;

  // Four centers with the class and gender counts of the reference cohort
  // (169 subjects) and mild batch effects.
  static SynthConfig reference_cohort();
  // Throws DegenerateConfig.
  void validate() const;
};

// Log10 relative powers of the five disjoint sub-bands used as the baseline
// spectrum: delta, slow theta, fast theta, alpha, beta.
inline constexpr std::array<double, 5> kBaselineFractions = {0.30, 0.08, 0.12, 0.30, 0.20};

struct GroundTruth {
  std::uint64_t seed = 0;
  double effect_size_male = 0, effect_size_female = 0, noise_sd = 0;
  std::vector<FeatureKey> informative_keys;  // canonical order
  std::vector<int> directions;               // +-1 per informative key
  Eigen::VectorXd baseline;                  // 203, canonical order
  std::vector<std::string> centers;
  std::vector<double> batch_shift, batch_scale;
  std::map<std::string, double> severity;  // PD subjects only

  // Expected feature value of a subject (noise integrated out).
  double expected_value(const SubjectRecord& r, const FeatureKey& key) const;
};

struct SynthFeatures {
  std::vector<SubjectRecord> records;
  FeatureTable table;
  GroundTruth truth;
};

// Feature model, per subject i in center c and key k:
//   x = baseline_k + noise_sd * (shift_c + scale_c * eps)
//       + [PD, informative] noise_sd * effect_gender * dir_k * (1 + 0.25 z_i)
// where z_i is the subject's severity, which also drives UPDRS and duration.
SynthFeatures generate_features(const SynthConfig& cfg);

// Fractions of the five disjoint sub-bands per channel, in the order of
// kBaselineFractions.
using SubBandTargets = std::array<double, 5>;
inline constexpr std::array<double, 5> kToneFrequencies = {2.0, 4.5, 7.0, 10.0, 16.0};

struct SignalConfig {
  double sampling_rate_hz = 256.0;
  int n_epochs = 10;
  double rms_uv = 20.0;
  double noise_fraction = 0.02;    // share of power in random-phase per-bin noise
  double spike_probability = 0.0;  // per epoch, adds a 150 uV spike
  SpectralConfig spectral;
  std::uint64_t seed = 0;
};

// M(b, j): windowed periodogram power of a unit tone j landing in sub-band b,
// from the spectral window's transform (no signal is simulated).
using LeakageMatrix = Eigen::Matrix<double, 5, 5>;
LeakageMatrix leakage_matrix(const SignalConfig& cfg);

// Relative tone powers p solving M p = targets; negative solutions clamp to 0.
std::array<double, 5> tone_powers(const SubBandTargets& targets, const LeakageMatrix& M);
std::array<double, 5> tone_powers(const SubBandTargets& targets, const SignalConfig& cfg);

// Sub-band targets implied by a feature row: 10^x of the five disjoint bands,
// renormalised.
SubBandTargets targets_from_features(const FeatureTable& table, Eigen::Index row, Channel channel);

// Throws DegenerateConfig (rate < 64 Hz, no epochs, invalid targets).
EpochSet synthesize_epochs(const std::string& subject_id, const std::array<SubBandTargets, kNumChannels>& targets,
                           const SignalConfig& cfg, std::uint64_t stream_seed);

struct SynthSignals {
  SynthFeatures features;
  std::vector<EpochSet> epochs;  // one per subject, record order
};

SynthSignals generate_signals(const SynthConfig& cfg, const SignalConfig& signal);

}  // namespace eegfair
