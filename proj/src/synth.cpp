#include "eegfair/synth.hpp"

#include "eegfair/error.hpp"
#include "eegfair/parallel.hpp"
#include "eegfair/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace eegfair {

namespace {

constexpr double kSeverityGain = 0.25;

// Position of a bounded band among the five disjoint sub-bands, or -1.
int sub_band_of(Band b) {
  switch (b) {
    case Band::delta: return 0;
    case Band::slow_theta: return 1;
    case Band::fast_theta: return 2;
    case Band::alpha: return 3;
    case Band::beta: return 4;
    default: return -1;
  }
}

double baseline_log(Band b) {
  const auto& f = kBaselineFractions;
  switch (b) {
    case Band::theta: return std::log10(f[1] + f[2]);
    case Band::alpha_theta_ratio: return std::log10(f[3] / (f[1] + f[2]));
    default: return std::log10(f[static_cast<std::size_t>(sub_band_of(b))]);
  }
}

double round1(double x) { return std::round(x * 10.0) / 10.0; }

}  // namespace

SynthConfig SynthConfig::reference_cohort() {
  SynthConfig c;
  c.centers = {
      {"IowaCity", 14, 14, 8, 8, 0.8, 1.0, 70.5, 8.6, 13.4, 6.6, UpdrsVersion::MDS_UPDRS, 66.9, 38.7, 0},
      {"Medellin", 36, 36, 12, 12, -0.5, 1.3, 63.5, 8.0, 30.8, 12.0, UpdrsVersion::UPDRS, 61.6, 37.4, 0},
      {"SanDiego", 15, 16, 8, 9, 0.3, 0.8, 63.3, 8.2, 32.7, 10.4, UpdrsVersion::UPDRS, 53.6, 40.5, 0},
      {"Turku", 19, 19, 11, 12, -0.6, 1.1, 69.6, 7.7, 27.6, 16.9, UpdrsVersion::MDS_UPDRS, 80.5, 63.0, 2},
  };
  return c;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::DegenerateConfig, msg); };
  if (centers.empty()) fail("no centers");
  int n_pd = 0, n_nonpd = 0, n_f = 0, n_m = 0;
  for (const auto& c : centers) {
    if (c.name.empty()) fail("center without a name");
    if (c.n_pd < 0 || c.n_nonpd < 0 || c.n_pd_female < 0 || c.n_nonpd_female < 0 || c.n_pd_female > c.n_pd ||
        c.n_nonpd_female > c.n_nonpd)
      fail("center " + c.name + " has inconsistent counts");
    if (c.n_missing_duration_female < 0 || c.n_missing_duration_female > c.n_pd_female)
      fail("center " + c.name + " has more missing durations than PD females");
    if (!(c.batch_scale > 0)) fail("center " + c.name + " needs a positive batch scale");
    n_pd += c.n_pd;
    n_nonpd += c.n_nonpd;
    n_f += c.n_pd_female + c.n_nonpd_female;
    n_m += c.n_pd + c.n_nonpd - c.n_pd_female - c.n_nonpd_female;
  }
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if (centers[i].name == centers[j].name) fail("duplicate center " + centers[i].name);
  if (n_pd + n_nonpd < 8) fail("fewer than 8 subjects");
  if (n_pd == 0 || n_nonpd == 0) fail("both diagnosis classes are required");
  if (n_f == 0 || n_m == 0) fail("both genders are required");
  if (!(noise_sd > 0)) fail("noise_sd must be positive");
  if (informative_keys.empty() && (n_informative < 0 || n_informative > static_cast<int>(kNumFeatures)))
    fail("n_informative out of range");
}

double GroundTruth::expected_value(const SubjectRecord& r, const FeatureKey& key) const {
  const auto ci = std::find(centers.begin(), centers.end(), r.center);
  if (ci == centers.end()) throw Error(ErrorKind::UnknownBatch, "center " + r.center + " not in ground truth");
  const auto c = static_cast<std::size_t>(ci - centers.begin());
  double v = baseline[static_cast<Eigen::Index>(key.canonical_index())] + noise_sd * batch_shift[c];
  if (r.is_pd()) {
    const auto it = std::lower_bound(informative_keys.begin(), informative_keys.end(), key);
    if (it != informative_keys.end() && *it == key) {
      const double effect = r.gender == Gender::male ? effect_size_male : effect_size_female;
      const auto s = severity.find(r.subject_id);
      const double z = s == severity.end() ? 0.0 : s->second;
      v += noise_sd * effect * directions[static_cast<std::size_t>(it - informative_keys.begin())] *
           (1.0 + kSeverityGain * z);
    }
  }
  return v;
}

SynthFeatures generate_features(const SynthConfig& cfg) {
  cfg.validate();
  SynthFeatures out;
  auto& truth = out.truth;
  truth.seed = cfg.seed;
  truth.effect_size_male = cfg.effect_size_male;
  truth.effect_size_female = cfg.effect_size_female;
  truth.noise_sd = cfg.noise_sd;

  const auto keys = all_feature_keys();
  {
    Rng rng(derive_seed(cfg.seed, {1}));
    if (cfg.informative_keys.empty()) {
      auto pool = keys;
      rng.shuffle(pool.begin(), pool.end());
      pool.resize(static_cast<std::size_t>(cfg.n_informative));
      truth.informative_keys = pool;
    } else {
      truth.informative_keys = cfg.informative_keys;
    }
    std::sort(truth.informative_keys.begin(), truth.informative_keys.end());
    truth.informative_keys.erase(std::unique(truth.informative_keys.begin(), truth.informative_keys.end()),
                                 truth.informative_keys.end());
    for (std::size_t i = 0; i < truth.informative_keys.size(); ++i)
      truth.directions.push_back(rng.uniform() < 0.5 ? -1 : 1);
  }
  {
    Rng rng(derive_seed(cfg.seed, {2}));
    std::array<double, kNumChannels> channel_offset{};
    for (auto& o : channel_offset) o = rng.normal(0.0, 0.03);
    truth.baseline.resize(static_cast<Eigen::Index>(kNumFeatures));
    for (const auto& k : keys)
      truth.baseline[static_cast<Eigen::Index>(k.canonical_index())] =
          baseline_log(k.band) +
          (k.band == Band::alpha_theta_ratio ? 0.0 : channel_offset[static_cast<std::size_t>(k.channel)]);
  }
  for (const auto& c : cfg.centers) {
    truth.centers.push_back(c.name);
    truth.batch_shift.push_back(c.batch_shift);
    truth.batch_scale.push_back(c.batch_scale);
  }

  // Effect direction per canonical column, 0 when uninformative.
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kNumFeatures));
  for (std::size_t i = 0; i < truth.informative_keys.size(); ++i)
    direction[static_cast<Eigen::Index>(truth.informative_keys[i].canonical_index())] = truth.directions[i];

  int total = 0;
  for (const auto& c : cfg.centers) total += c.n_pd + c.n_nonpd;
  out.table.keys = keys;
  out.table.values.resize(total, static_cast<Eigen::Index>(kNumFeatures));

  std::uint64_t index = 0;
  for (std::size_t ci = 0; ci < cfg.centers.size(); ++ci) {
    const auto& c = cfg.centers[ci];
    int subject_no = 0;
    int missing_left = c.n_missing_duration_female;
    for (auto dx : {Diagnosis::PD, Diagnosis::nonPD}) {
      const int n = dx == Diagnosis::PD ? c.n_pd : c.n_nonpd;
      const int n_female = dx == Diagnosis::PD ? c.n_pd_female : c.n_nonpd_female;
      for (int s = 0; s < n; ++s, ++index) {
        Rng rng(derive_seed(cfg.seed, {3, index}));
        SubjectRecord r;
        char id[64];
        std::snprintf(id, sizeof id, "%s-%03d", c.name.c_str(), ++subject_no);
        r.subject_id = id;
        r.center = c.name;
        r.diagnosis = dx;
        r.gender = s < n_female ? Gender::female : Gender::male;
        r.age_years = round1(std::clamp(rng.normal(c.age_mean, c.age_sd), 40.0, 90.0));
        double z = 0.0;
        if (dx == Diagnosis::PD) {
          z = rng.normal();
          r.updrs3_score = round1(std::max(0.0, c.updrs_mean + c.updrs_sd * (0.8 * z + 0.6 * rng.normal())));
          r.updrs_version = c.updrs_version;
          const double dur = std::round(std::max(1.0, c.duration_mean + c.duration_sd * (0.8 * z + 0.6 * rng.normal())));
          if (r.gender == Gender::female && missing_left > 0)
            --missing_left;
          else
            r.duration_months = dur;
          truth.severity[r.subject_id] = z;
        }
        const double effect = r.gender == Gender::male ? cfg.effect_size_male : cfg.effect_size_female;
        const auto row = static_cast<Eigen::Index>(index);
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kNumFeatures); ++k) {
          double v = truth.baseline[k] + cfg.noise_sd * (c.batch_shift + c.batch_scale * rng.normal());
          if (dx == Diagnosis::PD) v += cfg.noise_sd * effect * direction[k] * (1.0 + kSeverityGain * z);
          out.table.values(row, k) = v;
        }
        out.table.subject_ids.push_back(r.subject_id);
        out.records.push_back(std::move(r));
      }
    }
  }
  validate_records(out.records);
  out.table.validate();
  return out;
}

namespace {

void validate_signal_config(const SignalConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::DegenerateConfig, msg); };
  if (!(cfg.sampling_rate_hz >= 64.0)) fail("sampling rate must be at least 64 Hz");
  if (cfg.n_epochs < 1) fail("need at least one epoch");
  if (!(cfg.rms_uv > 0)) fail("rms must be positive");
  if (!(cfg.noise_fraction >= 0 && cfg.noise_fraction < 1)) fail("noise fraction must be in [0, 1)");
  if (!(cfg.spike_probability >= 0 && cfg.spike_probability <= 1)) fail("spike probability must be in [0, 1]");
}

// |W(nu)|^2 of the spectral window at an offset of nu bins.
double window_gain(const Eigen::VectorXd& w, double nu) {
  const auto n = w.size();
  std::complex<double> acc = 0.0;
  for (Eigen::Index t = 0; t < n; ++t)
    acc += w[t] * std::polar(1.0, -2.0 * std::numbers::pi * nu * static_cast<double>(t) / static_cast<double>(n));
  return std::norm(acc);
}

int sub_band_of_freq(double f) {
  for (int b = 0; b < 5; ++b) {
    constexpr std::array<Band, 5> bands = {Band::delta, Band::slow_theta, Band::fast_theta, Band::alpha, Band::beta};
    if (band_bounds(bands[static_cast<std::size_t>(b)])->contains(f)) return b;
  }
  return -1;
}

}  // namespace

LeakageMatrix leakage_matrix(const SignalConfig& cfg) {
  validate_signal_config(cfg);
  const auto n = static_cast<Eigen::Index>(std::lround(cfg.spectral.segment_seconds * cfg.sampling_rate_hz));
  const double resolution = cfg.sampling_rate_hz / static_cast<double>(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index t = 0; t < n; ++t)
    w[t] = cfg.spectral.window == Window::hann
               ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n))
               : 1.0;
  // Welch power landing in each sub-band from a unit-power source at frequency f.
  const auto spread = [&](double f) {
    Eigen::Matrix<double, 5, 1> col = Eigen::Matrix<double, 5, 1>::Zero();
    for (Eigen::Index k = 0; static_cast<double>(k) * resolution < kTotalHiHz + 1e-9; ++k) {
      const int b = sub_band_of_freq(static_cast<double>(k) * resolution);
      if (b >= 0) col[b] += window_gain(w, f / resolution - static_cast<double>(k));
    }
    return col;
  };
  // Source j is a tone plus noise spread flat over sub-band j on the epoch grid.
  const double df = 1.0 / kEpochSeconds;
  LeakageMatrix M = LeakageMatrix::Zero();
  for (int j = 0; j < 5; ++j) {
    Eigen::Matrix<double, 5, 1> noise = Eigen::Matrix<double, 5, 1>::Zero();
    int bins = 0;
    for (int k = 1; static_cast<double>(k) * df < kTotalHiHz; ++k)
      if (sub_band_of_freq(k * df) == j) noise += spread(k * df), ++bins;
    M.col(j) = (1.0 - cfg.noise_fraction) * spread(kToneFrequencies[static_cast<std::size_t>(j)]) +
               cfg.noise_fraction * noise / bins;
  }
  return M;
}

std::array<double, 5> tone_powers(const SubBandTargets& targets, const LeakageMatrix& M) {
  double sum = 0.0;
  for (double t : targets) {
    if (!(t >= 0) || !std::isfinite(t)) throw Error(ErrorKind::DegenerateConfig, "targets must be nonnegative");
    sum += t;
  }
  if (!(sum > 0)) throw Error(ErrorKind::DegenerateConfig, "targets sum to zero");
  Eigen::Matrix<double, 5, 1> t;
  for (int b = 0; b < 5; ++b) t[b] = targets[static_cast<std::size_t>(b)] / sum;
  const Eigen::Matrix<double, 5, 1> p = M.colPivHouseholderQr().solve(t);
  std::array<double, 5> out{};
  double total = 0.0;
  for (int j = 0; j < 5; ++j) total += out[static_cast<std::size_t>(j)] = std::max(0.0, p[j]);
  if (!(total > 0)) throw Error(ErrorKind::DegenerateConfig, "targets not realisable");
  for (auto& v : out) v /= total;
  return out;
}

std::array<double, 5> tone_powers(const SubBandTargets& targets, const SignalConfig& cfg) {
  return tone_powers(targets, leakage_matrix(cfg));
}

SubBandTargets targets_from_features(const FeatureTable& table, Eigen::Index row, Channel channel) {
  constexpr std::array<Band, 5> bands = {Band::delta, Band::slow_theta, Band::fast_theta, Band::alpha, Band::beta};
  SubBandTargets t{};
  double sum = 0.0;
  for (std::size_t b = 0; b < 5; ++b) {
    const auto col = table.column_of({channel, bands[b]});
    if (!col) throw Error(ErrorKind::MissingFeature, "feature " + FeatureKey{channel, bands[b]}.name() + " not in table");
    sum += t[b] = std::pow(10.0, table.values(row, *col));
  }
  for (auto& v : t) v /= sum;
  return t;
}

EpochSet synthesize_epochs(const std::string& subject_id, const std::array<SubBandTargets, kNumChannels>& targets,
                           const SignalConfig& cfg, std::uint64_t stream_seed) {
  validate_signal_config(cfg);
  const double fs = cfg.sampling_rate_hz;
  const auto n_samples = static_cast<Eigen::Index>(std::lround(kEpochSeconds * fs));
  const double total_power = cfg.rms_uv * cfg.rms_uv;

  EpochSet es;
  es.subject_id = subject_id;
  es.sampling_rate_hz = fs;
  es.channels.assign(all_channels().begin(), all_channels().end());
  es.data.assign(static_cast<std::size_t>(cfg.n_epochs), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kNumChannels), n_samples));

  // Noise spectrum on the epoch's own frequency grid: each sub-band's share
  // spread evenly over its width.
  const double df = fs / static_cast<double>(n_samples);
  std::vector<int> noise_band(static_cast<std::size_t>(n_samples / 2 + 1), -1);
  std::array<int, 5> bins_per_band{};
  for (std::size_t k = 1; k < noise_band.size(); ++k) {
    noise_band[k] = sub_band_of_freq(static_cast<double>(k) * df);
    if (noise_band[k] >= 0) ++bins_per_band[static_cast<std::size_t>(noise_band[k])];
  }
  Eigen::FFT<double> fft;

  const auto leakage = leakage_matrix(cfg);
  Rng rng(stream_seed);
  for (std::size_t ch = 0; ch < kNumChannels; ++ch) {
    const auto p = tone_powers(targets[ch], leakage);
    std::array<double, 5> amp{};
    for (std::size_t j = 0; j < 5; ++j) {
      amp[j] = std::sqrt(2.0 * total_power * (1.0 - cfg.noise_fraction) * p[j]);
    }
    std::vector<double> noise_shape(noise_band.size(), 0.0);
    for (std::size_t k = 0; k < noise_band.size(); ++k)
      if (noise_band[k] >= 0) {
        const auto band = static_cast<std::size_t>(noise_band[k]);
        noise_shape[k] = std::sqrt(p[band] / bins_per_band[band]);
      }
    const double noise_power = total_power * cfg.noise_fraction;
    for (auto& epoch : es.data) {
      auto row = epoch.row(static_cast<Eigen::Index>(ch));
      for (std::size_t j = 0; j < 5; ++j) {
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        const double w = 2.0 * std::numbers::pi * kToneFrequencies[j] / fs;
        for (Eigen::Index t = 0; t < n_samples; ++t) row[t] += amp[j] * std::cos(w * static_cast<double>(t) + phase);
      }
      if (noise_power > 0) {
        Eigen::VectorXcd spectrum = Eigen::VectorXcd::Zero(n_samples);
        for (std::size_t k = 1; k < noise_shape.size(); ++k) {
          if (noise_shape[k] == 0.0) continue;
          const std::complex<double> z(rng.normal() * noise_shape[k], rng.normal() * noise_shape[k]);
          spectrum[static_cast<Eigen::Index>(k)] = z;
          spectrum[n_samples - static_cast<Eigen::Index>(k)] = std::conj(z);
        }
        Eigen::VectorXd noise(n_samples);
        fft.inv(noise, spectrum);
        const double power = noise.squaredNorm() / static_cast<double>(n_samples);
        if (power > 0) row += (noise * std::sqrt(noise_power / power)).transpose();
      }
    }
  }
  if (cfg.spike_probability > 0) {
    for (auto& epoch : es.data) {
      if (rng.uniform() >= cfg.spike_probability) continue;
      const auto ch = static_cast<Eigen::Index>(rng.below(kNumChannels));
      const auto t = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n_samples)));
      epoch(ch, t) += 150.0;
    }
  }
  return es;
}

SynthSignals generate_signals(const SynthConfig& cfg, const SignalConfig& signal) {
  validate_signal_config(signal);
  SynthSignals out;
  out.features = generate_features(cfg);
  const auto& table = out.features.table;
  out.epochs.resize(out.features.records.size());
  parallel_for(out.epochs.size(), [&](std::size_t i) {
    std::array<SubBandTargets, kNumChannels> targets;
    for (auto c : all_channels())
      targets[static_cast<std::size_t>(c)] = targets_from_features(table, static_cast<Eigen::Index>(i), c);
    out.epochs[i] = synthesize_epochs(table.subject_ids[i], targets, signal, derive_seed(signal.seed, {7, i}));
  });
  return out;
}

}  // namespace eegfair
