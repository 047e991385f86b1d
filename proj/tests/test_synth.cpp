#include "eegfair/error.hpp"
#include "eegfair/filter.hpp"
#include "eegfair/psd.hpp"
#include "eegfair/synth.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

using namespace eegfair;

namespace {

constexpr std::array<Band, 5> kSubBands = {Band::delta, Band::slow_theta, Band::fast_theta, Band::alpha, Band::beta};

double feature(const Eigen::VectorXd& f, Channel c, Band b) {
  return f[static_cast<Eigen::Index>(FeatureKey{c, b}.canonical_index())];
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an eegfair::Error");
  return ErrorKind::InvalidArgument;
}

SynthConfig small_config(std::uint64_t seed) {
  auto cfg = SynthConfig::reference_cohort();
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("reference cohort demographics") {
  const auto d = generate_features(small_config(1));
  REQUIRE(d.records.size() == 169);
  REQUIRE(d.table.rows() == 169);
  REQUIRE(d.table.cols() == 203);
  std::map<std::string, std::array<int, 4>> count;  // PD, nonPD, PD female, nonPD female
  int missing_duration = 0;
  for (const auto& r : d.records) {
    auto& c = count[r.center];
    c[r.is_pd() ? 0 : 1]++;
    if (r.gender == Gender::female) c[r.is_pd() ? 2 : 3]++;
    if (r.is_pd()) {
      CHECK(r.updrs3_score.has_value());
      if (!r.duration_months) {
        ++missing_duration;
        CHECK(r.center == "Turku");
        CHECK(r.gender == Gender::female);
      }
    } else {
      CHECK_FALSE(r.updrs3_score.has_value());
    }
  }
  CHECK(count["IowaCity"] == std::array<int, 4>{14, 14, 8, 8});
  CHECK(count["Medellin"] == std::array<int, 4>{36, 36, 12, 12});
  CHECK(count["SanDiego"] == std::array<int, 4>{15, 16, 8, 9});
  CHECK(count["Turku"] == std::array<int, 4>{19, 19, 11, 12});
  CHECK(missing_duration == 2);
  CHECK(d.truth.informative_keys.size() == 20);
  CHECK(d.truth.directions.size() == 20);
  for (int s : d.truth.directions) CHECK(std::abs(s) == 1);
  CHECK_NOTHROW(validate_records(d.records));
}

TEST_CASE("feature generation is deterministic per seed") {
  const auto a = generate_features(small_config(3));
  const auto b = generate_features(small_config(3));
  CHECK((a.table.values.array() == b.table.values.array()).all());
  CHECK(a.truth.informative_keys == b.truth.informative_keys);
  const auto c = generate_features(small_config(4));
  CHECK((a.table.values - c.table.values).cwiseAbs().maxCoeff() > 0);
}

TEST_CASE("features scatter around the ground-truth expectation") {
  auto cfg = small_config(5);
  const auto d = generate_features(cfg);
  double sum = 0, sum2 = 0, n = 0;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    const auto ci = std::find(d.truth.centers.begin(), d.truth.centers.end(), r.center) - d.truth.centers.begin();
    const double sd = cfg.noise_sd * d.truth.batch_scale[static_cast<std::size_t>(ci)];
    for (Eigen::Index j = 0; j < 203; ++j) {
      const double z = (d.table.values(static_cast<Eigen::Index>(i), j) -
                        d.truth.expected_value(r, d.table.keys[static_cast<std::size_t>(j)])) / sd;
      sum += z;
      sum2 += z * z;
      n += 1;
    }
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.02);
  // Severity adds a little spread on the informative PD keys.
  CHECK(std::sqrt(sum2 / n - mean * mean) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("PD shift follows the gender effect sizes") {
  auto cfg = small_config(6);
  const auto d = generate_features(cfg);
  const auto& key = d.truth.informative_keys[0];
  const double dir = d.truth.directions[0];
  auto r = testutil::record("x", d.truth.centers[0], Diagnosis::nonPD, Gender::male);
  const double base = d.truth.expected_value(r, key);
  r.diagnosis = Diagnosis::PD;
  // A subject without a severity entry sits at z = 0.
  CHECK(d.truth.expected_value(r, key) - base == doctest::Approx(dir * cfg.noise_sd * 2.0));
  r.gender = Gender::female;
  CHECK(d.truth.expected_value(r, key) - base == doctest::Approx(dir * cfg.noise_sd * 0.4));
}

TEST_CASE("synth config validation") {
  auto cfg = small_config(1);
  cfg.centers.clear();
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::DegenerateConfig);
  cfg = small_config(1);
  cfg.centers[0].n_pd_female = 99;
  CHECK(kind_of([&] { generate_features(cfg); }) == ErrorKind::DegenerateConfig);
  cfg = small_config(1);
  cfg.noise_sd = 0;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::DegenerateConfig);
  cfg = small_config(1);
  for (auto& c : cfg.centers) c.n_pd_female = c.n_pd, c.n_nonpd_female = c.n_nonpd, c.n_missing_duration_female = 0;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::DegenerateConfig);
}

TEST_CASE("tone powers invert the leakage matrix") {
  SignalConfig sc;
  const auto M = leakage_matrix(sc);
  // Each tone lands mostly in its own sub-band.
  for (int j = 0; j < 5; ++j) CHECK(M(j, j) > 0.5 * M.col(j).sum());
  CHECK(M.minCoeff() >= 0);
  const SubBandTargets t = {0.3, 0.08, 0.12, 0.3, 0.2};
  const auto p = tone_powers(t, M);
  Eigen::Matrix<double, 5, 1> pv, tv;
  for (int i = 0; i < 5; ++i) pv[i] = p[static_cast<std::size_t>(i)], tv[i] = t[static_cast<std::size_t>(i)];
  const Eigen::Matrix<double, 5, 1> back = M * pv;
  CHECK((back / back.sum() - tv).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("targets from a feature row") {
  const auto d = generate_features(small_config(2));
  const auto t = targets_from_features(d.table, 0, Channel::Cz);
  double s = 0;
  for (std::size_t b = 0; b < 5; ++b) {
    s += t[b];
    CHECK(t[b] > 0);
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  const double raw_alpha = std::pow(10.0, d.table.values(0, static_cast<Eigen::Index>(FeatureKey{Channel::Cz, Band::alpha}.canonical_index())));
  const double raw_delta = std::pow(10.0, d.table.values(0, static_cast<Eigen::Index>(FeatureKey{Channel::Cz, Band::delta}.canonical_index())));
  CHECK(t[3] / t[0] == doctest::Approx(raw_alpha / raw_delta).epsilon(1e-12));
}

TEST_CASE("signal round trip recovers an alpha target") {
  std::array<SubBandTargets, kNumChannels> targets;
  targets.fill(SubBandTargets{0.15, 0.05, 0.05, 0.55, 0.20});
  const std::size_t cz = static_cast<std::size_t>(Channel::Cz);
  targets[cz] = {0.1, 0.05, 0.05, 0.6, 0.2};
  SignalConfig sc;
  const auto e = synthesize_epochs("rt", targets, sc, 42);
  CHECK_NOTHROW(e.validate());
  CHECK(e.n_epochs() == 10);
  const auto f = extract_features(e, sc.spectral);
  const double alpha = std::pow(10.0, feature(f, Channel::Cz, Band::alpha));
  CHECK(alpha >= 0.55);
  CHECK(alpha <= 0.65);
  for (auto c : all_channels())
    for (std::size_t b = 0; b < 5; ++b)
      CHECK(std::abs(std::pow(10.0, feature(f, c, kSubBands[b])) - targets[static_cast<std::size_t>(c)][b]) < 0.02);
}

TEST_CASE("equal band targets come back equal") {
  std::array<SubBandTargets, kNumChannels> targets;
  targets.fill(SubBandTargets{0.25, 0.125, 0.125, 0.25, 0.25});
  const auto f = extract_features(synthesize_epochs("eq", targets, SignalConfig{}, 7));
  for (auto c : all_channels()) {
    std::array<double, 4> v{};
    std::size_t i = 0;
    for (auto b : {Band::delta, Band::theta, Band::alpha, Band::beta}) v[i++] = std::pow(10.0, feature(f, c, b));
    CHECK(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) <= 0.03);
  }
}

TEST_CASE("signals are bit-identical for a seed") {
  std::array<SubBandTargets, kNumChannels> targets;
  targets.fill(SubBandTargets{0.3, 0.08, 0.12, 0.3, 0.2});
  SignalConfig sc;
  sc.n_epochs = 2;
  const auto a = synthesize_epochs("s", targets, sc, 9);
  const auto b = synthesize_epochs("s", targets, sc, 9);
  const auto c = synthesize_epochs("s", targets, sc, 10);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK((a.data[k].array() == b.data[k].array()).all());
    CHECK((a.data[k] - c.data[k]).cwiseAbs().maxCoeff() > 0);
  }
  const double rms = std::sqrt(a.data[0].squaredNorm() / static_cast<double>(a.data[0].size()));
  CHECK(rms == doctest::Approx(sc.rms_uv).epsilon(0.1));
}

TEST_CASE("spikes trip the rejection threshold") {
  std::array<SubBandTargets, kNumChannels> targets;
  targets.fill(SubBandTargets{0.3, 0.08, 0.12, 0.3, 0.2});
  SignalConfig sc;
  sc.n_epochs = 4;
  sc.spike_probability = 1.0;
  const auto e = synthesize_epochs("sp", targets, sc, 1);
  CHECK_THROWS_AS(reject_epochs(e, 100.0), Error);
  sc.spike_probability = 0.0;
  CHECK(reject_epochs(synthesize_epochs("sp", targets, sc, 1), 100.0).rejected.empty());
}

TEST_CASE("signal config validation") {
  std::array<SubBandTargets, kNumChannels> targets;
  targets.fill(SubBandTargets{0.3, 0.08, 0.12, 0.3, 0.2});
  SignalConfig sc;
  sc.sampling_rate_hz = 32;
  CHECK(kind_of([&] { synthesize_epochs("x", targets, sc, 1); }) == ErrorKind::DegenerateConfig);
  sc = {};
  sc.n_epochs = 0;
  CHECK(kind_of([&] { synthesize_epochs("x", targets, sc, 1); }) == ErrorKind::DegenerateConfig);
  sc = {};
  targets[3] = {0, 0, 0, 0, 0};
  CHECK(kind_of([&] { synthesize_epochs("x", targets, sc, 1); }) == ErrorKind::DegenerateConfig);
}

TEST_CASE("signal cohort matches the feature cohort") {
  auto cfg = small_config(8);
  cfg.centers.resize(2);
  for (auto& c : cfg.centers) c.n_pd = c.n_nonpd = 3, c.n_pd_female = c.n_nonpd_female = 1, c.n_missing_duration_female = 0;
  SignalConfig sc;
  sc.n_epochs = 2;
  sc.seed = 3;
  const auto s = generate_signals(cfg, sc);
  REQUIRE(s.epochs.size() == s.features.records.size());
  for (std::size_t i = 0; i < s.epochs.size(); ++i) CHECK(s.epochs[i].subject_id == s.features.records[i].subject_id);
  const auto again = generate_signals(cfg, sc);
  CHECK((again.epochs[5].data[1].array() == s.epochs[5].data[1].array()).all());
}
