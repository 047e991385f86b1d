#include "eegfair/error.hpp"
#include "eegfair/filter.hpp"
#include "eegfair/psd.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace eegfair;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd sine(double f, double fs, Eigen::Index n, double amp = 1.0, double phase = 0.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = amp * std::sin(2 * kPi * f * static_cast<double>(i) / fs + phase);
  return x;
}

double rms(const Eigen::VectorXd& x) { return std::sqrt(x.squaredNorm() / static_cast<double>(x.size())); }

// Closed-form gain of a bilinear-transformed Butterworth filter.
double butterworth_gain(FilterKind kind, int order, double fc, double f, double fs) {
  const double r = std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
  const double x = kind == FilterKind::lowpass ? r : 1.0 / r;
  return 1.0 / std::sqrt(1.0 + std::pow(x, 2 * order));
}

EpochSet all_channel_epochs(const std::vector<Eigen::VectorXd>& per_epoch, double fs) {
  EpochSet e;
  e.subject_id = "t";
  e.sampling_rate_hz = fs;
  e.channels.assign(all_channels().begin(), all_channels().end());
  for (const auto& x : per_epoch) {
    Eigen::MatrixXd m(29, x.size());
    for (int c = 0; c < 29; ++c) m.row(c) = x.transpose();
    e.data.push_back(m);
  }
  return e;
}

// Tones at integer frequencies on a 1 Hz grid: with a Hann window each tone
// leaks only into its two neighbouring bins, so band powers are exact.
Eigen::VectorXd tone_mix(double p_delta, double p_theta, double p_alpha, double p_beta) {
  const double fs = 256;
  const Eigen::Index n = 1280;
  return sine(2, fs, n, std::sqrt(2 * p_delta)) + sine(6, fs, n, std::sqrt(2 * p_theta), 0.3) +
         sine(10, fs, n, std::sqrt(2 * p_alpha), 1.1) + sine(20, fs, n, std::sqrt(2 * p_beta), 2.0);
}

}  // namespace

TEST_CASE("butterworth magnitude matches the closed form") {
  for (auto kind : {FilterKind::lowpass, FilterKind::highpass})
    for (double fs : {128.0, 256.0, 500.0}) {
      const double fc = kind == FilterKind::lowpass ? 30.0 : 1.0;
      const auto sos = butterworth(kind, 4, fc, fs);
      for (double f : {0.5, 1.0, 3.0, 10.0, 30.0, 45.0})
        CHECK(magnitude_response(sos, f, fs) == doctest::Approx(butterworth_gain(kind, 4, fc, f, fs)).epsilon(1e-9));
    }
}

TEST_CASE("butterworth cutoff validation") {
  CHECK_THROWS_AS(butterworth(FilterKind::lowpass, 4, 300.0, 256.0), Error);
  try {
    butterworth(FilterKind::highpass, 4, 128.0, 256.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CutoffAboveNyquist);
  }
}

TEST_CASE("highpass removes DC and keeps 10 Hz") {
  const double fs = 256;
  const auto sos = butterworth(FilterKind::highpass, 4, 1.0, fs);
  const Eigen::VectorXd dc = Eigen::VectorXd::Constant(1280, 37.0);
  CHECK(filtfilt(sos, dc).cwiseAbs().mean() < 1e-6 * 37.0);
  const auto x = sine(10, fs, 1280);
  const Eigen::VectorXd y = filtfilt(sos, x);
  const auto mid = y.segment(256, 768), ref = x.segment(256, 768);
  CHECK(rms(mid) / rms(ref) == doctest::Approx(1.0).epsilon(0.05));
  // Forward-backward squares the single-pass gain.
  const double g = magnitude_response(sos, 10, fs);
  CHECK(rms(mid) / rms(ref) == doctest::Approx(g * g).epsilon(1e-3));
}

TEST_CASE("lowpass attenuates 50 Hz and keeps 5 Hz") {
  const double fs = 256;
  const auto sos = butterworth(FilterKind::lowpass, 4, 30.0, fs);
  const auto hi = sine(50, fs, 1280);
  CHECK(rms(filtfilt(sos, hi)) < 0.1 * rms(hi));
  const auto lo = sine(5, fs, 1280);
  const Eigen::VectorXd y = filtfilt(sos, lo);
  CHECK(rms(Eigen::VectorXd(y.segment(256, 768))) / rms(Eigen::VectorXd(lo.segment(256, 768))) ==
        doctest::Approx(1.0).epsilon(0.05));
  const Eigen::VectorXd dc = Eigen::VectorXd::Constant(500, 3.0);
  CHECK((filtfilt(sos, dc).array() - 3.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("epoch rejection") {
  Rng rng(2);
  EpochSet e;
  e.subject_id = "r";
  e.sampling_rate_hz = 128;
  e.channels = {Channel::Cz, Channel::Fz};
  for (int k = 0; k < 4; ++k) e.data.push_back((testutil::random_matrix(rng, 2, 640).array().tanh() * 50.0).matrix());
  const auto same = reject_epochs(e, 100);
  CHECK(same.rejected.empty());
  CHECK(same.kept.n_epochs() == 4);
  e.data[2](1, 100) = 500;
  const auto r = reject_epochs(e, 100);
  CHECK(r.rejected == std::vector<std::size_t>{2});
  CHECK(r.kept.n_epochs() == 3);
  try {
    reject_epochs(e, 0.001);
    FAIL("no error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::AllEpochsRejected);
  }
}

TEST_CASE("welch PSD integrates to the variance of white noise") {
  double mean_power = 0;
  for (int s = 0; s < 100; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    Eigen::VectorXd x(640);
    for (auto& v : x) v = rng.normal();
    const auto psd = welch_psd(x, 128.0);
    mean_power += psd.power.sum() * psd.resolution_hz / 100.0;
  }
  CHECK(mean_power >= 0.9);
  CHECK(mean_power <= 1.1);
}

TEST_CASE("welch PSD peak and zero input") {
  const auto psd = welch_psd(sine(10, 256, 1280), 256);
  Eigen::Index arg;
  psd.power.maxCoeff(&arg);
  CHECK(std::abs(psd.freqs_hz[arg] - 10.0) <= psd.resolution_hz);
  CHECK(psd.resolution_hz == doctest::Approx(1.0));

  const auto zero = welch_psd(Eigen::VectorXd::Zero(1280), 256);
  CHECK(zero.power.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(band_fractions(zero), Error);

  SpectralConfig long_seg;
  long_seg.segment_seconds = 6;
  try {
    long_seg.validate();
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SegmentTooLong);
  }
}

TEST_CASE("flat PSD gives bandwidth ratios") {
  PsdEstimate psd;
  psd.resolution_hz = 0.25;
  psd.freqs_hz = Eigen::VectorXd::LinSpaced(257, 0, 64);
  psd.power = Eigen::VectorXd::Ones(257);
  CHECK(relative_band_power(psd, Band::alpha) == doctest::Approx(5.0 / 29.0).epsilon(1e-12));
  CHECK(relative_band_power(psd, Band::beta) == doctest::Approx(17.0 / 29.0).epsilon(1e-12));
  CHECK(relative_band_power(psd, Band::slow_theta) == doctest::Approx(1.5 / 29.0).epsilon(1e-12));
  CHECK_THROWS_AS(relative_band_power(psd, Band::alpha_theta_ratio), Error);
}

TEST_CASE("10 Hz sinusoid is almost all alpha") {
  const auto fr = band_fractions(welch_psd(sine(10, 256, 1280), 256));
  CHECK(fr[4] >= 0.95);
}

TEST_CASE("band fractions of integer tones are exact") {
  const auto fr = band_fractions(welch_psd(tone_mix(0.1, 0.2, 0.3, 0.4), 256));
  CHECK(fr[0] == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(fr[1] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(fr[4] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(fr[5] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(fr[2] + fr[3] == doctest::Approx(fr[1]).epsilon(1e-12));
}

TEST_CASE("features average fractions across epochs before the log") {
  const auto e = all_channel_epochs({tone_mix(0.1, 0.1, 0.2, 0.6), tone_mix(0.1, 0.1, 0.4, 0.4)}, 256);
  const auto f = extract_features(e);
  REQUIRE(f.size() == 203);
  for (auto c : all_channels()) {
    const auto at = [&](Band b) { return f[static_cast<Eigen::Index>(FeatureKey{c, b}.canonical_index())]; };
    CHECK(at(Band::alpha) == doctest::Approx(std::log10(0.3)).epsilon(1e-9));
    CHECK(at(Band::beta) == doctest::Approx(std::log10(0.5)).epsilon(1e-9));
    CHECK(at(Band::theta) == doctest::Approx(std::log10(0.1)).epsilon(1e-9));
    CHECK(at(Band::alpha_theta_ratio) == doctest::Approx(std::log10(0.3) - std::log10(0.1)).epsilon(1e-9));
  }
}

TEST_CASE("single epoch features are the log of its fractions") {
  Rng rng(8);
  Eigen::VectorXd x(1280);
  for (auto& v : x) v = rng.normal();
  const auto f = extract_features(all_channel_epochs({x}, 256));
  const auto fr = band_fractions(welch_psd(x, 256));
  for (std::size_t b = 0; b < kBoundedBands.size(); ++b)
    CHECK(f[static_cast<Eigen::Index>(FeatureKey{Channel::Cz, kBoundedBands[b]}.canonical_index())] ==
          doctest::Approx(std::log10(fr[b])).epsilon(1e-12));
}

TEST_CASE("alpha dominates theta for a 10 Hz input") {
  const auto f = extract_features(all_channel_epochs({sine(10, 256, 1280) + 0.1 * sine(6, 256, 1280)}, 256));
  for (auto c : all_channels())
    CHECK(f[static_cast<Eigen::Index>(FeatureKey{c, Band::alpha}.canonical_index())] >
          f[static_cast<Eigen::Index>(FeatureKey{c, Band::theta}.canonical_index())]);
}

TEST_CASE("missing channel is named") {
  auto e = all_channel_epochs({tone_mix(0.1, 0.1, 0.2, 0.6)}, 256);
  e.channels.erase(e.channels.begin() + 8);  // Cz
  for (auto& m : e.data) m = Eigen::MatrixXd(m.topRows(28));
  try {
    extract_features(e);
    FAIL("no error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::MissingChannel);
    CHECK(std::string(err.what()).find("Cz") != std::string::npos);
  }
}
