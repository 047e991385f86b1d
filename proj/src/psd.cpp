#include "eegfair/psd.hpp"

#include "eegfair/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace eegfair {

void SpectralConfig::validate() const {
  if (!(segment_seconds > 0)) throw Error(ErrorKind::InvalidArgument, "segment_seconds must be positive");
  if (segment_seconds > kEpochSeconds)
    throw Error(ErrorKind::SegmentTooLong, "segment_seconds exceeds the 5 s epoch length");
  if (!(overlap_fraction >= 0 && overlap_fraction < 1))
    throw Error(ErrorKind::InvalidArgument, "overlap_fraction must lie in [0, 1)");
}

PsdEstimate welch_psd(const Eigen::Ref<const Eigen::VectorXd>& signal, double fs, const SpectralConfig& cfg) {
  if (!(fs > 0)) throw Error(ErrorKind::InvalidArgument, "sampling rate must be positive");
  if (!(cfg.segment_seconds > 0) || !(cfg.overlap_fraction >= 0 && cfg.overlap_fraction < 1))
    throw Error(ErrorKind::InvalidArgument, "invalid spectral configuration");
  const auto seg = static_cast<Eigen::Index>(std::lround(cfg.segment_seconds * fs));
  if (seg < 2 || seg > signal.size())
    throw Error(ErrorKind::SegmentTooLong, "segment of " + std::to_string(seg) + " samples vs signal of " +
                                               std::to_string(signal.size()));
  const auto step = std::max<Eigen::Index>(1, seg - static_cast<Eigen::Index>(std::lround(cfg.overlap_fraction * seg)));
  const Eigen::Index n_segments = (signal.size() - seg) / step + 1;

  Eigen::VectorXd window(seg);
  for (Eigen::Index i = 0; i < seg; ++i)
    window[i] = cfg.window == Window::hann ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / seg) : 1.0;
  const double scale = 1.0 / (fs * window.squaredNorm());

  const Eigen::Index n_bins = seg / 2 + 1;
  PsdEstimate out;
  out.resolution_hz = fs / static_cast<double>(seg);
  out.freqs_hz = Eigen::VectorXd::LinSpaced(n_bins, 0, static_cast<double>(n_bins - 1)) * out.resolution_hz;
  out.power = Eigen::VectorXd::Zero(n_bins);

  Eigen::FFT<double> fft;
  std::vector<double> buf(static_cast<std::size_t>(seg));
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index s = 0; s < n_segments; ++s) {
    auto piece = signal.segment(s * step, seg);
    const double mean = cfg.detrend == Detrend::mean ? piece.mean() : 0.0;
    for (Eigen::Index i = 0; i < seg; ++i) buf[static_cast<std::size_t>(i)] = (piece[i] - mean) * window[i];
    fft.fwd(spectrum, buf);
    for (Eigen::Index k = 0; k < n_bins; ++k) out.power[k] += std::norm(spectrum[static_cast<std::size_t>(k)]);
  }
  out.power *= scale / static_cast<double>(n_segments);
  // One-sided: fold negative frequencies into all bins except DC and Nyquist.
  const Eigen::Index last_doubled = seg % 2 == 0 ? n_bins - 2 : n_bins - 1;
  for (Eigen::Index k = 1; k <= last_doubled; ++k) out.power[k] *= 2.0;
  return out;
}

std::array<double, kBoundedBands.size()> band_fractions(const PsdEstimate& psd) {
  const Eigen::Index n = psd.freqs_hz.size();
  if (n == 0 || psd.freqs_hz[n - 1] + psd.resolution_hz < kTotalHiHz)
    throw Error(ErrorKind::InvalidArgument, "PSD grid does not cover [1, 30) Hz");
  std::array<double, kBoundedBands.size()> sums{};
  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = psd.freqs_hz[k];
    if (!(f >= kTotalLoHz && f < kTotalHiHz)) continue;
    total += psd.power[k];
    for (std::size_t b = 0; b < kBoundedBands.size(); ++b)
      if (band_bounds(kBoundedBands[b])->contains(f)) sums[b] += psd.power[k];
  }
  if (!(total > 0)) throw Error(ErrorKind::ZeroTotalPower, "no power in [1, 30) Hz");
  for (auto& s : sums) s /= total;
  return sums;
}

double relative_band_power(const PsdEstimate& psd, Band band) {
  if (!band_bounds(band)) throw Error(ErrorKind::InvalidArgument, "ratio band has no frequency bounds");
  const auto fractions = band_fractions(psd);
  for (std::size_t b = 0; b < kBoundedBands.size(); ++b)
    if (kBoundedBands[b] == band) return fractions[b];
  return 0.0;
}

Eigen::VectorXd extract_features(const EpochSet& epochs, const SpectralConfig& cfg) {
  cfg.validate();
  if (epochs.data.empty()) throw Error(ErrorKind::InvalidArgument, "subject " + epochs.subject_id + ": no epochs");
  Eigen::VectorXd features(static_cast<Eigen::Index>(kNumFeatures));
  const auto n_epochs = static_cast<double>(epochs.n_epochs());
  constexpr auto kTheta = 1, kAlpha = 4;  // positions in kBoundedBands

  for (auto channel : all_channels()) {
    const auto row = epochs.row_of(channel);
    if (!row)
      throw Error(ErrorKind::MissingChannel,
                  "subject " + epochs.subject_id + ": channel " + std::string(channel_label(channel)) + " absent");
    std::array<double, kBoundedBands.size()> mean{};
    for (const auto& epoch : epochs.data) {
      const Eigen::VectorXd x = epoch.row(*row).transpose();
      std::array<double, kBoundedBands.size()> fr{};
      try {
        fr = band_fractions(welch_psd(x, epochs.sampling_rate_hz, cfg));
      } catch (const Error& e) {
        throw Error(e.kind(), "subject " + epochs.subject_id + ", channel " + std::string(channel_label(channel)) +
                                  ": " + e.message());
      }
      for (std::size_t b = 0; b < fr.size(); ++b) mean[b] += fr[b];
    }
    const auto base = static_cast<Eigen::Index>(static_cast<std::size_t>(channel) * kNumBands);
    for (std::size_t b = 0; b < kBoundedBands.size(); ++b) {
      mean[b] /= n_epochs;
      features[base + static_cast<Eigen::Index>(kBoundedBands[b])] = std::log10(mean[b]);
    }
    features[base + static_cast<Eigen::Index>(Band::alpha_theta_ratio)] =
        std::log10(mean[kAlpha]) - std::log10(mean[kTheta]);
    for (Eigen::Index j = base; j < base + static_cast<Eigen::Index>(kNumBands); ++j)
      if (!std::isfinite(features[j]))
        throw Error(ErrorKind::NonFiniteValue, "subject " + epochs.subject_id + ": feature " +
                                                   feature_key_from_index(static_cast<std::size_t>(j)).name() +
                                                   " has zero band power");
  }
  return features;
}

}  // namespace eegfair
