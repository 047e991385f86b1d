#pragma once

#include "eegfair/channels.hpp"
#include "eegfair/records.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

namespace eegfair {

enum class Window { hann, boxcar };
enum class Detrend { none, mean };

struct SpectralConfig {
  Window window = Window::hann;
  double segment_seconds = 1.0;
  double overlap_fraction = 0.5;
  Detrend detrend = Detrend::mean;

  // Throws InvalidArgument.
  void validate() const;
};

struct PsdEstimate {
  Eigen::VectorXd freqs_hz;  // ascending, step resolution_hz
  Eigen::VectorXd power;     // one-sided density, uV^2/Hz
  double resolution_hz = 0.0;
};

// Welch estimate: windowed segments of cfg.segment_seconds with the given
// overlap, averaged periodograms, one-sided density scaling so that
// sum(power) * resolution equals the signal variance. Throws SegmentTooLong.
PsdEstimate welch_psd(const Eigen::Ref<const Eigen::VectorXd>& signal, double fs, const SpectralConfig& cfg = {});

// Fractions of [1, 30) Hz power in each bounded band, in kBoundedBands order.
// A bin belongs to a band iff lo <= f < hi. Throws ZeroTotalPower, and
// InvalidArgument if the grid does not reach 30 Hz.
std::array<double, kBoundedBands.size()> band_fractions(const PsdEstimate& psd);

// Single band; InvalidArgument for the ratio pseudo-band.
double relative_band_power(const PsdEstimate& psd, Band band);

// 203 features for one subject in canonical key order: per channel, each
// bounded band's relative power averaged over epochs then log10; the ratio
// feature is log10(mean alpha) - log10(mean theta). Throws MissingChannel,
// ZeroTotalPower, NonFiniteValue, InvalidArgument (no epochs).
Eigen::VectorXd extract_features(const EpochSet& epochs, const SpectralConfig& cfg = {});

}  // namespace eegfair
