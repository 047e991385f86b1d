#pragma once

#include "eegfair/records.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace eegfair {

// One biquad in direct form II transposed, a0 normalised to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

enum class FilterKind { lowpass, highpass };

// Butterworth design as cascaded biquads via the bilinear transform with
// frequency prewarping. order must be even. Throws CutoffAboveNyquist when the
// cutoff is not inside (0, fs/2).
std::vector<Biquad> butterworth(FilterKind kind, int order, double cutoff_hz, double fs);

// Magnitude response of the cascade at frequency f (single pass).
double magnitude_response(const std::vector<Biquad>& sections, double f_hz, double fs);

// Zero-phase forward-backward filtering of one signal. The signal is extended
// by odd reflection and each section starts from its steady state for the
// first sample, so constants pass through a lowpass unchanged and are removed
// exactly by a highpass.
Eigen::VectorXd filtfilt(const std::vector<Biquad>& sections, const Eigen::Ref<const Eigen::VectorXd>& x);

inline constexpr int kFilterOrder = 4;

EpochSet highpass(const EpochSet& epochs, double cutoff_hz = 1.0);
EpochSet lowpass(const EpochSet& epochs, double cutoff_hz = 30.0);

struct RejectionResult {
  EpochSet kept;
  std::vector<std::size_t> rejected;
};

// Drops epochs whose absolute peak on any channel exceeds threshold_uv.
// Throws AllEpochsRejected, InvalidArgument for threshold <= 0.
RejectionResult reject_epochs(const EpochSet& epochs, double peak_uv_threshold = 100.0);

}  // namespace eegfair
