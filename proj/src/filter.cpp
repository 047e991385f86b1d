#include "eegfair/filter.hpp"

#include "eegfair/error.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace eegfair {

std::vector<Biquad> butterworth(FilterKind kind, int order, double cutoff_hz, double fs) {
  if (order <= 0 || order % 2 != 0) throw Error(ErrorKind::InvalidArgument, "filter order must be positive and even");
  if (!(fs > 0)) throw Error(ErrorKind::InvalidArgument, "sampling rate must be positive");
  if (!(cutoff_hz > 0) || cutoff_hz >= fs / 2)
    throw Error(ErrorKind::CutoffAboveNyquist, "cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, " +
                                                   std::to_string(fs / 2) + ") Hz");
  const double k = std::tan(std::numbers::pi * cutoff_hz / fs);
  const double k2 = k * k;
  std::vector<Biquad> sections;
  for (int p = 0; p < order / 2; ++p) {
    // Conjugate analog pole pair at angle theta; q = -2 Re(pole).
    const double theta = std::numbers::pi * (2.0 * (p + 1) + order - 1) / (2.0 * order);
    const double q = -2.0 * std::cos(theta);
    const double norm = 1.0 / (1.0 + q * k + k2);
    Biquad s{};
    if (kind == FilterKind::lowpass) {
      s.b0 = k2 * norm;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    }
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - q * k + k2) * norm;
    sections.push_back(s);
  }
  return sections;
}

double magnitude_response(const std::vector<Biquad>& sections, double f_hz, double fs) {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs);
  const auto z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const auto& s : sections) h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  return std::abs(h);
}

namespace {

// Filters in place; each section starts in the steady state for a constant
// input equal to x[0].
void sosfilt_steady(const std::vector<Biquad>& sections, Eigen::VectorXd& x) {
  if (x.size() == 0) return;
  double level = x[0];
  for (const auto& s : sections) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y0 = gain * level;
    double z2 = s.b2 * level - s.a2 * y0;
    double z1 = s.b1 * level - s.a1 * y0 + z2;
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      const double in = x[n];
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      x[n] = out;
    }
    level = y0;
  }
}

}  // namespace

Eigen::VectorXd filtfilt(const std::vector<Biquad>& sections, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  if (n < 2) return x;
  const Eigen::Index pad = n - 1;
  Eigen::VectorXd ext(n + 2 * pad);
  for (Eigen::Index i = 0; i < pad; ++i) {
    ext[i] = 2.0 * x[0] - x[pad - i];
    ext[n + pad + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  ext.segment(pad, n) = x;
  sosfilt_steady(sections, ext);
  ext.reverseInPlace();
  sosfilt_steady(sections, ext);
  ext.reverseInPlace();
  return ext.segment(pad, n);
}

namespace {

EpochSet apply_filter(const EpochSet& epochs, FilterKind kind, double cutoff_hz) {
  const auto sections = butterworth(kind, kFilterOrder, cutoff_hz, epochs.sampling_rate_hz);
  EpochSet out = epochs;
  for (auto& m : out.data)
    for (Eigen::Index c = 0; c < m.rows(); ++c) m.row(c) = filtfilt(sections, m.row(c).transpose()).transpose();
  return out;
}

}  // namespace

EpochSet highpass(const EpochSet& epochs, double cutoff_hz) {
  return apply_filter(epochs, FilterKind::highpass, cutoff_hz);
}

EpochSet lowpass(const EpochSet& epochs, double cutoff_hz) {
  return apply_filter(epochs, FilterKind::lowpass, cutoff_hz);
}

RejectionResult reject_epochs(const EpochSet& epochs, double peak_uv_threshold) {
  if (!(peak_uv_threshold > 0)) throw Error(ErrorKind::InvalidArgument, "rejection threshold must be positive");
  RejectionResult result;
  result.kept.subject_id = epochs.subject_id;
  result.kept.sampling_rate_hz = epochs.sampling_rate_hz;
  result.kept.channels = epochs.channels;
  for (std::size_t e = 0; e < epochs.data.size(); ++e) {
    if (epochs.data[e].cwiseAbs().maxCoeff() > peak_uv_threshold)
      result.rejected.push_back(e);
    else
      result.kept.data.push_back(epochs.data[e]);
  }
  if (result.kept.data.empty())
    throw Error(ErrorKind::AllEpochsRejected, "subject " + epochs.subject_id + ": all " +
                                                  std::to_string(epochs.n_epochs()) + " epochs exceed " +
                                                  std::to_string(peak_uv_threshold) + " uV");
  return result;
}

}  // namespace eegfair
