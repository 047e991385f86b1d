#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eegfair {

// The 29 scalp channels shared by every recording site, in canonical (ASCII
// sorted) order. The enumerator value is the canonical index.
enum class Channel : int {
  AF3, AF4, C3, C4, CP1, CP2, CP5, CP6, Cz, F3, F4, F7, F8, FC1, FC2,
  FC5, FC6, Fp1, Fp2, Fz, O1, O2, Oz, P3, P4, P7, P8, T7, T8,
};

inline constexpr std::size_t kNumChannels = 29;

// Feature bands. The first six are spectral intervals; alpha_theta_ratio is a
// derived pseudo-band with no frequency bounds.
enum class Band : int { delta, theta, slow_theta, fast_theta, alpha, beta, alpha_theta_ratio };

inline constexpr std::size_t kNumBands = 7;
inline constexpr std::size_t kNumFeatures = kNumChannels * kNumBands;

// Relative power is normalised by the power in [kTotalLoHz, kTotalHiHz).
inline constexpr double kTotalLoHz = 1.0;
inline constexpr double kTotalHiHz = 30.0;

struct BandBounds {
  double lo_hz;
  double hi_hz;
  bool contains(double f) const noexcept { return lo_hz <= f && f < hi_hz; }
};

const std::array<Channel, kNumChannels>& all_channels() noexcept;
const std::array<Band, kNumBands>& all_bands() noexcept;

std::string_view channel_label(Channel c) noexcept;
std::optional<Channel> parse_channel(std::string_view label) noexcept;

std::string_view band_token(Band b) noexcept;
std::optional<Band> parse_band(std::string_view token) noexcept;

// Half-open bounds; empty for the ratio pseudo-band.
std::optional<BandBounds> band_bounds(Band b) noexcept;

// The bands whose relative powers are computed directly from a PSD.
inline constexpr std::array<Band, 6> kBoundedBands = {Band::delta,      Band::theta, Band::slow_theta,
                                                      Band::fast_theta, Band::alpha, Band::beta};

struct FeatureKey {
  Channel channel;
  Band band;

  // Channel-major, band-minor position in the full 203-key layout.
  std::size_t canonical_index() const noexcept {
    return static_cast<std::size_t>(channel) * kNumBands + static_cast<std::size_t>(band);
  }

  std::string name() const;  // "<CHANNEL>_<band>"

  friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
  friend bool operator<(const FeatureKey& a, const FeatureKey& b) noexcept {
    return a.canonical_index() < b.canonical_index();
  }
};

FeatureKey feature_key_from_index(std::size_t canonical_index);
std::vector<FeatureKey> all_feature_keys();

// Throws UnknownChannel / UnknownBand.
FeatureKey parse_feature_key(std::string_view name);

enum class Region { frontal, central, temporal, parietal, occipital };

// Scalp region from the label's letter prefix: Fp/AF/F/FC frontal, CP/P
// parietal, C central, T temporal, O occipital.
Region channel_region(Channel c) noexcept;
bool is_midline(Channel c) noexcept;

}  // namespace eegfair
