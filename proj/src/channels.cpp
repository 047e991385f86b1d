#include "eegfair/channels.hpp"

#include "eegfair/error.hpp"

#include <algorithm>
#include <cctype>

namespace eegfair {

namespace {

constexpr std::array<std::string_view, kNumChannels> kChannelLabels = {
    "AF3", "AF4", "C3",  "C4",  "CP1", "CP2", "CP5", "CP6", "Cz",  "F3",
    "F4",  "F7",  "F8",  "FC1", "FC2", "FC5", "FC6", "Fp1", "Fp2", "Fz",
    "O1",  "O2",  "Oz",  "P3",  "P4",  "P7",  "P8",  "T7",  "T8",
};

constexpr std::array<std::string_view, kNumBands> kBandTokens = {
    "delta", "theta", "slow_theta", "fast_theta", "alpha", "beta", "alpha_theta_ratio",
};

}  // namespace

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::DuplicateSubject: return "DuplicateSubject";
    case ErrorKind::InvalidEnum: return "InvalidEnum";
    case ErrorKind::UnknownChannel: return "UnknownChannel";
    case ErrorKind::UnknownBand: return "UnknownBand";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::MissingChannel: return "MissingChannel";
    case ErrorKind::CutoffAboveNyquist: return "CutoffAboveNyquist";
    case ErrorKind::AllEpochsRejected: return "AllEpochsRejected";
    case ErrorKind::SegmentTooLong: return "SegmentTooLong";
    case ErrorKind::ZeroTotalPower: return "ZeroTotalPower";
    case ErrorKind::SingleBatch: return "SingleBatch";
    case ErrorKind::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorKind::DegenerateBatch: return "DegenerateBatch";
    case ErrorKind::UnknownBatch: return "UnknownBatch";
    case ErrorKind::EmptyStratum: return "EmptyStratum";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::KOutOfRange: return "KOutOfRange";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MissingFeature: return "MissingFeature";
    case ErrorKind::TooFewSubjects: return "TooFewSubjects";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyCell: return "EmptyCell";
    case ErrorKind::NegativeScore: return "NegativeScore";
    case ErrorKind::GroupTooSmall: return "GroupTooSmall";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::DegenerateConfig: return "DegenerateConfig";
  }
  return "Unknown";
}

const std::array<Channel, kNumChannels>& all_channels() noexcept {
  static const auto channels = [] {
    std::array<Channel, kNumChannels> out{};
    for (std::size_t i = 0; i < kNumChannels; ++i) out[i] = static_cast<Channel>(i);
    return out;
  }();
  return channels;
}

const std::array<Band, kNumBands>& all_bands() noexcept {
  static const auto bands = [] {
    std::array<Band, kNumBands> out{};
    for (std::size_t i = 0; i < kNumBands; ++i) out[i] = static_cast<Band>(i);
    return out;
  }();
  return bands;
}

std::string_view channel_label(Channel c) noexcept { return kChannelLabels[static_cast<std::size_t>(c)]; }

std::optional<Channel> parse_channel(std::string_view label) noexcept {
  const auto it = std::find(kChannelLabels.begin(), kChannelLabels.end(), label);
  if (it == kChannelLabels.end()) return std::nullopt;
  return static_cast<Channel>(it - kChannelLabels.begin());
}

std::string_view band_token(Band b) noexcept { return kBandTokens[static_cast<std::size_t>(b)]; }

std::optional<Band> parse_band(std::string_view token) noexcept {
  const auto it = std::find(kBandTokens.begin(), kBandTokens.end(), token);
  if (it == kBandTokens.end()) return std::nullopt;
  return static_cast<Band>(it - kBandTokens.begin());
}

std::optional<BandBounds> band_bounds(Band b) noexcept {
  switch (b) {
    case Band::delta: return BandBounds{1.0, 4.0};
    case Band::theta: return BandBounds{4.0, 8.0};
    case Band::slow_theta: return BandBounds{4.0, 5.5};
    case Band::fast_theta: return BandBounds{5.5, 8.0};
    case Band::alpha: return BandBounds{8.0, 13.0};
    case Band::beta: return BandBounds{13.0, 30.0};
    case Band::alpha_theta_ratio: return std::nullopt;
  }
  return std::nullopt;
}

std::string FeatureKey::name() const {
  std::string out(channel_label(channel));
  out += '_';
  out += band_token(band);
  return out;
}

FeatureKey feature_key_from_index(std::size_t canonical_index) {
  if (canonical_index >= kNumFeatures)
    throw Error(ErrorKind::InvalidArgument, "feature index " + std::to_string(canonical_index) + " out of range");
  return {static_cast<Channel>(canonical_index / kNumBands), static_cast<Band>(canonical_index % kNumBands)};
}

std::vector<FeatureKey> all_feature_keys() {
  std::vector<FeatureKey> keys;
  keys.reserve(kNumFeatures);
  for (std::size_t i = 0; i < kNumFeatures; ++i) keys.push_back(feature_key_from_index(i));
  return keys;
}

FeatureKey parse_feature_key(std::string_view name) {
  // Channel labels never contain '_', so the first underscore splits the key.
  const auto pos = name.find('_');
  if (pos == std::string_view::npos)
    throw Error(ErrorKind::UnknownBand, "column '" + std::string(name) + "' is not of the form <channel>_<band>");
  const auto channel = parse_channel(name.substr(0, pos));
  if (!channel) throw Error(ErrorKind::UnknownChannel, "column '" + std::string(name) + "': unknown channel");
  const auto band = parse_band(name.substr(pos + 1));
  if (!band) throw Error(ErrorKind::UnknownBand, "column '" + std::string(name) + "': unknown band");
  return {*channel, *band};
}

Region channel_region(Channel c) noexcept {
  const auto label = channel_label(c);
  std::string_view prefix = label;
  while (!prefix.empty() && (std::isdigit(static_cast<unsigned char>(prefix.back())) || prefix.back() == 'z'))
    prefix.remove_suffix(1);
  if (prefix == "Fp" || prefix == "AF" || prefix == "F" || prefix == "FC") return Region::frontal;
  if (prefix == "CP" || prefix == "P") return Region::parietal;
  if (prefix == "T") return Region::temporal;
  if (prefix == "O") return Region::occipital;
  return Region::central;
}

bool is_midline(Channel c) noexcept { return channel_label(c).back() == 'z'; }

}  // namespace eegfair
