#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eegfair {

enum class ErrorKind {
  InvalidArgument,
  Io,
  MissingColumn,
  DuplicateSubject,
  InvalidEnum,
  UnknownChannel,
  UnknownBand,
  NonFiniteValue,
  MissingChannel,
  CutoffAboveNyquist,
  AllEpochsRejected,
  SegmentTooLong,
  ZeroTotalPower,
  SingleBatch,
  RankDeficientDesign,
  DegenerateBatch,
  UnknownBatch,
  EmptyStratum,
  SingleClass,
  KOutOfRange,
  NoConvergence,
  MissingFeature,
  TooFewSubjects,
  LengthMismatch,
  EmptyCell,
  NegativeScore,
  GroupTooSmall,
  InvalidP,
  DegenerateConfig,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

// All library failures are reported through this exception; kind() names the
// error class so callers (and the CLI exit path) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return error_kind_name(kind_); }
  // The message without the kind prefix, for rewrapping with more context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace eegfair
