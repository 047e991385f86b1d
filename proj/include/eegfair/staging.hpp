#pragma once

#include "eegfair/records.hpp"

#include <Eigen/Dense>

#include <array>
#include <string_view>
#include <vector>

namespace eegfair {

// Affine map from UPDRS-III to MDS-UPDRS-III. No default coefficients: the
// rule must come from configuration.
struct ConversionRule {
  double slope = 0.0;
  double offset = 0.0;

  // Throws InvalidArgument unless slope > 0 and both are finite.
  void validate() const;
};

// MDS_UPDRS scores pass through unchanged. Throws NegativeScore.
double convert_updrs(double score, UpdrsVersion version, const ConversionRule& rule);

enum class Stage { onset, mild, severe };
std::string_view to_string(Stage s) noexcept;

// onset if value <= lower, severe if value >= upper, mild in between.
struct StageRule {
  double lower = 20.0;
  double upper = 35.0;

  void validate() const;  // InvalidArgument unless lower < upper
};

inline constexpr StageRule kUpdrsStages{20.0, 35.0};
inline constexpr StageRule kDurationStages{50.0, 100.0};  // months

// Throws InvalidArgument for negative or non-finite values.
Stage trichotomize(double value, const StageRule& rule);

struct StagingRules {
  StageRule updrs = kUpdrsStages;
  StageRule duration = kDurationStages;
  ConversionRule conversion;
};

struct GenderBreakdown {
  // Misclassified PD subjects per stage; index 3 holds the missing-value bucket.
  std::array<int, 4> updrs{};
  std::array<int, 4> duration{};
  int misclassified_pd = 0;
  int misclassified_nonpd = 0;
  int total_pd = 0;
  int total_nonpd = 0;
};

struct StageBreakdown {
  GenderBreakdown male;
  GenderBreakdown female;

  const GenderBreakdown& of(Gender g) const { return g == Gender::male ? male : female; }
};

// Throws LengthMismatch.
StageBreakdown misclassification_breakdown(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred,
                                           const std::vector<SubjectRecord>& records, const StagingRules& rules);

}  // namespace eegfair
