#include "eegfair/staging.hpp"

#include "eegfair/error.hpp"

#include <cmath>
#include <string>

namespace eegfair {

void ConversionRule::validate() const {
  if (!std::isfinite(slope) || !std::isfinite(offset) || !(slope > 0))
    throw Error(ErrorKind::InvalidArgument, "conversion slope must be positive and finite");
}

double convert_updrs(double score, UpdrsVersion version, const ConversionRule& rule) {
  if (score < 0) throw Error(ErrorKind::NegativeScore, "UPDRS score " + std::to_string(score) + " is negative");
  if (version == UpdrsVersion::MDS_UPDRS) return score;
  rule.validate();
  return rule.slope * score + rule.offset;
}

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::onset: return "onset";
    case Stage::mild: return "mild";
    case Stage::severe: return "severe";
  }
  return "";
}

void StageRule::validate() const {
  if (!(lower < upper)) throw Error(ErrorKind::InvalidArgument, "stage thresholds must be strictly increasing");
}

Stage trichotomize(double value, const StageRule& rule) {
  if (!std::isfinite(value) || value < 0) throw Error(ErrorKind::InvalidArgument, "stage value must be nonnegative");
  rule.validate();
  if (value <= rule.lower) return Stage::onset;
  if (value >= rule.upper) return Stage::severe;
  return Stage::mild;
}

StageBreakdown misclassification_breakdown(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred,
                                           const std::vector<SubjectRecord>& records, const StagingRules& rules) {
  if (y_true.size() != y_pred.size() || static_cast<std::size_t>(y_true.size()) != records.size())
    throw Error(ErrorKind::LengthMismatch, "labels, predictions and records differ in length");
  StageBreakdown out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto& g = r.gender == Gender::male ? out.male : out.female;
    const auto row = static_cast<Eigen::Index>(i);
    const bool wrong = y_true[row] != y_pred[row];
    if (!y_true[row]) {
      ++g.total_nonpd;
      if (wrong) ++g.misclassified_nonpd;
      continue;
    }
    ++g.total_pd;
    if (!wrong) continue;
    ++g.misclassified_pd;
    if (r.updrs3_score) {
      const double mds = convert_updrs(*r.updrs3_score, r.updrs_version, rules.conversion);
      ++g.updrs[static_cast<std::size_t>(trichotomize(mds, rules.updrs))];
    } else {
      ++g.updrs[3];
    }
    if (r.duration_months)
      ++g.duration[static_cast<std::size_t>(trichotomize(*r.duration_months, rules.duration))];
    else
      ++g.duration[3];
  }
  return out;
}

}  // namespace eegfair
