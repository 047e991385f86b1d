#pragma once

#include "eegfair/metrics.hpp"
#include "eegfair/model_selection.hpp"
#include "eegfair/records.hpp"
#include "eegfair/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eegfair {

// Draws, within each stratum of size m (strata visited in sorted label
// order), m positions uniformly with replacement. Returned values are
// elements of `indices`. Throws EmptyStratum (no indices), LengthMismatch.
std::vector<std::size_t> stratified_resample(const std::vector<std::size_t>& indices,
                                             const std::vector<std::string>& strata, Rng& rng);

struct BootstrapSpec {
  int n_replicates = 100;
  std::vector<StratumColumn> strata{StratumColumn::gender, StratumColumn::diagnosis, StratumColumn::center};
  std::uint64_t seed = 0;
  bool resample = true;             // false: every replicate is the test set itself
  bool restratify_per_cell = false;  // false: cells are sliced from global replicates
};

enum class AuditGroup { mixed, males, females };
std::string_view to_string(AuditGroup g) noexcept;

inline constexpr double kCiZ = 1.96;

struct MetricSummary {
  double mean = 0, lo = 0, hi = 0;  // lo/hi = mean -+ 1.96 sample SD, unclipped
};

struct AuditCell {
  AuditGroup group = AuditGroup::mixed;
  std::string scope;  // "global" or a center label
  int n_female = 0;
  int n_male = 0;
  std::array<MetricSummary, 6> metrics{};  // MetricSet::names order
  std::array<std::vector<double>, 6> replicate_values;
  ConfusionMatrix confusion_mean;
  ConfusionMatrix confusion_rounded;  // half-up rounding of confusion_mean
  ErrorRates rates;                   // from confusion_mean
};

struct AuditReport {
  int n_replicates = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> subject_ids;
  Eigen::VectorXi y_true;
  Eigen::VectorXi y_pred;
  Eigen::VectorXd scores;
  std::vector<AuditCell> cells;  // groups mixed/males/females x scopes global + sorted centers; empty cells absent

  const AuditCell* find(AuditGroup group, const std::string& scope) const;
};

// Predictions are taken as given; replicates only reweight subjects.
// Throws LengthMismatch, InvalidArgument (n_replicates < 1).
AuditReport bootstrap_audit(const Predictions& predictions, const std::vector<SubjectRecord>& records,
                            const std::vector<std::string>& subject_ids, const BootstrapSpec& spec);

// Predicts once with `model` and audits.
AuditReport bootstrap_audit(const TrainedModel& model, const FeatureTable& test,
                            const std::vector<SubjectRecord>& records, const BootstrapSpec& spec);

MetricSummary summarize_replicates(const std::vector<double>& values);

double round_half_up(double x);

// "mean [lo hi]" in the audit-table convention: rates as percentages with one
// decimal ("100.0" printed as "100"), AUC with two decimals.
std::string format_metric(const MetricSummary& s, bool is_auc);

// Numeric table: group,scope,n_female,n_male then mean/lo/hi per metric
// (rates in percent, AUC as a fraction).
std::string table2_csv(const AuditReport& report);
// Same rows with formatted "mean [lo hi]" cells.
std::string table2_display_csv(const AuditReport& report);

}  // namespace eegfair
