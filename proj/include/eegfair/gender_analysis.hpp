#pragma once

#include "eegfair/model_selection.hpp"
#include "eegfair/records.hpp"
#include "eegfair/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace eegfair {

struct GenderRetrainOptions {
  double l2 = 1.0;  // fixed to the mixed model's value
  std::vector<int> k_grid{10, 25, 50, 100, 150, 181, 188, 203};
  SplitSpec split;  // 70/30 by center and diagnosis
  int n_folds = 5;
  std::uint64_t seed = 0;
  LogregOptions logreg;
};

struct GenderModel {
  Gender gender = Gender::male;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<double> cv_accuracy;  // per k in the grid
  int k = 0;
  TrainedModel model;
  double test_accuracy = 0.0;
};

struct GenderRetrainResult {
  GenderModel male;
  GenderModel female;
  std::vector<FeatureKey> common_keys;  // canonical order
};

// Retrains the pipeline on each gender separately, searching k only.
// Throws TooFewSubjects when a gender subset lacks a class or is too small to fold.
GenderRetrainResult retrain_gender_models(const FeatureTable& table, const std::vector<SubjectRecord>& records,
                                          const GenderRetrainOptions& options);

struct RegionFilter {
  bool frontal = true;
  bool parietal = true;
  bool include_midline = false;

  bool keeps(Channel c) const noexcept;
};

struct GroupSummary {
  int n = 0;
  double mean = 0, sd = 0;
  double lo = 0, hi = 0;  // mean -+ 1.96 sd / sqrt(n)
};

GroupSummary summarize_group(const Eigen::Ref<const Eigen::VectorXd>& x);

struct GroupComparison {
  FeatureKey key{};
  Diagnosis diagnosis = Diagnosis::PD;
  GroupSummary male;
  GroupSummary female;
  TTestResult test;
  bool significant_raw = false;
  bool significant_fdr = false;
};

struct CompareOptions {
  RegionFilter regions;
  TTestMode mode = TTestMode::pooled;
  double alpha = 0.05;
  double q = 0.05;
};

// Male vs female t-test per kept key, separately within PD and nonPD
// subjects; BH runs over the keys of each diagnosis group. Output is PD
// first, then nonPD, keys in canonical order. Throws InvalidArgument (no keys
// survive the filter), MissingFeature, GroupTooSmall.
std::vector<GroupComparison> compare_common_features(const FeatureTable& table,
                                                     const std::vector<SubjectRecord>& records,
                                                     const std::vector<FeatureKey>& keys,
                                                     const CompareOptions& options = {});

std::string table3_csv(const std::vector<GroupComparison>& rows);

}  // namespace eegfair
