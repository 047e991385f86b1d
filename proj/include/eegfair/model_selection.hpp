#pragma once

#include "eegfair/logreg.hpp"
#include "eegfair/records.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace eegfair {

enum class StratumColumn { center, diagnosis, gender };

std::string_view to_string(StratumColumn c) noexcept;
StratumColumn parse_stratum_column(std::string_view s);

// Composite stratum label per record, e.g. "Turku|PD".
std::vector<std::string> stratum_labels(const std::vector<SubjectRecord>& records,
                                        const std::vector<StratumColumn>& columns);

struct SplitSpec {
  double train_fraction = 0.7;
  std::vector<StratumColumn> strata{StratumColumn::center, StratumColumn::diagnosis};
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Within each stratum of size n, round-half-up(train_fraction * n) subjects go
// to train, chosen by a seeded shuffle. Throws EmptyStratum (no records),
// InvalidArgument (fraction outside (0, 1)).
Split stratified_split(const std::vector<SubjectRecord>& records, const SplitSpec& spec);

// round-half-up(fraction * n), robust to 0.7 * 15 landing just below 10.5.
std::size_t stratum_train_count(double fraction, std::size_t n);

// Fold id in [0, n_folds) per record: each stratum is shuffled and dealt
// round-robin, continuing the rotation across strata so fold sizes balance.
std::vector<int> stratified_folds(const std::vector<SubjectRecord>& records, const std::vector<StratumColumn>& strata,
                                  int n_folds, std::uint64_t seed);

// Indices of the k largest scores, ties to the lower index, returned
// ascending. Throws KOutOfRange.
std::vector<std::size_t> select_k_best(const Eigen::Ref<const Eigen::VectorXd>& scores, int k);

struct TrainedModel {
  std::vector<FeatureKey> selected_keys;  // canonical order
  Eigen::VectorXd scaler_mean;
  Eigen::VectorXd scaler_sd;  // population sd; 1 where a column is constant
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double l2_strength = 1.0;
  int k = 0;
};

// ANOVA-F selection of k columns, z-scoring on these rows, then L2 logistic
// regression. `keys` names the columns of X.
TrainedModel fit_pipeline(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y,
                          const std::vector<FeatureKey>& keys, int k, double l2, const LogregOptions& options = {});

struct Predictions {
  Eigen::VectorXd scores;  // P(PD)
  Eigen::VectorXi labels;  // 1 = PD iff score >= 0.5
};

// Throws MissingFeature.
Predictions predict(const TrainedModel& model, const FeatureTable& table);

double accuracy(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred);

struct GridCell {
  int k = 0;
  double l2 = 0.0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// Deterministic preference among equally good cells: larger k, then smaller l2.
bool preferred_over(const GridCell& a, const GridCell& b) noexcept;

struct CvOptions {
  std::vector<int> k_grid{10, 25, 50, 100, 150, 181, 188, 203};
  std::vector<double> l2_grid{0.01, 0.1, 1.0, 10.0};
  int outer_folds = 5;
  int inner_folds = 5;
  std::vector<StratumColumn> strata{StratumColumn::center, StratumColumn::diagnosis};
  std::uint64_t seed = 0;
  LogregOptions logreg;
};

struct CvResult {
  std::vector<GridCell> grid;
  std::vector<double> mean_outer_accuracy;  // per cell, averaged over outer folds
  Eigen::MatrixXd outer_accuracy;           // outer fold x cell
  Eigen::MatrixXd inner_mean_accuracy;      // outer fold x cell, mean over inner folds
  std::vector<int> outer_fold;              // per subject
  std::vector<GridCell> fold_selected;      // inner-CV winner per outer fold
  GridCell best_cell;                       // max mean_outer_accuracy
  GridCell selected_cell;                   // modal fold winner, used for the final refit
};

struct NestedCvResult {
  CvResult cv;
  TrainedModel model;
};

// Nested stratified CV on a training table; records aligned to its rows.
// Selection and scaling are refit inside every fold on fold-train rows only.
// Throws TooFewSubjects, KOutOfRange, LengthMismatch.
NestedCvResult nested_cv(const FeatureTable& train, const std::vector<SubjectRecord>& records,
                         const CvOptions& options);

// Plain k-fold CV accuracy of every cell using the given fold ids (used for
// the gender-specific k search). Returns one mean accuracy per cell.
std::vector<double> cv_accuracy(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y,
                                const std::vector<FeatureKey>& keys, const std::vector<int>& folds, int n_folds,
                                const std::vector<GridCell>& grid, const LogregOptions& options = {});

}  // namespace eegfair
