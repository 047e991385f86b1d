#pragma once

#include "eegfair/records.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace eegfair {

enum class CombatMode { empirical_bayes, direct };

enum class Covariate { diagnosis, gender, age_years };

std::string_view to_string(CombatMode m) noexcept;
std::string_view to_string(Covariate c) noexcept;
CombatMode parse_combat_mode(std::string_view s);  // "eb"/"empirical_bayes" | "direct"
Covariate parse_covariate(std::string_view s);

struct CovariateSpec {
  std::vector<Covariate> columns{Covariate::diagnosis, Covariate::gender, Covariate::age_years};
};

// Numeric covariate matrix (n x |columns|): PD = 1, male = 1, age in years.
Eigen::MatrixXd covariate_matrix(const std::vector<SubjectRecord>& records, const CovariateSpec& spec);

// Fitted location/scale batch model. Per feature j and batch b the adjusted
// value is
//   (z - gamma_star(b, j)) / sqrt(delta_star(b, j)) * pooled_sd[j] + mu_ij,
// with z = (x_ij - mu_ij) / pooled_sd[j] and mu_ij = grand_mean[j] + c_i . beta.col(j).
// delta_star is a variance ratio (1 means no scale effect).
struct HarmonizationModel {
  CombatMode mode = CombatMode::empirical_bayes;
  std::vector<std::string> batch_labels;
  CovariateSpec covariates;
  std::vector<FeatureKey> keys;
  Eigen::VectorXd grand_mean;   // p
  Eigen::MatrixXd covariate_coeffs;  // |covariates| x p
  Eigen::VectorXd pooled_sd;    // p
  Eigen::MatrixXd gamma_hat;    // B x p, per-batch raw location
  Eigen::MatrixXd delta_hat;    // B x p, per-batch raw variance ratio
  Eigen::MatrixXd gamma_star;   // B x p
  Eigen::MatrixXd delta_star;   // B x p
  // Empirical-Bayes hyperparameters per batch (unused in direct mode).
  Eigen::VectorXd gamma_bar, tau2, a_prior, b_prior;
  int eb_iterations = 0;
};

struct CombatOptions {
  CombatMode mode = CombatMode::empirical_bayes;
  CovariateSpec covariates;
  double tolerance = 1e-6;  // relative change between EB sweeps
  int max_iterations = 100;
};

// Fits on `table` with records aligned row-for-row; batches are the records'
// centers. Throws SingleBatch, RankDeficientDesign, DegenerateBatch,
// LengthMismatch.
HarmonizationModel fit_combat(const FeatureTable& table, const std::vector<SubjectRecord>& records,
                              const CombatOptions& options = {});

// Throws UnknownBatch, MissingFeature, LengthMismatch.
FeatureTable apply_combat(const HarmonizationModel& model, const FeatureTable& table,
                          const std::vector<SubjectRecord>& records);

}  // namespace eegfair
