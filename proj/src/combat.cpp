#include "eegfair/combat.hpp"

#include "eegfair/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eegfair {

std::string_view to_string(CombatMode m) noexcept { return m == CombatMode::direct ? "direct" : "eb"; }

std::string_view to_string(Covariate c) noexcept {
  switch (c) {
    case Covariate::diagnosis: return "diagnosis";
    case Covariate::gender: return "gender";
    case Covariate::age_years: return "age_years";
  }
  return "";
}

CombatMode parse_combat_mode(std::string_view s) {
  if (s == "eb" || s == "empirical_bayes") return CombatMode::empirical_bayes;
  if (s == "direct") return CombatMode::direct;
  throw Error(ErrorKind::InvalidEnum, "harmonization mode '" + std::string(s) + "' (expected eb|direct)");
}

Covariate parse_covariate(std::string_view s) {
  if (s == "diagnosis") return Covariate::diagnosis;
  if (s == "gender") return Covariate::gender;
  if (s == "age_years" || s == "age") return Covariate::age_years;
  throw Error(ErrorKind::InvalidEnum, "covariate '" + std::string(s) + "'");
}

Eigen::MatrixXd covariate_matrix(const std::vector<SubjectRecord>& records, const CovariateSpec& spec) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(spec.columns.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = 0; j < spec.columns.size(); ++j) {
      const auto& r = records[i];
      double v = 0.0;
      switch (spec.columns[j]) {
        case Covariate::diagnosis: v = r.is_pd() ? 1.0 : 0.0; break;
        case Covariate::gender: v = r.gender == Gender::male ? 1.0 : 0.0; break;
        case Covariate::age_years: v = r.age_years; break;
      }
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  return c;
}

namespace {

std::vector<Eigen::Index> batch_index(const std::vector<SubjectRecord>& records,
                                      const std::vector<std::string>& labels) {
  std::vector<Eigen::Index> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto it = std::find(labels.begin(), labels.end(), r.center);
    if (it == labels.end())
      throw Error(ErrorKind::UnknownBatch, "subject " + r.subject_id + ": center '" + r.center + "' not in model");
    out.push_back(static_cast<Eigen::Index>(it - labels.begin()));
  }
  return out;
}

Eigen::MatrixXd standardized(const HarmonizationModel& model, const Eigen::MatrixXd& y, const Eigen::MatrixXd& cov,
                             Eigen::MatrixXd& stand_mean) {
  stand_mean = (cov * model.covariate_coeffs).rowwise() + model.grand_mean.transpose();
  return (y - stand_mean).array().rowwise() / model.pooled_sd.transpose().array();
}

double relative_change(const Eigen::ArrayXd& now, const Eigen::ArrayXd& before) {
  return ((now - before).abs() / before.abs().max(1e-12)).maxCoeff();
}

}  // namespace

HarmonizationModel fit_combat(const FeatureTable& table, const std::vector<SubjectRecord>& records,
                              const CombatOptions& options) {
  const Eigen::Index n = table.rows();
  const Eigen::Index p = table.cols();
  if (static_cast<std::size_t>(n) != records.size())
    throw Error(ErrorKind::LengthMismatch, "feature table and metadata differ in length");

  HarmonizationModel model;
  model.mode = options.mode;
  model.covariates = options.covariates;
  model.keys = table.keys;
  model.batch_labels = center_labels(records);
  const auto n_batches = static_cast<Eigen::Index>(model.batch_labels.size());
  if (n_batches < 2) throw Error(ErrorKind::SingleBatch, "harmonization needs at least two centers");

  const auto batch = batch_index(records, model.batch_labels);
  Eigen::VectorXd batch_size = Eigen::VectorXd::Zero(n_batches);
  for (auto b : batch) batch_size[b] += 1;
  for (Eigen::Index b = 0; b < n_batches; ++b)
    if (batch_size[b] < 2)
      throw Error(ErrorKind::DegenerateBatch, "center '" + model.batch_labels[static_cast<std::size_t>(b)] +
                                                  "' has fewer than two subjects");

  const Eigen::MatrixXd cov = covariate_matrix(records, options.covariates);
  const Eigen::Index n_cov = cov.cols();
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, n_batches + n_cov);
  for (Eigen::Index i = 0; i < n; ++i) design(i, batch[static_cast<std::size_t>(i)]) = 1.0;
  design.rightCols(n_cov) = cov;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols() || n <= design.cols())
    throw Error(ErrorKind::RankDeficientDesign, "batch + covariate design has rank " + std::to_string(qr.rank()) +
                                                    " of " + std::to_string(design.cols()) + " with " +
                                                    std::to_string(n) + " subjects");
  const Eigen::MatrixXd& y = table.values;
  const Eigen::MatrixXd coeffs = qr.solve(y);

  model.grand_mean = (batch_size / static_cast<double>(n)).transpose() * coeffs.topRows(n_batches);
  model.covariate_coeffs = coeffs.bottomRows(n_cov);
  const Eigen::MatrixXd resid = y - design * coeffs;
  // Unbiased residual variance: a second fit on harmonized data then sees unit
  // within-batch scale.
  model.pooled_sd = (resid.colwise().squaredNorm() / static_cast<double>(n - design.cols())).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(model.pooled_sd[j] > 0))
      throw Error(ErrorKind::DegenerateBatch, "feature " + table.keys[static_cast<std::size_t>(j)].name() +
                                                  " has zero residual variance");

  Eigen::MatrixXd stand_mean;
  const Eigen::MatrixXd z = standardized(model, y, cov, stand_mean);

  model.gamma_hat = Eigen::MatrixXd::Zero(n_batches, p);
  model.delta_hat = Eigen::MatrixXd::Zero(n_batches, p);
  for (Eigen::Index i = 0; i < n; ++i) model.gamma_hat.row(batch[static_cast<std::size_t>(i)]) += z.row(i);
  model.gamma_hat.array().colwise() /= batch_size.array();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto b = batch[static_cast<std::size_t>(i)];
    model.delta_hat.row(b) += (z.row(i) - model.gamma_hat.row(b)).cwiseAbs2();
  }
  model.delta_hat.array().colwise() /= (batch_size.array() - 1.0);
  for (Eigen::Index b = 0; b < n_batches; ++b)
    for (Eigen::Index j = 0; j < p; ++j)
      if (!(model.delta_hat(b, j) > 0))
        throw Error(ErrorKind::DegenerateBatch, "center '" + model.batch_labels[static_cast<std::size_t>(b)] +
                                                    "' has zero variance in feature " +
                                                    table.keys[static_cast<std::size_t>(j)].name());

  if (options.mode == CombatMode::direct) {
    model.gamma_star = model.gamma_hat;
    model.delta_star = model.delta_hat;
    return model;
  }

  if (p < 2) throw Error(ErrorKind::InvalidArgument, "empirical-Bayes priors need at least two features");
  model.gamma_star.resize(n_batches, p);
  model.delta_star.resize(n_batches, p);
  model.gamma_bar.resize(n_batches);
  model.tau2.resize(n_batches);
  model.a_prior.resize(n_batches);
  model.b_prior.resize(n_batches);

  for (Eigen::Index b = 0; b < n_batches; ++b) {
    const Eigen::ArrayXd g_hat = model.gamma_hat.row(b).transpose().array();
    const Eigen::ArrayXd d_hat = model.delta_hat.row(b).transpose().array();
    const double g_bar = g_hat.mean();
    const double t2 = (g_hat - g_bar).square().sum() / static_cast<double>(p - 1);
    const double m = d_hat.mean();
    const double s2 = (d_hat - m).square().sum() / static_cast<double>(p - 1);
    // Inverse-gamma prior by moments; s2 == 0 collapses the prior onto m.
    const bool point_prior = !(s2 > 0);
    const double a = point_prior ? std::numeric_limits<double>::infinity() : (2.0 * s2 + m * m) / s2;
    const double bb = point_prior ? std::numeric_limits<double>::infinity() : (m * s2 + m * m * m) / s2;
    model.gamma_bar[b] = g_bar;
    model.tau2[b] = t2;
    model.a_prior[b] = a;
    model.b_prior[b] = bb;

    const double nb = batch_size[b];
    Eigen::ArrayXd sum_sq_about_hat = d_hat * (nb - 1.0);
    Eigen::ArrayXd g_old = g_hat, d_old = d_hat;
    Eigen::ArrayXd g_new = g_old, d_new = d_old;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
      g_new = (t2 * nb * g_hat + d_old * g_bar) / (t2 * nb + d_old);
      // sum_i (z_i - g)^2 = sum_i (z_i - g_hat)^2 + nb (g_hat - g)^2
      const Eigen::ArrayXd sum2 = sum_sq_about_hat + nb * (g_hat - g_new).square();
      d_new = point_prior ? Eigen::ArrayXd::Constant(p, m) : Eigen::ArrayXd((0.5 * sum2 + bb) / (nb / 2.0 + a - 1.0));
      const double change = std::max(relative_change(g_new, g_old), relative_change(d_new, d_old));
      g_old = g_new;
      d_old = d_new;
      if (change < options.tolerance) {
        ++it;
        break;
      }
    }
    model.eb_iterations = std::max(model.eb_iterations, it);
    model.gamma_star.row(b) = g_new.matrix().transpose();
    model.delta_star.row(b) = d_new.matrix().transpose();
  }
  return model;
}

FeatureTable apply_combat(const HarmonizationModel& model, const FeatureTable& table,
                          const std::vector<SubjectRecord>& records) {
  if (static_cast<std::size_t>(table.rows()) != records.size())
    throw Error(ErrorKind::LengthMismatch, "feature table and metadata differ in length");
  const auto batch = batch_index(records, model.batch_labels);

  FeatureTable out;
  out.subject_ids = table.subject_ids;
  out.keys = model.keys;
  Eigen::MatrixXd y(table.rows(), static_cast<Eigen::Index>(model.keys.size()));
  for (std::size_t j = 0; j < model.keys.size(); ++j) {
    const auto col = table.column_of(model.keys[j]);
    if (!col) throw Error(ErrorKind::MissingFeature, "feature " + model.keys[j].name() + " absent from table");
    y.col(static_cast<Eigen::Index>(j)) = table.values.col(*col);
  }

  const Eigen::MatrixXd cov = covariate_matrix(records, model.covariates);
  Eigen::MatrixXd stand_mean;
  Eigen::MatrixXd z = standardized(model, y, cov, stand_mean);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const auto b = batch[static_cast<std::size_t>(i)];
    z.row(i) = ((z.row(i) - model.gamma_star.row(b)).array() / model.delta_star.row(b).array().sqrt()).matrix();
  }
  out.values = (z.array().rowwise() * model.pooled_sd.transpose().array()).matrix() + stand_mean;
  return out;
}

}  // namespace eegfair
