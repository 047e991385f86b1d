#pragma once

#include <Eigen/Dense>

#include <vector>

namespace eegfair {

// Objective: mean negative log-likelihood + (l2/2) ||w||^2, intercept unpenalised.
struct LogregObjective {
  double value = 0.0;
  Eigen::VectorXd grad_w;
  double grad_b = 0.0;
};

LogregObjective logreg_objective(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y,
                                 const Eigen::Ref<const Eigen::VectorXd>& w, double b, double l2);

struct LogregOptions {
  double tol = 1e-8;  // on the max-norm of the gradient
  int max_iter = 200;
};

struct LogregFit {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;  // objective at start and after each step
};

// Damped Newton (IRLS) with step-halving so the objective never increases.
// Throws SingleClass, LengthMismatch, InvalidArgument (l2 <= 0), NoConvergence.
LogregFit fit_logreg(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y, double l2,
                     const LogregOptions& options = {});

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace eegfair
