#include "eegfair/logreg.hpp"

#include "eegfair/error.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace eegfair {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double objective_value(const Eigen::VectorXd& margin, const Eigen::VectorXi& y, const Eigen::VectorXd& w,
                       double l2) {
  double nll = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) nll += softplus(y[i] ? -margin[i] : margin[i]);
  return nll / static_cast<double>(margin.size()) + 0.5 * l2 * w.squaredNorm();
}

// Objective change from (margin, w) to (margin_new, w_new), summed termwise so that
// steps far below the objective's own rounding are still resolved.
double objective_change(const Eigen::VectorXd& margin, const Eigen::VectorXd& margin_new, const Eigen::VectorXi& y,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& w_new, double l2) {
  double nll = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    const double b = y[i] ? -margin[i] : margin[i];
    const double a = y[i] ? -margin_new[i] : margin_new[i];
    nll += a - b > 30.0 ? softplus(a) - softplus(b) : std::log1p(sigmoid(b) * std::expm1(a - b));
  }
  return nll / static_cast<double>(margin.size()) + 0.5 * l2 * (w_new - w).dot(w_new + w);
}

}  // namespace

LogregObjective logreg_objective(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y,
                                 const Eigen::Ref<const Eigen::VectorXd>& w, double b, double l2) {
  const Eigen::VectorXd margin = (X * w).array() + b;
  Eigen::VectorXd residual(margin.size());
  for (Eigen::Index i = 0; i < margin.size(); ++i) residual[i] = sigmoid(margin[i]) - y[i];
  const double n = static_cast<double>(X.rows());
  LogregObjective out;
  out.value = objective_value(margin, y, w, l2);
  out.grad_w = X.transpose() * residual / n + l2 * w;
  out.grad_b = residual.sum() / n;
  return out;
}

LogregFit fit_logreg(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y, double l2,
                     const LogregOptions& options) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (y.size() != n) throw Error(ErrorKind::LengthMismatch, "labels and feature rows differ in length");
  if (!(l2 > 0)) throw Error(ErrorKind::InvalidArgument, "l2 strength must be positive");
  const auto positives = y.count();
  if (positives == 0 || positives == n) throw Error(ErrorKind::SingleClass, "logistic regression needs both classes");

  Eigen::MatrixXd Xa(n, k + 1);
  Xa.leftCols(k) = X;
  Xa.col(k).setOnes();
  const Eigen::VectorXd yd = y.cast<double>();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k + 1);
  Eigen::VectorXd margin = Xa * theta;
  double obj = objective_value(margin, y, theta.head(k), l2);

  LogregFit fit;
  fit.objective_trace.push_back(obj);
  Eigen::VectorXd prob(n), weight(n), grad(k + 1);
  Eigen::MatrixXd hessian(k + 1, k + 1);

  for (int iter = 0;; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(margin[i]);
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
    grad = Xa.transpose() * (prob - yd) * inv_n;
    grad.head(k) += l2 * theta.head(k);
    fit.gradient_norm = grad.cwiseAbs().maxCoeff();
    fit.iterations = iter;
    if (fit.gradient_norm < options.tol) break;
    if (iter >= options.max_iter)
      throw Error(ErrorKind::NoConvergence, "logistic regression stopped after " + std::to_string(iter) +
                                                " iterations with gradient max-norm " + sci(fit.gradient_norm));

    // Only the lower triangle is formed; LDLT reads nothing else.
    const Eigen::MatrixXd scaled = (Xa.array().colwise() * weight.array().sqrt()).matrix();
    hessian.setZero();
    hessian.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose(), inv_n);
    hessian.diagonal().head(k).array() += l2;
    // Saturated fits can leave the intercept curvature at ~0.
    hessian(k, k) += 1e-12;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    const Eigen::VectorXd step = ldlt.solve(grad);

    double scale = 1.0;
    double change = 0.0;
    Eigen::VectorXd candidate, cand_margin;
    for (int halving = 0; halving <= 60; ++halving, scale *= 0.5) {
      candidate = theta - scale * step;
      cand_margin = Xa * candidate;
      change = objective_change(margin, cand_margin, y, theta.head(k), candidate.head(k), l2);
      if (change <= 0.0) break;
    }
    if (!(change <= 0.0)) {
      throw Error(ErrorKind::NoConvergence, "logistic regression line search failed after " + std::to_string(iter) +
                                                " iterations with gradient max-norm " + sci(fit.gradient_norm));
    }
    theta = candidate;
    margin = cand_margin;
    obj += change;
    fit.objective_trace.push_back(obj);
  }
  fit.weights = theta.head(k);
  fit.intercept = theta[k];
  return fit;
}

}  // namespace eegfair
