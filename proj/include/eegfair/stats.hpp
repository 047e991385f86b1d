#pragma once

#include "eegfair/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace eegfair {

// Sample variance with the n-1 denominator; 0 for fewer than two values.
template <typename Derived>
typename Derived::Scalar sample_variance(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto n = x.size();
  if (n < 2) return Scalar(0);
  const Scalar mean = x.mean();
  return (x.derived().array() - mean).square().sum() / static_cast<Scalar>(n - 1);
}

template <typename Derived>
typename Derived::Scalar sample_sd(const Eigen::DenseBase<Derived>& x) {
  return std::sqrt(sample_variance(x));
}

// One-way two-group ANOVA F statistic for every column of X with 0/1 labels.
// Zero within-group variance gives +inf (or 0 when the column is constant).
// Throws SingleClass, LengthMismatch, InvalidArgument (n < 3).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> anova_f_scores(const Eigen::MatrixBase<Derived>& X,
                                                                         const Eigen::VectorXi& y) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto n = X.rows();
  if (y.size() != n) throw Error(ErrorKind::LengthMismatch, "labels and feature rows differ in length");
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "ANOVA needs at least three subjects");
  const auto n1 = static_cast<Eigen::Index>(y.count());
  const auto n0 = n - n1;
  if (n1 == 0 || n0 == 0) throw Error(ErrorKind::SingleClass, "ANOVA needs both classes");

  Vector mean0 = Vector::Zero(X.cols()), mean1 = Vector::Zero(X.cols());
  for (Eigen::Index i = 0; i < n; ++i) (y[i] ? mean1 : mean0) += X.row(i).transpose();
  mean0 /= static_cast<Scalar>(n0);
  mean1 /= static_cast<Scalar>(n1);
  Vector ss_within = Vector::Zero(X.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    ss_within += (X.row(i).transpose() - (y[i] ? mean1 : mean0)).cwiseAbs2();
  const Vector grand = (mean0 * static_cast<Scalar>(n0) + mean1 * static_cast<Scalar>(n1)) / static_cast<Scalar>(n);
  const Vector ss_between = static_cast<Scalar>(n0) * (mean0 - grand).cwiseAbs2() +
                            static_cast<Scalar>(n1) * (mean1 - grand).cwiseAbs2();

  Vector f(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (ss_within[j] > 0)
      f[j] = ss_between[j] / (ss_within[j] / static_cast<Scalar>(n - 2));
    else
      f[j] = ss_between[j] > 0 ? std::numeric_limits<Scalar>::infinity() : Scalar(0);
  }
  return f;
}

enum class TTestMode { pooled, welch };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Two-sided P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Two-sample t-test of mean(a) - mean(b). Throws GroupTooSmall (< 2 values).
TTestResult ttest_two_sample(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                             TTestMode mode = TTestMode::pooled);

// Benjamini-Hochberg step-up at level q: with p sorted ascending, find the
// largest i with p_(i) <= i q / m and flag every p <= p_(i). Throws InvalidP.
std::vector<bool> bh_fdr(const std::vector<double>& pvals, double q = 0.05);

}  // namespace eegfair
