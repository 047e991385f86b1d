#pragma once

#include <Eigen/Dense>

#include <array>
#include <string_view>

namespace eegfair {

struct ConfusionMatrix {
  double tp = 0, fp = 0, tn = 0, fn = 0;  // real-valued once averaged

  double total() const noexcept { return tp + fp + tn + fn; }
};

ConfusionMatrix confusion_matrix(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred);

struct MetricSet {
  double accuracy = 0, recall = 0, specificity = 0, precision = 0, f1 = 0, auc = 0.5;

  static constexpr std::array<std::string_view, 6> names = {"accuracy",  "recall", "specificity",
                                                            "precision", "f1",     "auc"};
  std::array<double, 6> as_array() const noexcept { return {accuracy, recall, specificity, precision, f1, auc}; }
};

// Mann-Whitney AUC, ties credited 0.5; 0.5 when only one class is present.
double auc_mann_whitney(const Eigen::VectorXi& y_true, const Eigen::VectorXd& scores);

// Ratios with a zero denominator are reported as 0. Throws LengthMismatch,
// InvalidArgument (empty input).
MetricSet compute_metrics(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred, const Eigen::VectorXd& scores);

struct ErrorRates {
  double type1 = 0;  // fp / (fp + tn)
  double type2 = 0;  // fn / (fn + tp)
  bool type1_degenerate = false;  // zero denominator, rate reported as 0
  bool type2_degenerate = false;
};

ErrorRates error_rates(const ConfusionMatrix& cm);

}  // namespace eegfair
