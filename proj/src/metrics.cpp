#include "eegfair/metrics.hpp"

#include "eegfair/error.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace eegfair {

namespace {

double safe_ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

ConfusionMatrix confusion_matrix(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred) {
  if (y_true.size() != y_pred.size()) throw Error(ErrorKind::LengthMismatch, "label vectors differ in length");
  ConfusionMatrix cm;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    if (y_true[i]) {
      (y_pred[i] ? cm.tp : cm.fn) += 1;
    } else {
      (y_pred[i] ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

double auc_mann_whitney(const Eigen::VectorXi& y_true, const Eigen::VectorXd& scores) {
  if (y_true.size() != scores.size()) throw Error(ErrorKind::LengthMismatch, "labels and scores differ in length");
  const auto n = static_cast<std::size_t>(y_true.size());
  const double n_pos = static_cast<double>(y_true.count());
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return scores[static_cast<Eigen::Index>(a)] < scores[static_cast<Eigen::Index>(b)];
  });
  // Sum of mid-ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[static_cast<Eigen::Index>(order[j + 1])] == scores[static_cast<Eigen::Index>(order[i])]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t)
      if (y_true[static_cast<Eigen::Index>(order[t])]) rank_sum += mid_rank;
    i = j + 1;
  }
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

MetricSet compute_metrics(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred, const Eigen::VectorXd& scores) {
  if (y_true.size() != y_pred.size() || y_true.size() != scores.size())
    throw Error(ErrorKind::LengthMismatch, "labels, predictions and scores differ in length");
  if (y_true.size() == 0) throw Error(ErrorKind::InvalidArgument, "metrics of an empty set");
  const auto cm = confusion_matrix(y_true, y_pred);
  MetricSet m;
  m.accuracy = (cm.tp + cm.tn) / cm.total();
  m.recall = safe_ratio(cm.tp, cm.tp + cm.fn);
  m.specificity = safe_ratio(cm.tn, cm.tn + cm.fp);
  m.precision = safe_ratio(cm.tp, cm.tp + cm.fp);
  m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  m.auc = auc_mann_whitney(y_true, scores);
  return m;
}

ErrorRates error_rates(const ConfusionMatrix& cm) {
  ErrorRates r;
  r.type1_degenerate = !(cm.fp + cm.tn > 0);
  r.type2_degenerate = !(cm.fn + cm.tp > 0);
  r.type1 = safe_ratio(cm.fp, cm.fp + cm.tn);
  r.type2 = safe_ratio(cm.fn, cm.fn + cm.tp);
  return r;
}

}  // namespace eegfair
