#include "eegfair/model_selection.hpp"

#include "eegfair/error.hpp"
#include "eegfair/parallel.hpp"
#include "eegfair/rng.hpp"
#include "eegfair/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace eegfair {

std::string_view to_string(StratumColumn c) noexcept {
  switch (c) {
    case StratumColumn::center: return "center";
    case StratumColumn::diagnosis: return "diagnosis";
    case StratumColumn::gender: return "gender";
  }
  return "";
}

StratumColumn parse_stratum_column(std::string_view s) {
  if (s == "center") return StratumColumn::center;
  if (s == "diagnosis") return StratumColumn::diagnosis;
  if (s == "gender") return StratumColumn::gender;
  throw Error(ErrorKind::InvalidEnum, "stratum column '" + std::string(s) + "'");
}

std::vector<std::string> stratum_labels(const std::vector<SubjectRecord>& records,
                                        const std::vector<StratumColumn>& columns) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    std::string label;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) label += '|';
      switch (columns[c]) {
        case StratumColumn::center: label += r.center; break;
        case StratumColumn::diagnosis: label += to_string(r.diagnosis); break;
        case StratumColumn::gender: label += to_string(r.gender); break;
      }
    }
    out.push_back(std::move(label));
  }
  return out;
}

namespace {

// Stratum label -> member indices in input order; map keeps strata sorted.
std::map<std::string, std::vector<std::size_t>> group_by_stratum(const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

std::size_t stratum_train_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5 + 1e-9));
}

Split stratified_split(const std::vector<SubjectRecord>& records, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0 && spec.train_fraction < 1))
    throw Error(ErrorKind::InvalidArgument, "train_fraction must lie in (0, 1)");
  if (records.empty()) throw Error(ErrorKind::EmptyStratum, "no subjects to split");
  Rng rng(derive_seed(spec.seed, {0x5b117}));
  Split split;
  for (auto& [label, members] : group_by_stratum(stratum_labels(records, spec.strata))) {
    rng.shuffle(members.begin(), members.end());
    const auto n_train = stratum_train_count(spec.train_fraction, members.size());
    for (std::size_t i = 0; i < members.size(); ++i) (i < n_train ? split.train : split.test).push_back(members[i]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<int> stratified_folds(const std::vector<SubjectRecord>& records, const std::vector<StratumColumn>& strata,
                                  int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error(ErrorKind::InvalidArgument, "need at least two folds");
  Rng rng(derive_seed(seed, {0xf01d}));
  std::vector<int> fold(records.size(), 0);
  int next = 0;
  for (auto& [label, members] : group_by_stratum(stratum_labels(records, strata))) {
    rng.shuffle(members.begin(), members.end());
    for (auto m : members) {
      fold[m] = next;
      next = (next + 1) % n_folds;
    }
  }
  return fold;
}

std::vector<std::size_t> select_k_best(const Eigen::Ref<const Eigen::VectorXd>& scores, int k) {
  if (k < 1 || k > scores.size())
    throw Error(ErrorKind::KOutOfRange, "k = " + std::to_string(k) + " outside [1, " + std::to_string(scores.size()) + "]");
  std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return scores[static_cast<Eigen::Index>(a)] > scores[static_cast<Eigen::Index>(b)];
  });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Eigen::VectorXi take(const Eigen::VectorXi& y, const std::vector<std::size_t>& rows) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(rows[i])];
  return out;
}

Eigen::MatrixXd take_cols(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(cols[j]));
  return out;
}

struct Scaler {
  Eigen::VectorXd mean, sd;
};

Scaler fit_scaler(const Eigen::MatrixXd& X) {
  Scaler s;
  s.mean = X.colwise().mean().transpose();
  s.sd = ((X.rowwise() - s.mean.transpose()).colwise().squaredNorm() / static_cast<double>(X.rows()))
             .cwiseSqrt()
             .transpose();
  for (Eigen::Index j = 0; j < s.sd.size(); ++j)
    if (!(s.sd[j] > 0)) s.sd[j] = 1.0;
  return s;
}

Eigen::MatrixXd scale(const Eigen::MatrixXd& X, const Scaler& s) {
  return ((X.rowwise() - s.mean.transpose()).array().rowwise() / s.sd.transpose().array()).matrix();
}

Eigen::VectorXi threshold(const Eigen::VectorXd& scores) {
  return (scores.array() >= 0.5).cast<int>().matrix();
}

Eigen::VectorXd decision_scores(const Eigen::MatrixXd& Z, const Eigen::VectorXd& w, double b) {
  Eigen::VectorXd margin = (Z * w).array() + b;
  return margin.unaryExpr([](double m) { return sigmoid(m); });
}

// Accuracy on val_rows of every grid cell trained on train_rows.
std::vector<double> evaluate_split(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y,
                                   const std::vector<std::size_t>& train_rows,
                                   const std::vector<std::size_t>& val_rows, const std::vector<GridCell>& grid,
                                   const LogregOptions& options) {
  const Eigen::MatrixXd X_train = take_rows(X, train_rows);
  const Eigen::VectorXi y_train = take(y, train_rows);
  const Eigen::MatrixXd X_val = take_rows(X, val_rows);
  const Eigen::VectorXi y_val = take(y, val_rows);
  const Eigen::VectorXd scores = anova_f_scores(X_train, y_train);

  std::vector<double> acc(grid.size());
  std::map<int, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> by_k;  // k -> (scaled train, scaled val)
  for (std::size_t c = 0; c < grid.size(); ++c) {
    auto it = by_k.find(grid[c].k);
    if (it == by_k.end()) {
      const auto cols = select_k_best(scores, grid[c].k);
      const Eigen::MatrixXd train_sel = take_cols(X_train, cols);
      const Scaler s = fit_scaler(train_sel);
      it = by_k.emplace(grid[c].k, std::make_pair(scale(train_sel, s), scale(take_cols(X_val, cols), s))).first;
    }
    const auto fit = fit_logreg(it->second.first, y_train, grid[c].l2, options);
    acc[c] = accuracy(y_val, threshold(decision_scores(it->second.second, fit.weights, fit.intercept)));
  }
  return acc;
}

std::vector<std::size_t> rows_where(const std::vector<int>& fold, int f, bool equal) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if ((fold[i] == f) == equal) out.push_back(i);
  return out;
}

// Index of the best cell by value, ties broken by preferred_over.
std::size_t argbest(const std::vector<double>& value, const std::vector<GridCell>& grid) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < grid.size(); ++c)
    if (value[c] > value[best] || (value[c] == value[best] && preferred_over(grid[c], grid[best]))) best = c;
  return best;
}

}  // namespace

double accuracy(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred) {
  if (y_true.size() != y_pred.size()) throw Error(ErrorKind::LengthMismatch, "label vectors differ in length");
  if (y_true.size() == 0) return 0.0;
  return static_cast<double>((y_true.array() == y_pred.array()).count()) / static_cast<double>(y_true.size());
}

bool preferred_over(const GridCell& a, const GridCell& b) noexcept {
  if (a.k != b.k) return a.k > b.k;
  return a.l2 < b.l2;
}

TrainedModel fit_pipeline(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y,
                          const std::vector<FeatureKey>& keys, int k, double l2, const LogregOptions& options) {
  if (static_cast<std::size_t>(X.cols()) != keys.size())
    throw Error(ErrorKind::LengthMismatch, "feature key count does not match matrix columns");
  const auto cols = select_k_best(anova_f_scores(X, y), k);
  const Eigen::MatrixXd selected = take_cols(X, cols);
  const Scaler s = fit_scaler(selected);
  const auto fit = fit_logreg(scale(selected, s), y, l2, options);
  TrainedModel m;
  for (auto c : cols) m.selected_keys.push_back(keys[c]);
  m.scaler_mean = s.mean;
  m.scaler_sd = s.sd;
  m.weights = fit.weights;
  m.intercept = fit.intercept;
  m.l2_strength = l2;
  m.k = k;
  return m;
}

Predictions predict(const TrainedModel& model, const FeatureTable& table) {
  Eigen::MatrixXd Z(table.rows(), static_cast<Eigen::Index>(model.selected_keys.size()));
  for (std::size_t j = 0; j < model.selected_keys.size(); ++j) {
    const auto col = table.column_of(model.selected_keys[j]);
    if (!col) throw Error(ErrorKind::MissingFeature, "feature " + model.selected_keys[j].name() + " absent from table");
    Z.col(static_cast<Eigen::Index>(j)) = table.values.col(*col);
  }
  Z = scale(Z, Scaler{model.scaler_mean, model.scaler_sd});
  Predictions p;
  p.scores = decision_scores(Z, model.weights, model.intercept);
  p.labels = threshold(p.scores);
  return p;
}

std::vector<double> cv_accuracy(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::VectorXi& y,
                                const std::vector<FeatureKey>& keys, const std::vector<int>& folds, int n_folds,
                                const std::vector<GridCell>& grid, const LogregOptions& options) {
  if (static_cast<std::size_t>(X.cols()) != keys.size() || folds.size() != static_cast<std::size_t>(X.rows()))
    throw Error(ErrorKind::LengthMismatch, "cv_accuracy inputs disagree in size");
  std::vector<std::vector<double>> per_fold(static_cast<std::size_t>(n_folds));
  parallel_for(static_cast<std::size_t>(n_folds), [&](std::size_t f) {
    per_fold[f] = evaluate_split(X, y, rows_where(folds, static_cast<int>(f), false),
                                 rows_where(folds, static_cast<int>(f), true), grid, options);
  });
  std::vector<double> mean(grid.size(), 0.0);
  for (const auto& acc : per_fold)
    for (std::size_t c = 0; c < grid.size(); ++c) mean[c] += acc[c] / static_cast<double>(n_folds);
  return mean;
}

NestedCvResult nested_cv(const FeatureTable& train, const std::vector<SubjectRecord>& records,
                         const CvOptions& options) {
  if (static_cast<std::size_t>(train.rows()) != records.size())
    throw Error(ErrorKind::LengthMismatch, "feature table and metadata differ in length");
  const Eigen::VectorXi y = diagnosis_labels(records);
  const auto n_pos = y.count();
  const auto n_neg = y.size() - n_pos;
  const auto min_per_class = std::max(options.outer_folds, options.inner_folds);
  if (n_pos < min_per_class || n_neg < min_per_class)
    throw Error(ErrorKind::TooFewSubjects, "nested CV needs at least " + std::to_string(min_per_class) +
                                               " subjects per class (have " + std::to_string(n_pos) + " PD, " +
                                               std::to_string(n_neg) + " nonPD)");
  if (options.k_grid.empty() || options.l2_grid.empty())
    throw Error(ErrorKind::InvalidArgument, "hyperparameter grids must be nonempty");

  CvResult cv;
  for (int k : options.k_grid) {
    if (k < 1 || k > train.cols())
      throw Error(ErrorKind::KOutOfRange, "grid k = " + std::to_string(k) + " exceeds " + std::to_string(train.cols()) +
                                              " features");
    for (double l2 : options.l2_grid) cv.grid.push_back({k, l2});
  }
  const auto n_cells = cv.grid.size();
  const int n_outer = options.outer_folds;
  const int n_inner = options.inner_folds;
  cv.outer_fold = stratified_folds(records, options.strata, n_outer, options.seed);

  // Task (o, i) for i < n_inner is inner fold i within outer-train o; task
  // (o, n_inner) trains on all of outer-train o and scores outer fold o.
  struct Task {
    std::vector<std::size_t> train_rows, val_rows;
  };
  std::vector<Task> tasks;
  for (int o = 0; o < n_outer; ++o) {
    const auto outer_train = rows_where(cv.outer_fold, o, false);
    const auto inner_records = select_rows(records, outer_train);
    const auto inner_fold = stratified_folds(inner_records, options.strata, n_inner,
                                             derive_seed(options.seed, {static_cast<std::uint64_t>(o)}));
    for (int i = 0; i < n_inner; ++i) {
      Task t;
      for (std::size_t r = 0; r < outer_train.size(); ++r)
        (inner_fold[r] == i ? t.val_rows : t.train_rows).push_back(outer_train[r]);
      tasks.push_back(std::move(t));
    }
    tasks.push_back({outer_train, rows_where(cv.outer_fold, o, true)});
  }
  std::vector<std::vector<double>> task_acc(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    task_acc[t] = evaluate_split(train.values, y, tasks[t].train_rows, tasks[t].val_rows, cv.grid, options.logreg);
  });

  cv.outer_accuracy.resize(n_outer, static_cast<Eigen::Index>(n_cells));
  cv.inner_mean_accuracy = Eigen::MatrixXd::Zero(n_outer, static_cast<Eigen::Index>(n_cells));
  for (int o = 0; o < n_outer; ++o) {
    const auto base = static_cast<std::size_t>(o) * static_cast<std::size_t>(n_inner + 1);
    for (int i = 0; i < n_inner; ++i)
      for (std::size_t c = 0; c < n_cells; ++c)
        cv.inner_mean_accuracy(o, static_cast<Eigen::Index>(c)) += task_acc[base + static_cast<std::size_t>(i)][c] / n_inner;
    for (std::size_t c = 0; c < n_cells; ++c)
      cv.outer_accuracy(o, static_cast<Eigen::Index>(c)) = task_acc[base + static_cast<std::size_t>(n_inner)][c];
    std::vector<double> inner(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) inner[c] = cv.inner_mean_accuracy(o, static_cast<Eigen::Index>(c));
    cv.fold_selected.push_back(cv.grid[argbest(inner, cv.grid)]);
  }
  cv.mean_outer_accuracy.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) cv.mean_outer_accuracy[c] = cv.outer_accuracy.col(static_cast<Eigen::Index>(c)).mean();
  cv.best_cell = cv.grid[argbest(cv.mean_outer_accuracy, cv.grid)];

  std::vector<double> votes(n_cells, 0.0);
  for (const auto& sel : cv.fold_selected)
    votes[static_cast<std::size_t>(std::find(cv.grid.begin(), cv.grid.end(), sel) - cv.grid.begin())] += 1.0;
  cv.selected_cell = cv.grid[argbest(votes, cv.grid)];

  NestedCvResult result;
  result.model = fit_pipeline(train.values, y, train.keys, cv.selected_cell.k, cv.selected_cell.l2, options.logreg);
  result.cv = std::move(cv);
  return result;
}

}  // namespace eegfair
