#include "eegfair/bootstrap.hpp"

#include "eegfair/error.hpp"
#include "eegfair/io.hpp"
#include "eegfair/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace eegfair {

std::vector<std::size_t> stratified_resample(const std::vector<std::size_t>& indices,
                                             const std::vector<std::string>& strata, Rng& rng) {
  if (indices.size() != strata.size()) throw Error(ErrorKind::LengthMismatch, "indices and strata differ in length");
  if (indices.empty()) throw Error(ErrorKind::EmptyStratum, "nothing to resample");
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < indices.size(); ++i) groups[strata[i]].push_back(indices[i]);
  std::vector<std::size_t> out;
  out.reserve(indices.size());
  for (const auto& [label, members] : groups)
    for (std::size_t d = 0; d < members.size(); ++d) out.push_back(members[rng.below(members.size())]);
  return out;
}

std::string_view to_string(AuditGroup g) noexcept {
  switch (g) {
    case AuditGroup::mixed: return "mixed";
    case AuditGroup::males: return "males";
    case AuditGroup::females: return "females";
  }
  return "";
}

const AuditCell* AuditReport::find(AuditGroup group, const std::string& scope) const {
  for (const auto& c : cells)
    if (c.group == group && c.scope == scope) return &c;
  return nullptr;
}

MetricSummary summarize_replicates(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.lo = s.mean - kCiZ * sd;
  s.hi = s.mean + kCiZ * sd;
  return s;
}

double round_half_up(double x) { return std::floor(x + 0.5); }

namespace {

struct CellDef {
  AuditGroup group;
  std::string scope;
  std::vector<std::size_t> members;  // test-set positions
};

bool in_group(AuditGroup g, const SubjectRecord& r) {
  return g == AuditGroup::mixed || (g == AuditGroup::males) == (r.gender == Gender::male);
}

struct ReplicateCell {
  MetricSet metrics;
  ConfusionMatrix cm;
};

ReplicateCell evaluate(const std::vector<std::size_t>& sample, const Predictions& pred, const Eigen::VectorXi& y_true) {
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::VectorXi yt(n), yp(n);
  Eigen::VectorXd sc(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto s = static_cast<Eigen::Index>(sample[static_cast<std::size_t>(i)]);
    yt[i] = y_true[s];
    yp[i] = pred.labels[s];
    sc[i] = pred.scores[s];
  }
  return {compute_metrics(yt, yp, sc), confusion_matrix(yt, yp)};
}

}  // namespace

AuditReport bootstrap_audit(const Predictions& predictions, const std::vector<SubjectRecord>& records,
                            const std::vector<std::string>& subject_ids, const BootstrapSpec& spec) {
  const auto n = records.size();
  if (static_cast<std::size_t>(predictions.scores.size()) != n ||
      static_cast<std::size_t>(predictions.labels.size()) != n || subject_ids.size() != n)
    throw Error(ErrorKind::LengthMismatch, "predictions and metadata differ in length");
  if (spec.n_replicates < 1) throw Error(ErrorKind::InvalidArgument, "need at least one replicate");
  if (n == 0) throw Error(ErrorKind::EmptyCell, "empty test set");

  AuditReport report;
  report.n_replicates = spec.n_replicates;
  report.seed = spec.seed;
  report.subject_ids = subject_ids;
  report.y_true = diagnosis_labels(records);
  report.y_pred = predictions.labels;
  report.scores = predictions.scores;

  std::vector<std::string> scopes{"global"};
  for (const auto& c : center_labels(records)) scopes.push_back(c);
  std::vector<CellDef> defs;
  for (auto g : {AuditGroup::mixed, AuditGroup::males, AuditGroup::females})
    for (const auto& scope : scopes) {
      CellDef d{g, scope, {}};
      for (std::size_t i = 0; i < n; ++i)
        if (in_group(g, records[i]) && (scope == "global" || records[i].center == scope)) d.members.push_back(i);
      if (!d.members.empty()) defs.push_back(std::move(d));
    }

  const auto strata = stratum_labels(records, spec.strata);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  // replicate x cell
  std::vector<std::vector<ReplicateCell>> results(static_cast<std::size_t>(spec.n_replicates));
  parallel_for(results.size(), [&](std::size_t r) {
    auto& row = results[r];
    row.reserve(defs.size());
    std::vector<std::size_t> sample = all;
    if (spec.resample && !spec.restratify_per_cell) {
      Rng rng(derive_seed(spec.seed, {r}));
      sample = stratified_resample(all, strata, rng);
    }
    for (std::size_t c = 0; c < defs.size(); ++c) {
      std::vector<std::size_t> members;
      if (spec.resample && spec.restratify_per_cell) {
        Rng rng(derive_seed(spec.seed, {r, c + 1}));
        members = stratified_resample(defs[c].members, select_rows(strata, defs[c].members), rng);
      } else {
        for (auto s : sample)
          if (std::binary_search(defs[c].members.begin(), defs[c].members.end(), s)) members.push_back(s);
      }
      row.push_back(evaluate(members, predictions, report.y_true));
    }
  });

  const double reps = static_cast<double>(spec.n_replicates);
  for (std::size_t c = 0; c < defs.size(); ++c) {
    AuditCell cell;
    cell.group = defs[c].group;
    cell.scope = defs[c].scope;
    for (auto m : defs[c].members) (records[m].gender == Gender::male ? cell.n_male : cell.n_female) += 1;
    for (std::size_t k = 0; k < 6; ++k) {
      cell.replicate_values[k].reserve(results.size());
      for (const auto& row : results) cell.replicate_values[k].push_back(row[c].metrics.as_array()[k]);
      cell.metrics[k] = summarize_replicates(cell.replicate_values[k]);
    }
    for (const auto& row : results) {
      cell.confusion_mean.tp += row[c].cm.tp / reps;
      cell.confusion_mean.fp += row[c].cm.fp / reps;
      cell.confusion_mean.tn += row[c].cm.tn / reps;
      cell.confusion_mean.fn += row[c].cm.fn / reps;
    }
    cell.confusion_rounded = {round_half_up(cell.confusion_mean.tp), round_half_up(cell.confusion_mean.fp),
                              round_half_up(cell.confusion_mean.tn), round_half_up(cell.confusion_mean.fn)};
    cell.rates = error_rates(cell.confusion_mean);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

AuditReport bootstrap_audit(const TrainedModel& model, const FeatureTable& test,
                            const std::vector<SubjectRecord>& records, const BootstrapSpec& spec) {
  return bootstrap_audit(predict(model, test), records, test.subject_ids, spec);
}

namespace {

std::string format_number(double v, bool is_auc) {
  char buf[64];
  if (is_auc) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.1f", v);
  std::string s = buf;
  if (s == "100.0" || s == "-100.0") s.resize(s.size() - 2);
  return s;
}

double display_scale(std::size_t metric) { return metric == 5 ? 1.0 : 100.0; }

std::string row_prefix(const AuditCell& c) {
  return std::string(to_string(c.group)) + ',' + c.scope + ',' + std::to_string(c.n_female) + ',' +
         std::to_string(c.n_male);
}

}  // namespace

std::string format_metric(const MetricSummary& s, bool is_auc) {
  const double k = is_auc ? 1.0 : 100.0;
  return format_number(s.mean * k, is_auc) + " [" + format_number(s.lo * k, is_auc) + " " +
         format_number(s.hi * k, is_auc) + "]";
}

std::string table2_csv(const AuditReport& report) {
  std::string out = "group,scope,n_female,n_male";
  for (auto name : MetricSet::names) {
    out += ',' + std::string(name) + ',' + std::string(name) + "_lo," + std::string(name) + "_hi";
  }
  out += '\n';
  for (const auto& c : report.cells) {
    out += row_prefix(c);
    for (std::size_t m = 0; m < 6; ++m) {
      const double k = display_scale(m);
      out += ',' + format_double(c.metrics[m].mean * k) + ',' + format_double(c.metrics[m].lo * k) + ',' +
             format_double(c.metrics[m].hi * k);
    }
    out += '\n';
  }
  return out;
}

std::string table2_display_csv(const AuditReport& report) {
  std::string out = "group,scope,n_female,n_male";
  for (auto name : MetricSet::names) out += ',' + std::string(name);
  out += '\n';
  for (const auto& c : report.cells) {
    out += row_prefix(c);
    for (std::size_t m = 0; m < 6; ++m) out += ',' + format_metric(c.metrics[m], m == 5);
    out += '\n';
  }
  return out;
}

}  // namespace eegfair
