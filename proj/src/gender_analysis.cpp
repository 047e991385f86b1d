#include "eegfair/gender_analysis.hpp"

#include "eegfair/error.hpp"
#include "eegfair/io.hpp"
#include "eegfair/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace eegfair {

namespace {

GenderModel retrain_one(Gender gender, const FeatureTable& table, const std::vector<SubjectRecord>& records,
                        const GenderRetrainOptions& options) {
  const auto rows = subgroup_filter(records, SubgroupPredicate{gender, std::nullopt, std::nullopt});
  const std::string who(to_string(gender));
  const auto sub = table.select_subjects(rows);
  const auto sub_records = select_rows(records, rows);
  const auto y_all = diagnosis_labels(sub_records);
  if (y_all.count() == 0 || y_all.count() == y_all.size())
    throw Error(ErrorKind::TooFewSubjects, who + " subset has a single diagnosis class");

  SplitSpec spec = options.split;
  spec.seed = derive_seed(options.seed, {gender == Gender::male ? 1u : 2u});
  const auto split = stratified_split(sub_records, spec);
  const auto train = sub.select_subjects(split.train);
  const auto train_records = select_rows(sub_records, split.train);
  const auto y = diagnosis_labels(train_records);
  if (train.rows() < 2 * options.n_folds || y.count() < 2 || y.count() > y.size() - 2)
    throw Error(ErrorKind::TooFewSubjects, who + " training subset too small for " +
                                               std::to_string(options.n_folds) + "-fold search");

  GenderModel out;
  out.gender = gender;
  out.train_ids = train.subject_ids;
  out.test_ids = sub.select_subjects(split.test).subject_ids;

  std::vector<GridCell> grid;
  for (int k : options.k_grid) grid.push_back({k, options.l2});
  const auto folds = stratified_folds(train_records, spec.strata, options.n_folds,
                                      derive_seed(options.seed, {gender == Gender::male ? 3u : 4u}));
  out.cv_accuracy = cv_accuracy(train.values, y, train.keys, folds, options.n_folds, grid, options.logreg);

  std::size_t best = 0;
  for (std::size_t c = 1; c < grid.size(); ++c) {
    if (out.cv_accuracy[c] > out.cv_accuracy[best] ||
        (out.cv_accuracy[c] == out.cv_accuracy[best] && preferred_over(grid[c], grid[best])))
      best = c;
  }
  out.k = grid[best].k;
  out.model = fit_pipeline(train.values, y, train.keys, out.k, options.l2, options.logreg);
  if (!split.test.empty()) {
    const auto test = sub.select_subjects(split.test);
    const auto pred = predict(out.model, test);
    out.test_accuracy = accuracy(diagnosis_labels(select_rows(sub_records, split.test)), pred.labels);
  }
  return out;
}

}  // namespace

GenderRetrainResult retrain_gender_models(const FeatureTable& table, const std::vector<SubjectRecord>& records,
                                          const GenderRetrainOptions& options) {
  if (static_cast<std::size_t>(table.rows()) != records.size())
    throw Error(ErrorKind::LengthMismatch, "table rows and records differ in length");
  GenderRetrainResult out;
  out.male = retrain_one(Gender::male, table, records, options);
  out.female = retrain_one(Gender::female, table, records, options);
  const auto& a = out.male.model.selected_keys;
  const auto& b = out.female.model.selected_keys;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.common_keys));
  return out;
}

bool RegionFilter::keeps(Channel c) const noexcept {
  if (is_midline(c) && !include_midline) return false;
  const auto r = channel_region(c);
  return (frontal && r == Region::frontal) || (parietal && r == Region::parietal);
}

GroupSummary summarize_group(const Eigen::Ref<const Eigen::VectorXd>& x) {
  GroupSummary s;
  s.n = static_cast<int>(x.size());
  if (s.n == 0) return s;
  s.mean = x.mean();
  s.sd = sample_sd(x);
  const double half = 1.96 * s.sd / std::sqrt(static_cast<double>(s.n));
  s.lo = s.mean - half;
  s.hi = s.mean + half;
  return s;
}

std::vector<GroupComparison> compare_common_features(const FeatureTable& table,
                                                     const std::vector<SubjectRecord>& records,
                                                     const std::vector<FeatureKey>& keys,
                                                     const CompareOptions& options) {
  if (static_cast<std::size_t>(table.rows()) != records.size())
    throw Error(ErrorKind::LengthMismatch, "table rows and records differ in length");
  std::vector<FeatureKey> kept;
  for (const auto& k : keys)
    if (options.regions.keeps(k.channel)) kept.push_back(k);
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) throw Error(ErrorKind::InvalidArgument, "no common keys left after the region filter");

  std::vector<GroupComparison> out;
  for (auto dx : {Diagnosis::PD, Diagnosis::nonPD}) {
    const auto males = subgroup_filter(records, SubgroupPredicate{Gender::male, dx, std::nullopt});
    const auto females = subgroup_filter(records, SubgroupPredicate{Gender::female, dx, std::nullopt});
    if (males.size() < 2 || females.size() < 2)
      throw Error(ErrorKind::GroupTooSmall, std::string(to_string(dx)) + " group needs two subjects per gender");
    const auto first = out.size();
    std::vector<double> pvals;
    for (const auto& key : kept) {
      const auto col = table.column_of(key);
      if (!col) throw Error(ErrorKind::MissingFeature, "feature " + key.name() + " not in table");
      Eigen::VectorXd m(static_cast<Eigen::Index>(males.size())), f(static_cast<Eigen::Index>(females.size()));
      for (std::size_t i = 0; i < males.size(); ++i)
        m[static_cast<Eigen::Index>(i)] = table.values(static_cast<Eigen::Index>(males[i]), *col);
      for (std::size_t i = 0; i < females.size(); ++i)
        f[static_cast<Eigen::Index>(i)] = table.values(static_cast<Eigen::Index>(females[i]), *col);
      GroupComparison g;
      g.key = key;
      g.diagnosis = dx;
      g.male = summarize_group(m);
      g.female = summarize_group(f);
      g.test = ttest_two_sample(m, f, options.mode);
      g.significant_raw = g.test.p < options.alpha;
      pvals.push_back(g.test.p);
      out.push_back(g);
    }
    const auto flags = bh_fdr(pvals, options.q);
    for (std::size_t i = 0; i < flags.size(); ++i) out[first + i].significant_fdr = flags[i];
  }
  return out;
}

std::string table3_csv(const std::vector<GroupComparison>& rows) {
  std::string out =
      "diagnosis,channel,band,gender,n,mean,sd,ci_lo,ci_hi,t,df,p,significant_raw,significant_fdr\n";
  for (const auto& r : rows) {
    for (auto g : {Gender::male, Gender::female}) {
      const auto& s = g == Gender::male ? r.male : r.female;
      out += std::string(to_string(r.diagnosis)) + ',' + std::string(channel_label(r.key.channel)) + ',' +
             std::string(band_token(r.key.band)) + ',' + std::string(to_string(g)) + ',' + std::to_string(s.n) +
             ',' + format_double(s.mean) + ',' + format_double(s.sd) + ',' + format_double(s.lo) + ',' +
             format_double(s.hi) + ',' + format_double(r.test.t) + ',' + format_double(r.test.df) + ',' +
             format_double(r.test.p) + ',' + (r.significant_raw ? "true" : "false") + ',' +
             (r.significant_fdr ? "true" : "false") + '\n';
    }
  }
  return out;
}

}  // namespace eegfair
