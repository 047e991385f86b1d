// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
#include "eegfair/bootstrap.hpp"
#include "eegfair/combat.hpp"
#include "eegfair/filter.hpp"
#include "eegfair/io.hpp"
#include "eegfair/logreg.hpp"
#include "eegfair/pipeline.hpp"
#include "eegfair/psd.hpp"
#include "eegfair/staging.hpp"
#include "eegfair/stats.hpp"
#include "eegfair/synth.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

using namespace eegfair;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// 1 ---------------------------------------------------------------------------
Outcome band_partition() {
  Rng rng(101);
  double worst_sum = 0, worst_theta = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double res = std::array<double, 4>{0.2, 0.25, 0.5, 1.0}[rng.below(4)];
    const auto n = static_cast<Eigen::Index>(std::ceil(64.0 / res)) + 1;
    PsdEstimate psd;
    psd.resolution_hz = res;
    psd.freqs_hz = Eigen::VectorXd::LinSpaced(n, 0, res * static_cast<double>(n - 1));
    psd.power.resize(n);
    for (auto& v : psd.power) v = std::exp(3.0 * rng.normal());
    const auto fr = band_fractions(psd);  // delta, theta, slow, fast, alpha, beta
    worst_sum = std::max(worst_sum, std::abs(fr[0] + fr[1] + fr[4] + fr[5] - 1.0));
    worst_theta = std::max(worst_theta, std::abs(fr[2] + fr[3] - fr[1]));
  }
  return {worst_sum <= 1e-9 && worst_theta <= 1e-9,
          fmt("max |sum-1| = %.2e, max |slow+fast-theta| = %.2e", worst_sum, worst_theta)};
}

// 2 ---------------------------------------------------------------------------
SynthConfig twenty_subjects(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  for (const char* name : {"Alpha", "Beta"}) {
    SynthCenter c;
    c.name = name;
    c.n_pd = c.n_nonpd = 5;
    c.n_pd_female = c.n_nonpd_female = 2;
    cfg.centers.push_back(c);
  }
  return cfg;
}

Outcome spectral_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  SignalConfig sig;
  sig.seed = 202;
  const auto s = generate_signals(twenty_subjects(201), sig);
  double worst = 0;
  for (std::size_t i = 0; i < s.epochs.size(); ++i) {
    const auto f = extract_features(s.epochs[i], sig.spectral);
    for (auto c : all_channels()) {
      const auto t = targets_from_features(s.features.table, static_cast<Eigen::Index>(i), c);
      const std::array<std::pair<Band, double>, 6> expected = {
          {{Band::delta, t[0]}, {Band::theta, t[1] + t[2]}, {Band::slow_theta, t[1]},
           {Band::fast_theta, t[2]}, {Band::alpha, t[3]}, {Band::beta, t[4]}}};
      for (const auto& [band, target] : expected) {
        const double got = std::pow(10.0, f[static_cast<Eigen::Index>(FeatureKey{c, band}.canonical_index())]);
        worst = std::max(worst, std::abs(got - target));
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::array<SubBandTargets, kNumChannels> equal;
  equal.fill(SubBandTargets{0.25, 0.125, 0.125, 0.25, 0.25});
  double worst_equal = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = extract_features(synthesize_epochs("eq", equal, sig, seed), sig.spectral);
    for (auto c : all_channels())
      for (auto b : {Band::delta, Band::theta, Band::alpha, Band::beta})
        worst_equal = std::max(
            worst_equal, std::abs(std::pow(10.0, f[static_cast<Eigen::Index>(FeatureKey{c, b}.canonical_index())]) - 0.25));
  }
  return {worst <= 0.02 && worst_equal <= 0.03 && seconds < 30.0,
          fmt("max error %.4f (20 subj x 29 ch x 10 ep), ", worst) + fmt("equal-target %.4f, %.1f s", worst_equal, seconds)};
}

// 3 ---------------------------------------------------------------------------
Outcome scale_invariance() {
  SignalConfig sig;
  sig.seed = 303;
  sig.n_epochs = 4;
  auto cfg = twenty_subjects(301);
  cfg.centers[0].n_pd = cfg.centers[0].n_nonpd = 2;
  cfg.centers[0].n_pd_female = cfg.centers[0].n_nonpd_female = 1;
  cfg.centers[1] = cfg.centers[0];
  cfg.centers[1].name = "Beta";
  const auto s = generate_signals(cfg, sig);
  double worst = 0;
  for (const auto& e : s.epochs) {
    EpochSet big = e;
    for (auto& m : big.data) m *= 1e3;
    for (bool filtered : {false, true}) {
      const auto prep = [&](const EpochSet& x) { return filtered ? lowpass(highpass(x, 1.0), 30.0) : x; };
      const Eigen::VectorXd a = extract_features(prep(e)), b = extract_features(prep(big));
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-9, fmt("max feature change %.2e over filtered and unfiltered paths", worst)};
}

// 4 ---------------------------------------------------------------------------
Outcome combat_direct() {
  Rng rng(404);
  const std::vector<std::string> centers{"C1", "C2", "C3", "C4"};
  const std::map<std::string, std::pair<double, double>> batch{
      {"C1", {2.0, 1.0}}, {"C2", {-2.0, 1.5}}, {"C3", {2.0, 1.5}}, {"C4", {-2.0, 1.0}}};
  const auto recs = testutil::balanced_cohort(centers, 12, rng);
  const auto n = static_cast<Eigen::Index>(recs.size());
  const Eigen::Index p = 20;
  const double dx_effect = 1.0;
  Eigen::MatrixXd x = testutil::random_matrix(rng, n, p) * 0.1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = recs[static_cast<std::size_t>(i)];
    const auto [shift, scale] = batch.at(r.center);
    x.row(i) = (x.row(i).array() * scale + shift + (r.is_pd() ? dx_effect : 0.0) + 0.01 * r.age_years +
                (r.gender == Gender::male ? 0.3 : 0.0))
                   .matrix();
  }
  FeatureTable t;
  for (const auto& r : recs) t.subject_ids.push_back(r.subject_id);
  const auto all = all_feature_keys();
  t.keys.assign(all.begin(), all.begin() + p);
  t.values = x;
  CombatOptions opt;
  opt.mode = CombatMode::direct;
  const auto model = fit_combat(t, recs, opt);
  const auto h = apply_combat(model, t, recs);

  // Residuals after removing the fitted covariate part, per batch.
  const Eigen::MatrixXd cov = covariate_matrix(recs, model.covariates);
  const Eigen::MatrixXd resid = (h.values - cov * model.covariate_coeffs).rowwise() - model.grand_mean.transpose();
  double gap = 0, ratio = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> means, vars;
    for (const auto& c : centers) {
      std::vector<double> v;
      for (Eigen::Index i = 0; i < n; ++i)
        if (recs[static_cast<std::size_t>(i)].center == c) v.push_back(resid(i, j));
      const Eigen::Map<const Eigen::VectorXd> vm(v.data(), static_cast<Eigen::Index>(v.size()));
      means.push_back(vm.mean());
      vars.push_back(sample_variance(vm));
    }
    gap = std::max(gap, *std::max_element(means.begin(), means.end()) - *std::min_element(means.begin(), means.end()));
    ratio = std::max(ratio, *std::max_element(vars.begin(), vars.end()) / *std::min_element(vars.begin(), vars.end()) - 1.0);
  }

  // Diagnosis effect re-estimated on harmonized data by ordinary least squares.
  Eigen::MatrixXd design(n, 4);
  design.col(0).setOnes();
  design.rightCols(3) = cov;
  const Eigen::MatrixXd beta = design.colPivHouseholderQr().solve(h.values);
  const double dx_worst = (beta.row(1).array() / dx_effect - 1.0).abs().maxCoeff();
  return {gap < 1e-9 && ratio <= 1e-6 && dx_worst <= 0.05,
          fmt("residual mean gap %.2e, variance ratio - 1 = %.2e, ", gap, ratio) +
              fmt("diagnosis effect off by %.2f%%", 100 * dx_worst)};
}

// 5 ---------------------------------------------------------------------------
Outcome logreg_checks() {
  Rng rng(505);
  double worst_grad = 0;
  int nonmonotone = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto n = 20 + static_cast<Eigen::Index>(rng.below(60));
    const auto p = 1 + static_cast<Eigen::Index>(rng.below(10));
    const Eigen::MatrixXd X = testutil::random_matrix(rng, n, p);
    Eigen::VectorXi y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = i < 2 ? static_cast<int>(i) : X(i, 0) + rng.normal() > 0;
    const Eigen::VectorXd w = testutil::random_matrix(rng, p, 1);
    const double b = rng.normal(), l2 = std::pow(10.0, -2.0 + 3.0 * rng.uniform());
    const auto obj = logreg_objective(X, y, w, b, l2);
    const double h = 1e-5;
    for (Eigen::Index j = 0; j <= p; ++j) {
      Eigen::VectorXd wp = w, wm = w;
      double bp = b, bm = b;
      if (j < p) wp[j] += h, wm[j] -= h;
      else bp += h, bm -= h;
      const double fd = (logreg_objective(X, y, wp, bp, l2).value - logreg_objective(X, y, wm, bm, l2).value) / (2 * h);
      worst_grad = std::max(worst_grad, std::abs(fd - (j < p ? obj.grad_w[j] : obj.grad_b)));
    }
    const auto fit = fit_logreg(X, y, l2);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
      nonmonotone += fit.objective_trace[i] > fit.objective_trace[i - 1];
  }
  return {worst_grad < 1e-6 && nonmonotone == 0,
          fmt("max |analytic - FD| = %.2e, objective increases: %.0f", worst_grad, nonmonotone)};
}

// 6 ---------------------------------------------------------------------------
std::vector<bool> bh_oracle(const std::vector<double>& p, double q) {
  std::vector<double> s = p;
  std::sort(s.begin(), s.end());
  const auto m = static_cast<double>(p.size());
  double cut = -1;
  for (std::size_t k = s.size(); k >= 1; --k)
    if (s[k - 1] <= static_cast<double>(k) / m * q) {
      cut = s[k - 1];
      break;
    }
  std::vector<bool> out;
  for (double v : p) out.push_back(v <= cut);
  return out;
}

Outcome statistic_identities() {
  Rng rng(606);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto n = 6 + static_cast<Eigen::Index>(rng.below(40));
    const Eigen::MatrixXd X = testutil::random_matrix(rng, n, 1) * (1 + rng.uniform() * 5);
    Eigen::VectorXi y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = i < 3 ? 0 : i < 6 ? 1 : static_cast<int>(rng.below(2));
    std::vector<double> a, b;
    for (Eigen::Index i = 0; i < n; ++i) (y[i] ? b : a).push_back(X(i, 0));
    const auto t = ttest_two_sample(Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())),
                                    Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
    const double f = anova_f_scores(X, y)[0];
    worst = std::max(worst, std::abs(f - t.t * t.t) / std::max(1.0, f));
  }
  int mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> p(1 + rng.below(30));
    for (auto& v : p) v = rng.uniform() < 0.4 ? std::pow(rng.uniform(), 4) * 0.05 : rng.uniform();
    const double q = rep % 2 ? 0.05 : 0.1;
    mismatches += bh_fdr(p, q) != bh_oracle(p, q);
  }
  return {worst <= 1e-10 && mismatches == 0,
          fmt("max |F - t^2| (rel) = %.2e, BH mismatches %.0f / 1000", worst, mismatches)};
}

// 7, 8 ------------------------------------------------------------------------
struct AuditFixture {
  std::vector<SubjectRecord> records;
  Predictions predictions;
  std::vector<std::string> ids;
};

AuditFixture reference_test_set(std::uint64_t seed) {
  auto cfg = SynthConfig::reference_cohort();
  cfg.seed = seed;
  const auto d = generate_features(cfg);
  SplitSpec spec;
  spec.seed = seed;
  const auto split = stratified_split(d.records, spec);
  AuditFixture f;
  f.records = select_rows(d.records, split.test);
  Rng rng(seed + 1);
  const auto n = static_cast<Eigen::Index>(f.records.size());
  f.predictions.scores.resize(n);
  f.predictions.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = f.records[static_cast<std::size_t>(i)];
    const bool always_right = r.center == "Turku" && r.gender == Gender::male;
    const bool right = always_right || rng.uniform() < 0.7;
    const int label = right == r.is_pd() ? 1 : 0;
    f.predictions.labels[i] = label;
    f.predictions.scores[i] = label ? 0.5 + 0.5 * rng.uniform() : 0.5 * rng.uniform();
    f.ids.push_back(r.subject_id);
  }
  return f;
}

std::string display_cell(const std::string& csv, const std::string& prefix, int column) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string c;
      while (std::getline(ls, c, ',')) cells.push_back(c);
      return column < static_cast<int>(cells.size()) ? cells[static_cast<std::size_t>(column)] : "";
    }
  return "";
}

Outcome bootstrap_contract() {
  const auto f = reference_test_set(707);
  BootstrapSpec spec;
  spec.seed = 708;
  const auto report = bootstrap_audit(f.predictions, f.records, f.ids, spec);

  // Replicates are drawn exactly as the audit draws them.
  const auto strata = stratum_labels(f.records, spec.strata);
  std::map<std::string, std::size_t> sizes;
  for (const auto& s : strata) sizes[s]++;
  std::vector<std::size_t> all(f.records.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  int count_violations = 0;
  for (int r = 0; r < spec.n_replicates; ++r) {
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(r)}));
    std::map<std::string, std::size_t> got;
    for (auto i : stratified_resample(all, strata, rng)) got[strata[i]]++;
    count_violations += got != sizes;
  }
  // Every cell is a union of strata, so its class totals never move.
  double class_drift = 0;
  for (const auto& c : report.cells) {
    double pd = 0, n = 0;
    for (std::size_t i = 0; i < f.records.size(); ++i) {
      const auto& r = f.records[i];
      const bool in_group = c.group == AuditGroup::mixed || (c.group == AuditGroup::males) == (r.gender == Gender::male);
      if (in_group && (c.scope == "global" || c.scope == r.center)) n += 1, pd += r.is_pd();
    }
    class_drift = std::max(class_drift, std::abs(c.confusion_mean.tp + c.confusion_mean.fn - pd));
    class_drift = std::max(class_drift, std::abs(c.confusion_mean.total() - n));
  }
  double ci_err = 0;
  for (const auto& c : report.cells)
    for (std::size_t k = 0; k < 6; ++k) {
      const auto& v = c.replicate_values[k];
      const Eigen::Map<const Eigen::VectorXd> vm(v.data(), static_cast<Eigen::Index>(v.size()));
      const double mean = vm.mean(), sd = std::sqrt(sample_variance(vm));
      ci_err = std::max({ci_err, std::abs(c.metrics[k].mean - mean), std::abs(c.metrics[k].lo - (mean - 1.96 * sd)),
                         std::abs(c.metrics[k].hi - (mean + 1.96 * sd))});
    }
  const auto shown = display_cell(table2_display_csv(report), "males,Turku,", 4);
  return {count_violations == 0 && class_drift < 1e-9 && ci_err <= 1e-12 && shown == "100 [100 100]",
          fmt("stratum-count violations %.0f, CI error %.1e, ", count_violations, ci_err) + "Turku males accuracy \"" +
              shown + "\""};
}

Outcome metric_conventions() {
  std::vector<SubjectRecord> recs;
  for (int i = 0; i < 6; ++i) recs.push_back(testutil::record("if" + std::to_string(i), "IowaCity", Diagnosis::nonPD, Gender::female));
  for (int i = 0; i < 8; ++i)
    recs.push_back(testutil::record("im" + std::to_string(i), "IowaCity", i % 2 ? Diagnosis::PD : Diagnosis::nonPD, Gender::male));
  Predictions p;
  p.labels = Eigen::VectorXi::Zero(14);
  p.scores = Eigen::VectorXd::Constant(14, 0.2);
  for (int i = 6; i < 14; ++i) p.labels[i] = recs[static_cast<std::size_t>(i)].is_pd(), p.scores[i] = p.labels[i] ? 0.9 : 0.1;
  std::vector<std::string> ids;
  for (const auto& r : recs) ids.push_back(r.subject_id);
  BootstrapSpec spec;
  spec.seed = 808;
  const auto report = bootstrap_audit(p, recs, ids, spec);
  const auto csv = table2_display_csv(report);
  const auto recall = display_cell(csv, "females,IowaCity,", 5);
  const auto precision = display_cell(csv, "females,IowaCity,", 7);
  const auto auc = display_cell(csv, "females,IowaCity,", 9);
  return {recall == "0.0 [0.0 0.0]" && precision == "0.0 [0.0 0.0]" && auc == "0.50 [0.50 0.50]",
          "recall \"" + recall + "\", precision \"" + precision + "\", AUC \"" + auc + "\""};
}

// 9, 10, 12 -------------------------------------------------------------------
RunConfig feature_level_run(std::uint64_t seed, const fs::path& dir, double male, double female) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.paths.output_dir = dir;
  cfg.paths.features = "synth_features.csv";
  cfg.synth_signals = false;
  cfg.synth.effect_size_male = male;
  cfg.synth.effect_size_female = female;
  cfg.staging.conversion = {1.0, 7.0};
  cfg.conversion_configured = true;
  return cfg;
}

nlohmann::json global_cell(const nlohmann::json& audit, const std::string& group) {
  for (const auto& c : audit.at("cells"))
    if (c.at("group") == group && c.at("scope") == "global") return c;
  throw Error(ErrorKind::EmptyCell, "no global cell for " + group);
}

nlohmann::json run_audit(const RunConfig& cfg) {
  fs::create_directories(cfg.paths.output_dir);
  cmd_synth(cfg);
  cmd_harmonize(cfg);
  cmd_audit(cfg, true);
  return nlohmann::json::parse(read_text_file(cfg.resolve("audit.json")));
}

Outcome disparity() {
  testutil::TempDir dir("accept9");
  int gap_hits = 0, type2_hits = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto audit = run_audit(feature_level_run(seed, dir.path() / std::to_string(seed), 2.0, 0.4));
    const auto m = global_cell(audit, "males"), f = global_cell(audit, "females");
    const double gap = m.at("metrics").at("accuracy").at("mean").get<double>() -
                       f.at("metrics").at("accuracy").at("mean").get<double>();
    const double t2m = m.at("type2").get<double>(), t2f = f.at("type2").get<double>();
    gap_hits += gap >= 0.10;
    type2_hits += t2f > t2m;
    detail += fmt(" [gap %.1f", 100 * gap) + fmt(", II %.0f/%.0f]", 100 * t2m, 100 * t2f);
  }
  return {gap_hits >= 4 && type2_hits >= 4,
          fmt("gap >= 10 pts in %.0f/5, female type II > male in %.0f/5:", gap_hits, type2_hits) + detail};
}

Outcome null_control() {
  testutil::TempDir dir("accept10");
  int covered = 0;
  std::string detail;
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    const auto audit = run_audit(feature_level_run(seed, dir.path() / std::to_string(seed), 0.0, 0.0));
    const auto acc = global_cell(audit, "mixed").at("metrics").at("accuracy");
    const double lo = acc.at("lo"), hi = acc.at("hi");
    covered += lo <= 0.5 && 0.5 <= hi;
    detail += fmt(" [%.1f, ", 100 * lo) + fmt("%.1f]", 100 * hi);
  }
  return {covered >= 4, fmt("CI contains 50%% in %.0f/5:", covered) + detail};
}

// 11 --------------------------------------------------------------------------
Outcome staging_boundaries() {
  const StagingRules rules;
  const bool ok = trichotomize(20, rules.updrs) == Stage::onset && trichotomize(35, rules.updrs) == Stage::severe &&
                  trichotomize(50, rules.duration) == Stage::onset &&
                  trichotomize(100, rules.duration) == Stage::severe &&
                  trichotomize(std::nextafter(20.0, 99.0), rules.updrs) == Stage::mild &&
                  trichotomize(std::nextafter(35.0, 0.0), rules.updrs) == Stage::mild &&
                  trichotomize(std::nextafter(50.0, 99.0), rules.duration) == Stage::mild &&
                  trichotomize(std::nextafter(100.0, 0.0), rules.duration) == Stage::mild;
  return {ok, "UPDRS 20 onset, 35 severe; duration 50 onset, 100 severe; neighbours mild"};
}

// 12 --------------------------------------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_text_file(e.path());
  return out;
}

Outcome determinism() {
  testutil::TempDir dir("accept12");
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"first", "second"}) {
    RunConfig cfg;
    cfg.seed = 1212;
    cfg.paths.output_dir = dir.path() / name;
    cfg.synth.centers.resize(3);
    for (auto& c : cfg.synth.centers) {
      c.n_pd = c.n_nonpd = 8;
      c.n_pd_female = c.n_nonpd_female = 4;
      c.n_missing_duration_female = 0;
    }
    cfg.signal.n_epochs = 3;
    cfg.cv.k_grid = {10, 50, 203};
    cfg.cv.l2_grid = {0.1, 1.0};
    cfg.gender_k_grid = {10, 50};
    cfg.bootstrap.n_replicates = 30;
    cfg.staging.conversion = {1.0, 7.0};
    cfg.conversion_configured = true;
    fs::create_directories(cfg.paths.output_dir);
    cmd_synth(cfg);
    cmd_extract(cfg);
    cmd_harmonize(cfg);
    cmd_train(cfg);
    cmd_audit(cfg);
    runs.push_back(snapshot(cfg.paths.output_dir));
  }
  int differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    differing += it == runs[1].end() || it->second != bytes;
  }
  differing += static_cast<int>(runs[1].size()) - static_cast<int>(runs[0].size());
  return {differing == 0 && runs[0].size() > 20,
          fmt("%.0f files compared, %.0f differ", static_cast<double>(runs[0].size()), differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"band partition", band_partition},
      {"spectral round trip", spectral_round_trip},
      {"scale invariance", scale_invariance},
      {"ComBat direct-mode exactness", combat_direct},
      {"optimization correctness", logreg_checks},
      {"statistic identities", statistic_identities},
      {"bootstrap contract", bootstrap_contract},
      {"metric conventions", metric_conventions},
      {"end-to-end disparity", disparity},
      {"null control", null_control},
      {"staging boundaries", staging_boundaries},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %-30s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
