#include "eegfair/serialization.hpp"

#include "eegfair/error.hpp"

namespace eegfair {

namespace {

Json keys_json(const std::vector<FeatureKey>& keys) {
  Json a = Json::array();
  for (const auto& k : keys) a.push_back(k.name());
  return a;
}

std::vector<FeatureKey> keys_from_json(const Json& j) {
  std::vector<FeatureKey> out;
  for (const auto& s : j) out.push_back(parse_feature_key(s.get<std::string>()));
  return out;
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed ") + what + ": " + e.what());
  }
}

Json confusion(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

Json grid_cell(const GridCell& c) { return {{"k", c.k}, {"l2", c.l2}}; }

Json metric_block(const AuditCell& c) {
  Json m;
  for (std::size_t i = 0; i < MetricSet::names.size(); ++i)
    m[std::string(MetricSet::names[i])] = {
        {"mean", c.metrics[i].mean}, {"lo", c.metrics[i].lo}, {"hi", c.metrics[i].hi}};
  return m;
}

Json cell_header(const AuditCell& c) {
  return {{"group", std::string(to_string(c.group))},
          {"scope", c.scope},
          {"n_female", c.n_female},
          {"n_male", c.n_male}};
}

}  // namespace

Json to_json_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json_vector(m.row(r).transpose()));
  return a;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  return guarded("vector", [&] {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
    return v;
  });
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& row = j.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(row.size()) != cols)
        throw Error(ErrorKind::InvalidArgument, "ragged matrix in JSON");
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
  });
}

Json to_json(const HarmonizationModel& m) {
  Json covs = Json::array();
  for (auto c : m.covariates.columns) covs.push_back(std::string(to_string(c)));
  return {{"mode", std::string(to_string(m.mode))},
          {"batches", m.batch_labels},
          {"covariates", covs},
          {"keys", keys_json(m.keys)},
          {"grand_mean", to_json_vector(m.grand_mean)},
          {"covariate_coeffs", to_json_matrix(m.covariate_coeffs)},
          {"pooled_sd", to_json_vector(m.pooled_sd)},
          {"gamma_hat", to_json_matrix(m.gamma_hat)},
          {"delta_hat", to_json_matrix(m.delta_hat)},
          {"gamma_star", to_json_matrix(m.gamma_star)},
          {"delta_star", to_json_matrix(m.delta_star)},
          {"gamma_bar", to_json_vector(m.gamma_bar)},
          {"tau2", to_json_vector(m.tau2)},
          {"a_prior", to_json_vector(m.a_prior)},
          {"b_prior", to_json_vector(m.b_prior)},
          {"eb_iterations", m.eb_iterations}};
}

HarmonizationModel harmonization_model_from_json(const Json& j) {
  return guarded("harmonization model", [&] {
    HarmonizationModel m;
    m.mode = parse_combat_mode(j.at("mode").get<std::string>());
    m.batch_labels = j.at("batches").get<std::vector<std::string>>();
    m.covariates.columns.clear();
    for (const auto& c : j.at("covariates")) m.covariates.columns.push_back(parse_covariate(c.get<std::string>()));
    m.keys = keys_from_json(j.at("keys"));
    m.grand_mean = vector_from_json(j.at("grand_mean"));
    m.covariate_coeffs = matrix_from_json(j.at("covariate_coeffs"));
    if (m.covariate_coeffs.rows() == 0) m.covariate_coeffs.resize(0, static_cast<Eigen::Index>(m.keys.size()));
    m.pooled_sd = vector_from_json(j.at("pooled_sd"));
    m.gamma_hat = matrix_from_json(j.at("gamma_hat"));
    m.delta_hat = matrix_from_json(j.at("delta_hat"));
    m.gamma_star = matrix_from_json(j.at("gamma_star"));
    m.delta_star = matrix_from_json(j.at("delta_star"));
    m.gamma_bar = vector_from_json(j.at("gamma_bar"));
    m.tau2 = vector_from_json(j.at("tau2"));
    m.a_prior = vector_from_json(j.at("a_prior"));
    m.b_prior = vector_from_json(j.at("b_prior"));
    m.eb_iterations = j.at("eb_iterations").get<int>();
    const auto p = static_cast<Eigen::Index>(m.keys.size());
    const auto nb = static_cast<Eigen::Index>(m.batch_labels.size());
    if (m.grand_mean.size() != p || m.pooled_sd.size() != p || m.gamma_star.rows() != nb ||
        m.gamma_star.cols() != p || m.delta_star.rows() != nb || m.delta_star.cols() != p ||
        m.covariate_coeffs.rows() != static_cast<Eigen::Index>(m.covariates.columns.size()) ||
        m.covariate_coeffs.cols() != p)
      throw Error(ErrorKind::InvalidArgument, "harmonization model dimensions disagree");
    return m;
  });
}

Json to_json(const TrainedModel& m) {
  return {{"selected_keys", keys_json(m.selected_keys)},
          {"scaler_mean", to_json_vector(m.scaler_mean)},
          {"scaler_sd", to_json_vector(m.scaler_sd)},
          {"weights", to_json_vector(m.weights)},
          {"intercept", m.intercept},
          {"l2", m.l2_strength},
          {"k", m.k}};
}

TrainedModel trained_model_from_json(const Json& j) {
  return guarded("trained model", [&] {
    TrainedModel m;
    m.selected_keys = keys_from_json(j.at("selected_keys"));
    m.scaler_mean = vector_from_json(j.at("scaler_mean"));
    m.scaler_sd = vector_from_json(j.at("scaler_sd"));
    m.weights = vector_from_json(j.at("weights"));
    m.intercept = j.at("intercept").get<double>();
    m.l2_strength = j.at("l2").get<double>();
    m.k = j.at("k").get<int>();
    const auto k = static_cast<Eigen::Index>(m.selected_keys.size());
    if (m.scaler_mean.size() != k || m.scaler_sd.size() != k || m.weights.size() != k || m.k != k)
      throw Error(ErrorKind::InvalidArgument, "trained model dimensions disagree");
    return m;
  });
}

Json to_json(const CvResult& cv) {
  Json cells = Json::array();
  for (std::size_t c = 0; c < cv.grid.size(); ++c) {
    Json cell = grid_cell(cv.grid[c]);
    cell["mean_outer_accuracy"] = cv.mean_outer_accuracy[c];
    cell["outer_accuracy"] = to_json_vector(cv.outer_accuracy.col(static_cast<Eigen::Index>(c)));
    cell["inner_mean_accuracy"] = to_json_vector(cv.inner_mean_accuracy.col(static_cast<Eigen::Index>(c)));
    cells.push_back(cell);
  }
  Json winners = Json::array();
  for (const auto& w : cv.fold_selected) winners.push_back(grid_cell(w));
  return {{"cells", cells},
          {"outer_fold", cv.outer_fold},
          {"fold_selected", winners},
          {"best_cell", grid_cell(cv.best_cell)},
          {"selected_cell", grid_cell(cv.selected_cell)}};
}

Json to_json(const AuditReport& report, bool with_replicates) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    Json cell = cell_header(c);
    cell["metrics"] = metric_block(c);
    cell["confusion_mean"] = confusion(c.confusion_mean);
    cell["confusion_rounded"] = confusion(c.confusion_rounded);
    cell["type1"] = c.rates.type1;
    cell["type2"] = c.rates.type2;
    cell["type1_degenerate"] = c.rates.type1_degenerate;
    cell["type2_degenerate"] = c.rates.type2_degenerate;
    if (with_replicates) {
      Json reps;
      for (std::size_t i = 0; i < MetricSet::names.size(); ++i)
        reps[std::string(MetricSet::names[i])] = c.replicate_values[i];
      cell["replicates"] = reps;
    }
    cells.push_back(cell);
  }
  Json subjects = Json::array();
  for (std::size_t i = 0; i < report.subject_ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    subjects.push_back({{"subject_id", report.subject_ids[i]},
                        {"y_true", report.y_true[r]},
                        {"y_pred", report.y_pred[r]},
                        {"score", report.scores[r]}});
  }
  return {{"n_replicates", report.n_replicates}, {"seed", report.seed}, {"cells", cells}, {"predictions", subjects}};
}

Json confusion_json(const AuditReport& report) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    Json cell = cell_header(c);
    cell["mean"] = confusion(c.confusion_mean);
    cell["rounded"] = confusion(c.confusion_rounded);
    cell["matrix"] = {{c.confusion_rounded.tn, c.confusion_rounded.fp}, {c.confusion_rounded.fn, c.confusion_rounded.tp}};
    cell["type1"] = c.rates.type1;
    cell["type2"] = c.rates.type2;
    cells.push_back(cell);
  }
  return {{"layout", {{"rows", {"nonPD", "PD"}}, {"cols", {"pred_nonPD", "pred_PD"}}}}, {"cells", cells}};
}

Json bar_chart_json(const AuditReport& report) {
  Json series = Json::array();
  for (const auto& c : report.cells) {
    Json s = cell_header(c);
    s["metrics"] = metric_block(c);
    series.push_back(s);
  }
  Json names = Json::array();
  for (auto n : MetricSet::names) names.push_back(std::string(n));
  return {{"metrics", names}, {"series", series}};
}

Json to_json(const StageBreakdown& b) {
  auto gender = [](const GenderBreakdown& g) {
    auto buckets = [](const std::array<int, 4>& a) {
      return Json{{"onset", a[0]}, {"mild", a[1]}, {"severe", a[2]}, {"unknown", a[3]}};
    };
    return Json{{"updrs", buckets(g.updrs)},
                {"duration", buckets(g.duration)},
                {"misclassified_pd", g.misclassified_pd},
                {"misclassified_nonpd", g.misclassified_nonpd},
                {"total_pd", g.total_pd},
                {"total_nonpd", g.total_nonpd}};
  };
  return {{"male", gender(b.male)}, {"female", gender(b.female)}};
}

Json to_json(const GroundTruth& t) {
  Json centers = Json::array();
  for (std::size_t i = 0; i < t.centers.size(); ++i)
    centers.push_back({{"name", t.centers[i]}, {"batch_shift", t.batch_shift[i]}, {"batch_scale", t.batch_scale[i]}});
  return {{"seed", t.seed},
          {"effect_size_male", t.effect_size_male},
          {"effect_size_female", t.effect_size_female},
          {"noise_sd", t.noise_sd},
          {"informative_keys", keys_json(t.informative_keys)},
          {"directions", t.directions},
          {"baseline", to_json_vector(t.baseline)},
          {"centers", centers},
          {"severity", t.severity}};
}

Json to_json(const GenderRetrainResult& r) {
  auto model = [](const GenderModel& g) {
    return Json{{"gender", std::string(to_string(g.gender))},
                {"k", g.k},
                {"cv_accuracy", g.cv_accuracy},
                {"test_accuracy", g.test_accuracy},
                {"n_train", g.train_ids.size()},
                {"n_test", g.test_ids.size()},
                {"model", to_json(g.model)}};
  };
  return {{"male", model(r.male)}, {"female", model(r.female)}, {"common_keys", keys_json(r.common_keys)}};
}

Json to_json(const Split& split, const std::vector<std::string>& subject_ids) {
  Json train = Json::array(), test = Json::array();
  for (auto i : split.train) train.push_back(subject_ids.at(i));
  for (auto i : split.test) test.push_back(subject_ids.at(i));
  return {{"train", train}, {"test", test}};
}

Json to_json(const SynthConfig& cfg) {
  Json centers = Json::array();
  for (const auto& c : cfg.centers)
    centers.push_back({{"name", c.name},
                       {"n_pd", c.n_pd},
                       {"n_nonpd", c.n_nonpd},
                       {"n_pd_female", c.n_pd_female},
                       {"n_nonpd_female", c.n_nonpd_female},
                       {"batch_shift", c.batch_shift},
                       {"batch_scale", c.batch_scale},
                       {"age_mean", c.age_mean},
                       {"age_sd", c.age_sd},
                       {"updrs_mean", c.updrs_mean},
                       {"updrs_sd", c.updrs_sd},
                       {"updrs_version", std::string(to_string(c.updrs_version))},
                       {"duration_mean", c.duration_mean},
                       {"duration_sd", c.duration_sd},
                       {"n_missing_duration_female", c.n_missing_duration_female}});
  return {{"centers", centers},
          {"informative_keys", keys_json(cfg.informative_keys)},
          {"n_informative", cfg.n_informative},
          {"effect_size_male", cfg.effect_size_male},
          {"effect_size_female", cfg.effect_size_female},
          {"noise_sd", cfg.noise_sd},
          {"seed", cfg.seed}};
}

SynthConfig synth_config_from_json(const Json& j) {
  return guarded("synth config", [&] {
    SynthConfig cfg = j.contains("centers") ? SynthConfig{} : SynthConfig::reference_cohort();
    if (j.contains("centers")) {
      const SynthCenter d;
      for (const auto& c : j.at("centers")) {
        SynthCenter s;
        s.name = c.at("name").get<std::string>();
        s.n_pd = c.at("n_pd").get<int>();
        s.n_nonpd = c.at("n_nonpd").get<int>();
        s.n_pd_female = c.at("n_pd_female").get<int>();
        s.n_nonpd_female = c.at("n_nonpd_female").get<int>();
        s.batch_shift = c.value("batch_shift", d.batch_shift);
        s.batch_scale = c.value("batch_scale", d.batch_scale);
        s.age_mean = c.value("age_mean", d.age_mean);
        s.age_sd = c.value("age_sd", d.age_sd);
        s.updrs_mean = c.value("updrs_mean", d.updrs_mean);
        s.updrs_sd = c.value("updrs_sd", d.updrs_sd);
        if (c.contains("updrs_version")) s.updrs_version = parse_updrs_version(c.at("updrs_version").get<std::string>());
        s.duration_mean = c.value("duration_mean", d.duration_mean);
        s.duration_sd = c.value("duration_sd", d.duration_sd);
        s.n_missing_duration_female = c.value("n_missing_duration_female", d.n_missing_duration_female);
        cfg.centers.push_back(s);
      }
    }
    if (j.contains("informative_keys")) cfg.informative_keys = keys_from_json(j.at("informative_keys"));
    cfg.n_informative = j.value("n_informative", cfg.n_informative);
    cfg.effect_size_male = j.value("effect_size_male", cfg.effect_size_male);
    cfg.effect_size_female = j.value("effect_size_female", cfg.effect_size_female);
    cfg.noise_sd = j.value("noise_sd", cfg.noise_sd);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
  });
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace eegfair
