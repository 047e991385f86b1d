#include "eegfair/pipeline.hpp"

#include "eegfair/error.hpp"
#include "eegfair/filter.hpp"
#include "eegfair/io.hpp"
#include "eegfair/parallel.hpp"
#include "eegfair/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace fs = std::filesystem;

namespace eegfair {

namespace {

enum StageId : std::uint64_t { kSynthStage = 1, kSignalStage, kSplitStage, kCvStage, kBootstrapStage, kGenderStage };

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<StratumColumn> strata_from_json(const Json& j) {
  std::vector<StratumColumn> out;
  for (const auto& s : j) out.push_back(parse_stratum_column(s.get<std::string>()));
  return out;
}

Json strata_to_json(const std::vector<StratumColumn>& s) {
  Json a = Json::array();
  for (auto c : s) a.push_back(std::string(to_string(c)));
  return a;
}

Window parse_window(const std::string& s) {
  if (s == "hann") return Window::hann;
  if (s == "boxcar") return Window::boxcar;
  throw Error(ErrorKind::InvalidEnum, "window '" + s + "'");
}

Detrend parse_detrend(const std::string& s) {
  if (s == "mean") return Detrend::mean;
  if (s == "none") return Detrend::none;
  throw Error(ErrorKind::InvalidEnum, "detrend '" + s + "'");
}

TTestMode parse_ttest_mode(const std::string& s) {
  if (s == "pooled") return TTestMode::pooled;
  if (s == "welch") return TTestMode::welch;
  throw Error(ErrorKind::InvalidEnum, "t-test mode '" + s + "'");
}

StageRule stage_rule_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::InvalidArgument, "stage rule must be [lower, upper]");
  StageRule r{j.at(0).get<double>(), j.at(1).get<double>()};
  r.validate();
  return r;
}

[[noreturn]] void rethrow_for_subject(const Error& e, const std::string& subject) {
  const auto& msg = e.message();
  if (msg.find(subject) != std::string::npos) throw e;
  throw Error(e.kind(), "subject " + subject + ": " + msg);
}

// Collects artifact hashes for the run log.
class RunLog {
 public:
  RunLog(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {}

  void input_file(const fs::path& path) {
    inputs_.push_back({{"file", path.filename().string()}, {"fnv1a64", hex64(fnv1a64(read_text_file(path)))}});
  }

  void input_dir(const fs::path& dir, const std::vector<fs::path>& files) {
    std::string acc;
    for (const auto& f : files) acc += f.filename().string() + '\n' + hex64(fnv1a64(read_text_file(f))) + '\n';
    inputs_.push_back({{"file", dir.filename().string() + "/"}, {"fnv1a64", hex64(fnv1a64(acc))}});
  }

  void write(const std::string& name, const std::string& contents) {
    write_text_file(cfg_.resolve(name), contents);
    record(name, fnv1a64(contents));
  }

  void record(const std::string& name, std::uint64_t hash) {
    artifacts_.push_back({{"file", name}, {"fnv1a64", hex64(hash)}, {"version", EEGFAIR_VERSION}});
  }

  Json& details() { return details_; }

  void finish() {
    const auto path = cfg_.resolve("run_log.json");
    Json log;
    if (fs::exists(path)) {
      try {
        log = Json::parse(read_text_file(path));
      } catch (const Json::exception&) {
        log = Json::object();
      }
    }
    log["tool"] = "eegfair";
    log["version"] = EEGFAIR_VERSION;
    const auto config = run_config_to_json(cfg_);
    log["commands"][command_] = {{"config_hash", hex64(fnv1a64(config.dump()))},
                                 {"seed", *cfg_.seed},
                                 {"inputs", inputs_},
                                 {"artifacts", artifacts_},
                                 {"details", details_}};
    write_text_file(path, dump(log));
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  Json inputs_ = Json::array();
  Json artifacts_ = Json::array();
  Json details_ = Json::object();
};

struct Dataset {
  FeatureTable table;
  std::vector<SubjectRecord> records;  // aligned with table rows
};

Dataset load_dataset(const RunConfig& cfg, const fs::path& features, RunLog& log) {
  const auto meta_path = cfg.resolve(cfg.paths.metadata);
  Dataset d;
  d.table = load_feature_table(features);
  auto records = load_metadata(meta_path);
  validate_records(records);
  d.records = align_records(records, d.table);
  log.input_file(features);
  log.input_file(meta_path);
  return d;
}

Split load_split(const RunConfig& cfg, const FeatureTable& table, RunLog& log) {
  const auto path = cfg.resolve("split.json");
  log.input_file(path);
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, "malformed split.json: " + std::string(e.what()));
  }
  std::map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < table.subject_ids.size(); ++i) row[table.subject_ids[i]] = i;
  auto indices = [&](const char* part) {
    std::vector<std::size_t> out;
    for (const auto& id : j.at(part)) {
      const auto it = row.find(id.get<std::string>());
      if (it == row.end())
        throw Error(ErrorKind::MissingColumn, "split subject " + id.get<std::string>() + " not in feature table");
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return {indices("train"), indices("test")};
}

TrainedModel load_model(const RunConfig& cfg, RunLog& log) {
  const auto path = cfg.resolve("model.json");
  log.input_file(path);
  try {
    return trained_model_from_json(Json::parse(read_text_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, "malformed model.json: " + std::string(e.what()));
  }
}

CvOptions cv_options(const RunConfig& cfg) {
  CvOptions o = cfg.cv;
  o.seed = cfg.stage_seed(kCvStage);
  return o;
}

NestedCvResult train_on(const RunConfig& cfg, const Dataset& d, const Split& split, RunLog& log) {
  const auto train = d.table.select_subjects(split.train);
  auto result = nested_cv(train, select_rows(d.records, split.train), cv_options(cfg));
  log.write("model.json", dump(to_json(result.model)));
  log.write("cv.json", dump(to_json(result.cv)));
  return result;
}

void write_staging(const RunConfig& cfg, const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred,
                   const std::vector<SubjectRecord>& records, RunLog& log) {
  const bool needs_conversion = std::any_of(records.begin(), records.end(), [](const SubjectRecord& r) {
    return r.updrs3_score && r.updrs_version == UpdrsVersion::UPDRS;
  });
  if (needs_conversion && !cfg.conversion_configured)
    throw Error(ErrorKind::InvalidArgument,
                "UPDRS scores need staging.conversion {slope, offset} in the configuration");
  const auto breakdown = misclassification_breakdown(y_true, y_pred, records, cfg.staging);
  Json j = to_json(breakdown);
  j["rules"] = {{"updrs", {cfg.staging.updrs.lower, cfg.staging.updrs.upper}},
                {"duration_months", {cfg.staging.duration.lower, cfg.staging.duration.upper}},
                {"conversion", {{"slope", cfg.staging.conversion.slope}, {"offset", cfg.staging.conversion.offset}}}};
  log.write("staging.json", dump(j));
}

void write_comparison(const RunConfig& cfg, const Dataset& d, double l2, RunLog& log) {
  GenderRetrainOptions opt;
  opt.l2 = l2;
  opt.k_grid = cfg.gender_k_grid;
  opt.split = cfg.split;
  opt.n_folds = cfg.cv.inner_folds;
  opt.seed = cfg.stage_seed(kGenderStage);
  opt.logreg = cfg.cv.logreg;
  const auto retrained = retrain_gender_models(d.table, d.records, opt);
  log.write("gender_models.json", dump(to_json(retrained)));

  std::vector<FeatureKey> kept;
  for (const auto& k : retrained.common_keys)
    if (cfg.compare.regions.keeps(k.channel)) kept.push_back(k);
  std::vector<GroupComparison> rows;
  if (!kept.empty()) rows = compare_common_features(d.table, d.records, kept, cfg.compare);
  log.write("table3.csv", table3_csv(rows));
  int raw = 0, fdr = 0;
  for (const auto& r : rows) {
    raw += r.significant_raw;
    fdr += r.significant_fdr;
  }
  log.details()["compare"] = {{"male_k", retrained.male.k},
                              {"female_k", retrained.female.k},
                              {"common_keys", retrained.common_keys.size()},
                              {"region_keys", kept.size()},
                              {"significant_raw", raw},
                              {"significant_fdr", fdr}};
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void RunConfig::validate() const {
  if (!seed) throw Error(ErrorKind::InvalidArgument, "a seed is required (config \"seed\" or --seed)");
  spectral.validate();
  if (!(split.train_fraction > 0 && split.train_fraction < 1))
    throw Error(ErrorKind::InvalidArgument, "split.train_fraction must lie in (0, 1)");
  if (bootstrap.n_replicates < 1) throw Error(ErrorKind::InvalidArgument, "bootstrap.n_replicates must be >= 1");
  if (cv.k_grid.empty() || cv.l2_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty hyperparameter grid");
  if (cv.outer_folds < 2 || cv.inner_folds < 2) throw Error(ErrorKind::InvalidArgument, "need at least two folds");
  staging.updrs.validate();
  staging.duration.validate();
  if (conversion_configured) staging.conversion.validate();
}

fs::path RunConfig::resolve(const fs::path& p) const { return p.is_absolute() ? p : paths.output_dir / p; }

std::uint64_t RunConfig::stage_seed(std::uint64_t stage) const { return derive_seed(seed.value_or(0), {stage}); }

RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      if (p.contains("metadata")) c.paths.metadata = p.at("metadata").get<std::string>();
      if (p.contains("epochs_dir")) c.paths.epochs_dir = p.at("epochs_dir").get<std::string>();
      if (p.contains("features")) c.paths.features = p.at("features").get<std::string>();
      if (p.contains("output_dir")) c.paths.output_dir = p.at("output_dir").get<std::string>();
    }
    if (j.contains("spectral")) {
      const auto& s = j.at("spectral");
      if (s.contains("window")) c.spectral.window = parse_window(s.at("window").get<std::string>());
      c.spectral.segment_seconds = s.value("segment_seconds", c.spectral.segment_seconds);
      c.spectral.overlap_fraction = s.value("overlap", c.spectral.overlap_fraction);
      if (s.contains("detrend")) c.spectral.detrend = parse_detrend(s.at("detrend").get<std::string>());
    }
    if (j.contains("preprocess")) {
      const auto& s = j.at("preprocess");
      c.preprocess.filter = s.value("filter", c.preprocess.filter);
      c.preprocess.highpass_hz = s.value("highpass_hz", c.preprocess.highpass_hz);
      c.preprocess.lowpass_hz = s.value("lowpass_hz", c.preprocess.lowpass_hz);
      c.preprocess.reject_uv = s.value("reject_uv", c.preprocess.reject_uv);
    }
    if (j.contains("harmonization")) {
      const auto& s = j.at("harmonization");
      if (s.contains("mode")) c.harmonization.mode = parse_combat_mode(s.at("mode").get<std::string>());
      if (s.contains("covariates")) {
        c.harmonization.covariates.columns.clear();
        for (const auto& v : s.at("covariates"))
          c.harmonization.covariates.columns.push_back(parse_covariate(v.get<std::string>()));
      }
      c.harmonization.tolerance = s.value("tolerance", c.harmonization.tolerance);
      c.harmonization.max_iterations = s.value("max_iterations", c.harmonization.max_iterations);
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      c.split.train_fraction = s.value("train_fraction", c.split.train_fraction);
      if (s.contains("strata")) c.split.strata = strata_from_json(s.at("strata"));
    }
    if (j.contains("cv")) {
      const auto& s = j.at("cv");
      if (s.contains("k_grid")) c.cv.k_grid = s.at("k_grid").get<std::vector<int>>();
      if (s.contains("l2_grid")) c.cv.l2_grid = s.at("l2_grid").get<std::vector<double>>();
      c.cv.outer_folds = s.value("outer_folds", c.cv.outer_folds);
      c.cv.inner_folds = s.value("inner_folds", c.cv.inner_folds);
      if (s.contains("strata")) c.cv.strata = strata_from_json(s.at("strata"));
      c.cv.logreg.tol = s.value("tolerance", c.cv.logreg.tol);
      c.cv.logreg.max_iter = s.value("max_iterations", c.cv.logreg.max_iter);
    }
    if (j.contains("bootstrap")) {
      const auto& s = j.at("bootstrap");
      c.bootstrap.n_replicates = s.value("n_replicates", c.bootstrap.n_replicates);
      if (s.contains("strata")) c.bootstrap.strata = strata_from_json(s.at("strata"));
      c.bootstrap.resample = s.value("resample", c.bootstrap.resample);
      c.bootstrap.restratify_per_cell = s.value("restratify_per_cell", c.bootstrap.restratify_per_cell);
    }
    if (j.contains("staging")) {
      const auto& s = j.at("staging");
      if (s.contains("updrs")) c.staging.updrs = stage_rule_from_json(s.at("updrs"));
      if (s.contains("duration_months")) c.staging.duration = stage_rule_from_json(s.at("duration_months"));
      if (s.contains("conversion")) {
        c.staging.conversion.slope = s.at("conversion").at("slope").get<double>();
        c.staging.conversion.offset = s.at("conversion").at("offset").get<double>();
        c.staging.conversion.validate();
        c.conversion_configured = true;
      }
    }
    if (j.contains("compare")) {
      const auto& s = j.at("compare");
      c.compare.regions.frontal = s.value("frontal", c.compare.regions.frontal);
      c.compare.regions.parietal = s.value("parietal", c.compare.regions.parietal);
      c.compare.regions.include_midline = s.value("include_midline", c.compare.regions.include_midline);
      if (s.contains("ttest")) c.compare.mode = parse_ttest_mode(s.at("ttest").get<std::string>());
      c.compare.alpha = s.value("alpha", c.compare.alpha);
      c.compare.q = s.value("q", c.compare.q);
      if (s.contains("k_grid")) c.gender_k_grid = s.at("k_grid").get<std::vector<int>>();
    }
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      c.synth = synth_config_from_json(s);
      if (s.contains("signals")) {
        const auto& g = s.at("signals");
        c.synth_signals = g.value("enabled", c.synth_signals);
        c.signal.sampling_rate_hz = g.value("sampling_rate_hz", c.signal.sampling_rate_hz);
        c.signal.n_epochs = g.value("n_epochs", c.signal.n_epochs);
        c.signal.rms_uv = g.value("rms_uv", c.signal.rms_uv);
        c.signal.noise_fraction = g.value("noise_fraction", c.signal.noise_fraction);
        c.signal.spike_probability = g.value("spike_probability", c.signal.spike_probability);
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed configuration: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, "malformed configuration " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

Json run_config_to_json(const RunConfig& c) {
  Json covs = Json::array();
  for (auto v : c.harmonization.covariates.columns) covs.push_back(std::string(to_string(v)));
  Json j;
  j["seed"] = c.seed.value_or(0);
  j["spectral"] = {{"window", c.spectral.window == Window::hann ? "hann" : "boxcar"},
                   {"segment_seconds", c.spectral.segment_seconds},
                   {"overlap", c.spectral.overlap_fraction},
                   {"detrend", c.spectral.detrend == Detrend::mean ? "mean" : "none"}};
  j["preprocess"] = {{"filter", c.preprocess.filter},
                     {"highpass_hz", c.preprocess.highpass_hz},
                     {"lowpass_hz", c.preprocess.lowpass_hz},
                     {"reject_uv", c.preprocess.reject_uv}};
  j["harmonization"] = {{"mode", std::string(to_string(c.harmonization.mode))},
                        {"covariates", covs},
                        {"tolerance", c.harmonization.tolerance},
                        {"max_iterations", c.harmonization.max_iterations}};
  j["split"] = {{"train_fraction", c.split.train_fraction}, {"strata", strata_to_json(c.split.strata)}};
  j["cv"] = {{"k_grid", c.cv.k_grid},
             {"l2_grid", c.cv.l2_grid},
             {"outer_folds", c.cv.outer_folds},
             {"inner_folds", c.cv.inner_folds},
             {"strata", strata_to_json(c.cv.strata)},
             {"tolerance", c.cv.logreg.tol},
             {"max_iterations", c.cv.logreg.max_iter}};
  j["bootstrap"] = {{"n_replicates", c.bootstrap.n_replicates},
                    {"strata", strata_to_json(c.bootstrap.strata)},
                    {"resample", c.bootstrap.resample},
                    {"restratify_per_cell", c.bootstrap.restratify_per_cell}};
  j["staging"] = {{"updrs", {c.staging.updrs.lower, c.staging.updrs.upper}},
                  {"duration_months", {c.staging.duration.lower, c.staging.duration.upper}}};
  if (c.conversion_configured)
    j["staging"]["conversion"] = {{"slope", c.staging.conversion.slope}, {"offset", c.staging.conversion.offset}};
  j["compare"] = {{"frontal", c.compare.regions.frontal},
                  {"parietal", c.compare.regions.parietal},
                  {"include_midline", c.compare.regions.include_midline},
                  {"ttest", c.compare.mode == TTestMode::pooled ? "pooled" : "welch"},
                  {"alpha", c.compare.alpha},
                  {"q", c.compare.q},
                  {"k_grid", c.gender_k_grid}};
  j["synth"] = to_json(c.synth);
  j["synth"]["signals"] = {{"enabled", c.synth_signals},
                           {"sampling_rate_hz", c.signal.sampling_rate_hz},
                           {"n_epochs", c.signal.n_epochs},
                           {"rms_uv", c.signal.rms_uv},
                           {"noise_fraction", c.signal.noise_fraction},
                           {"spike_probability", c.signal.spike_probability}};
  return j;
}

void cmd_synth(const RunConfig& cfg) {
  cfg.validate();
  RunLog log(cfg, "synth");
  SynthConfig sc = cfg.synth;
  sc.seed = cfg.stage_seed(kSynthStage);
  SynthFeatures features;
  if (cfg.synth_signals) {
    SignalConfig sig = cfg.signal;
    sig.spectral = cfg.spectral;
    sig.seed = cfg.stage_seed(kSignalStage);
    auto signals = generate_signals(sc, sig);
    const auto dir = cfg.resolve(cfg.paths.epochs_dir);
    fs::create_directories(dir);
    std::string acc;
    for (const auto& e : signals.epochs) {
      save_epoch_set(dir, e);
      for (const auto& f : {dir / (e.subject_id + ".json"), dir / (e.subject_id + ".f64")})
        acc += f.filename().string() + '\n' + hex64(fnv1a64(read_text_file(f))) + '\n';
    }
    log.record(cfg.paths.epochs_dir.filename().string() + "/", fnv1a64(acc));
    features = std::move(signals.features);
  } else {
    features = generate_features(sc);
  }
  std::string meta_name = cfg.paths.metadata.string();
  save_metadata(cfg.resolve(cfg.paths.metadata), features.records);
  log.record(meta_name, fnv1a64(read_text_file(cfg.resolve(cfg.paths.metadata))));
  save_feature_table(cfg.resolve("synth_features.csv"), features.table);
  log.record("synth_features.csv", fnv1a64(read_text_file(cfg.resolve("synth_features.csv"))));
  log.write("ground_truth.json", dump(to_json(features.truth)));
  log.details()["subjects"] = features.records.size();
  log.finish();
}

void cmd_extract(const RunConfig& cfg) {
  cfg.validate();
  RunLog log(cfg, "extract");
  const auto meta_path = cfg.resolve(cfg.paths.metadata);
  auto records = load_metadata(meta_path);
  validate_records(records);
  log.input_file(meta_path);
  const auto dir = cfg.resolve(cfg.paths.epochs_dir);

  std::vector<fs::path> files;
  for (const auto& r : records) {
    const auto sidecar = dir / (r.subject_id + ".json");
    if (!fs::exists(sidecar))
      throw Error(ErrorKind::Io, "subject " + r.subject_id + ": no epoch file " + sidecar.string());
    files.push_back(sidecar);
  }
  std::vector<fs::path> all_files = files;
  for (const auto& f : files) {
    const auto j = Json::parse(read_text_file(f), nullptr, false);
    if (!j.is_discarded() && j.contains("data_file")) all_files.push_back(dir / j.at("data_file").get<std::string>());
  }
  std::sort(all_files.begin(), all_files.end());
  log.input_dir(dir, all_files);

  FeatureTable table;
  table.keys = all_feature_keys();
  table.values.resize(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(kNumFeatures));
  std::vector<std::size_t> kept(records.size()), rejected(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    const auto& id = records[i].subject_id;
    try {
      auto epochs = load_epoch_set(files[i]);
      epochs.validate();
      if (epochs.subject_id != id)
        throw Error(ErrorKind::InvalidArgument, "sidecar names subject " + epochs.subject_id);
      if (cfg.preprocess.filter)
        epochs = lowpass(highpass(epochs, cfg.preprocess.highpass_hz), cfg.preprocess.lowpass_hz);
      auto r = reject_epochs(epochs, cfg.preprocess.reject_uv);
      kept[i] = r.kept.n_epochs();
      rejected[i] = r.rejected.size();
      table.values.row(static_cast<Eigen::Index>(i)) = extract_features(r.kept, cfg.spectral).transpose();
    } catch (const Error& e) {
      rethrow_for_subject(e, id);
    }
  });
  for (const auto& r : records) table.subject_ids.push_back(r.subject_id);
  table.validate();

  save_feature_table(cfg.resolve(cfg.paths.features), table);
  log.record(cfg.paths.features.filename().string(), fnv1a64(read_text_file(cfg.resolve(cfg.paths.features))));
  Json per_subject = Json::object();
  std::size_t total_rejected = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    per_subject[records[i].subject_id] = {{"kept", kept[i]}, {"rejected", rejected[i]}};
    total_rejected += rejected[i];
  }
  log.details()["subjects"] = records.size();
  log.details()["rejected_epochs"] = total_rejected;
  log.details()["epochs"] = per_subject;
  log.finish();
}

void cmd_harmonize(const RunConfig& cfg) {
  cfg.validate();
  RunLog log(cfg, "harmonize");
  const auto d = load_dataset(cfg, cfg.resolve(cfg.paths.features), log);
  SplitSpec spec = cfg.split;
  spec.seed = cfg.stage_seed(kSplitStage);
  const auto split = stratified_split(d.records, spec);
  const auto train = d.table.select_subjects(split.train);
  const auto model = fit_combat(train, select_rows(d.records, split.train), cfg.harmonization);
  const auto harmonized = apply_combat(model, d.table, d.records);

  log.write("split.json", dump(to_json(split, d.table.subject_ids)));
  log.write("combat_model.json", dump(to_json(model)));
  save_feature_table(cfg.resolve("harmonized.csv"), harmonized);
  log.record("harmonized.csv", fnv1a64(read_text_file(cfg.resolve("harmonized.csv"))));
  log.details()["n_train"] = split.train.size();
  log.details()["n_test"] = split.test.size();
  log.details()["eb_iterations"] = model.eb_iterations;
  log.finish();
}

void cmd_train(const RunConfig& cfg) {
  cfg.validate();
  RunLog log(cfg, "train");
  const auto d = load_dataset(cfg, cfg.resolve("harmonized.csv"), log);
  const auto split = load_split(cfg, d.table, log);
  const auto result = train_on(cfg, d, split, log);
  log.details()["selected"] = {{"k", result.cv.selected_cell.k}, {"l2", result.cv.selected_cell.l2}};
  log.finish();
}

void cmd_audit(const RunConfig& cfg, bool train_on_the_fly) {
  cfg.validate();
  RunLog log(cfg, "audit");
  const auto d = load_dataset(cfg, cfg.resolve("harmonized.csv"), log);
  const auto split = load_split(cfg, d.table, log);
  const auto model = train_on_the_fly ? train_on(cfg, d, split, log).model : load_model(cfg, log);

  const auto test = d.table.select_subjects(split.test);
  const auto test_records = select_rows(d.records, split.test);
  BootstrapSpec spec = cfg.bootstrap;
  spec.seed = cfg.stage_seed(kBootstrapStage);
  const auto report = bootstrap_audit(model, test, test_records, spec);

  log.write("table2.csv", table2_csv(report));
  log.write("table2_display.csv", table2_display_csv(report));
  log.write("audit.json", dump(to_json(report)));
  log.write("confusion.json", dump(confusion_json(report)));
  log.write("bar_chart.json", dump(bar_chart_json(report)));
  write_staging(cfg, report.y_true, report.y_pred, test_records, log);
  write_comparison(cfg, d, model.l2_strength, log);
  if (const auto* g = report.find(AuditGroup::mixed, "global"))
    log.details()["mixed_accuracy"] = g->metrics[0].mean;
  log.finish();
}

void cmd_compare(const RunConfig& cfg) {
  cfg.validate();
  RunLog log(cfg, "compare");
  const auto d = load_dataset(cfg, cfg.resolve("harmonized.csv"), log);
  const auto model = load_model(cfg, log);
  write_comparison(cfg, d, model.l2_strength, log);
  log.finish();
}

void cmd_stage(const RunConfig& cfg) {
  cfg.validate();
  RunLog log(cfg, "stage");
  const auto d = load_dataset(cfg, cfg.resolve("harmonized.csv"), log);
  const auto split = load_split(cfg, d.table, log);
  const auto model = load_model(cfg, log);
  const auto test = d.table.select_subjects(split.test);
  const auto test_records = select_rows(d.records, split.test);
  const auto pred = predict(model, test);
  write_staging(cfg, diagnosis_labels(test_records), pred.labels, test_records, log);
  log.finish();
}

}  // namespace eegfair
