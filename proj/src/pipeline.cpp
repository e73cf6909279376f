#include "petrank/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include "petrank/csv.hpp"
#include "petrank/eval/report.hpp"
#include "petrank/eval/validation.hpp"
#include "petrank/hash.hpp"
#include "petrank/leakage.hpp"

namespace petrank {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown fields.
class Fields {
 public:
  Fields(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw config_error(where() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!take(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw config_error(where(key) + ": wrong type");
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    if (!take(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    T v{};
    get(key, v);
    out = std::move(v);
  }

  const nlohmann::json* child(const char* key) {
    return take(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const char* key = nullptr) const {
    if (!key) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) throw config_error(where(k.c_str()) + ": unknown field");
    }
  }

 private:
  bool take(const char* key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Rethrows config errors from a nested parser with the field prefixed.
template <typename F>
auto nested(const std::string& field, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::config) throw;
    throw config_error(field + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  out << text;
  if (!out) throw Error("IoError", "write failed for " + path.string());
}

void write_json(const fs::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string_view to_string(DevPolicy p) { return p == DevPolicy::reserve ? "reserve" : "merge"; }
std::string_view to_string(FitScope s) { return s == FitScope::train ? "train" : "all"; }

DevPolicy parse_dev_policy(const std::string& raw) {
  if (raw == "reserve") return DevPolicy::reserve;
  if (raw == "merge") return DevPolicy::merge;
  throw config_error("splits.dev_policy: expected reserve or merge, got '" + raw + "'");
}

FitScope parse_fit_scope(const std::string& raw) {
  if (raw == "train") return FitScope::train;
  if (raw == "all") return FitScope::all;
  throw config_error("splits.fit_scope: expected train or all, got '" + raw + "'");
}

// ---- artifacts -------------------------------------------------------------

constexpr const char* kManifest = "manifest.json";
constexpr const char* kValidation = "validation.json";
constexpr const char* kChronology = "chronology.csv";
constexpr const char* kExclusions = "exclusions.csv";
constexpr const char* kFeatures = "features.csv";
constexpr const char* kSchema = "features.schema.json";
constexpr const char* kModel = "model.json";
constexpr const char* kTrainSummary = "train_summary.json";
constexpr const char* kEvalJson = "eval.json";
constexpr const char* kEvalMd = "eval.md";
constexpr const char* kCv = "cv.json";
constexpr const char* kRanking = "ranking.csv";
constexpr const char* kLeakage = "leakage.json";

std::vector<const char*> outputs_of(Command c) {
  switch (c) {
    case Command::ingest:
      return {kValidation};
    case Command::chronology:
      return {kChronology, kExclusions};
    case Command::features:
      return {kFeatures, kSchema};
    case Command::train:
      return {kModel, kTrainSummary};
    case Command::evaluate:
      return {kEvalJson, kEvalMd};
    case Command::cv:
      return {kCv};
    case Command::rank:
      return {kRanking};
    default:
      return {kLeakage};
  }
}

void require(const fs::path& dir, const char* file, Command producer) {
  if (!fs::exists(dir / file)) throw upstream_missing(std::string(to_string(producer)));
}

ojson input_hashes(const PipelineConfig& cfg) {
  ojson inputs;
  inputs["corpus"] = {{"path", cfg.corpus_path}, {"fnv1a64", file_hash(cfg.corpus_path)}};
  if (cfg.embeddings_path) {
    inputs["embeddings"] = {{"path", *cfg.embeddings_path},
                            {"fnv1a64", file_hash(*cfg.embeddings_path)}};
  }
  return inputs;
}

std::string version_of_eigen() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

std::string version_of_json() {
  return std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
}

// Adds (or replaces) the entry for `c`. Earlier entries survive only while
// the config and input hashes are unchanged.
void update_manifest(const PipelineConfig& cfg, Command c) {
  const fs::path dir = cfg.out_dir;
  const auto hash = config_hash(cfg);
  const auto inputs = input_hashes(cfg);

  nlohmann::json previous_steps = nlohmann::json::object();
  if (fs::exists(dir / kManifest)) {
    try {
      const auto old = nlohmann::json::parse(read_text(dir / kManifest));
      if (old.value("config_hash", "") == hash && old.at("inputs") == nlohmann::json(inputs)) {
        previous_steps = old.at("steps");
      }
    } catch (const nlohmann::json::exception&) {
      // Unreadable manifest: start over.
    }
  }

  ojson m;
  m["tool"] = "petrank";
  m["version"] = kVersion;
  m["libraries"] = {{"eigen", version_of_eigen()}, {"nlohmann_json", version_of_json()}};
  m["config_hash"] = hash;
  m["config"] = to_json(cfg);
  m["seeds"] = {{"learner", cfg.learner.seed()}, {"eval", cfg.eval.seed}};
  m["inputs"] = inputs;
  ojson steps = ojson::object();
  for (Command step : all_commands()) {
    const std::string key(to_string(step));
    if (step == c) {
      ojson outputs;
      for (const char* f : outputs_of(step)) outputs[f] = file_hash(dir / f);
      steps[key] = {{"outputs", outputs}};
    } else if (previous_steps.contains(key)) {
      steps[key] = previous_steps[key];
    }
  }
  m["steps"] = steps;
  write_json(dir / kManifest, m);
}

// ---- shared loading --------------------------------------------------------

Corpus load_valid_corpus(const PipelineConfig& cfg) {
  if (!fs::exists(cfg.corpus_path)) {
    throw config_error("corpus.path: '" + cfg.corpus_path + "' does not exist");
  }
  auto corpus = load_corpus(cfg.corpus_path, cfg.corpus_format);
  const auto report = validate(corpus);
  if (!report.violations.empty()) {
    const auto& v = report.violations.front();
    throw Error("InvalidCorpus", std::to_string(report.violations.size()) +
                                     " validation violation(s); first at row " +
                                     std::to_string(v.row) + " (" + v.rule + "): " + v.message);
  }
  return corpus;
}

FeatureMatrix load_features(const fs::path& dir) {
  try {
    const auto schema = schema_from_json(nlohmann::json::parse(read_text(dir / kSchema)));
    return read_feature_csv(dir / kFeatures, schema);
  } catch (const nlohmann::json::exception& e) {
    throw Error("CorruptFile", std::string(kSchema) + ": " + e.what());
  }
}

struct RowSplit {
  std::vector<std::size_t> fit;
  std::vector<std::size_t> test;
};

RowSplit split_rows(const FeatureMatrix& m, const Corpus& corpus, const PipelineConfig& cfg) {
  std::map<std::string, Split> split_of;
  for (const auto& r : corpus.records) split_of.emplace(r.name, r.split);
  RowSplit out;
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    const auto it = split_of.find(m.names[i]);
    if (it == split_of.end()) {
      throw Error("NameMismatch", "feature row '" + m.names[i] + "' is not in the corpus");
    }
    const Split s = it->second;
    if (s == Split::test) out.test.push_back(i);
    const bool fit = cfg.fit_scope == FitScope::all || s == Split::train ||
                     (s == Split::dev && cfg.dev_policy == DevPolicy::merge);
    if (fit) out.fit.push_back(i);
  }
  if (out.fit.empty()) throw Error("TooFewRows", "no rows to fit on");
  return out;
}

bool has_gap_features(const FeatureSchema& schema) {
  const auto& n = schema.numeric_names;
  return std::find(n.begin(), n.end(), "gap_days") != n.end() ||
         std::find(n.begin(), n.end(), "rank_score_log") != n.end();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- commands --------------------------------------------------------------

int cmd_ingest(const PipelineConfig& cfg, std::ostream& log) {
  if (!fs::exists(cfg.corpus_path)) {
    throw config_error("corpus.path: '" + cfg.corpus_path + "' does not exist");
  }
  const auto corpus = load_corpus(cfg.corpus_path, cfg.corpus_format);
  const auto report = validate(corpus);
  write_json(fs::path(cfg.out_dir) / kValidation, to_json(report));
  log << "ingest: " << report.total << " rows, " << report.accepted << " accepted, "
      << report.violations.size() << " violation(s)\n";
  return report.violations.empty() ? 0 : 3;
}

int cmd_chronology(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out_dir;
  require(dir, kValidation, Command::ingest);
  const auto accepted = filter_accepted(load_valid_corpus(cfg));
  const auto table = chronologize_corpus(accepted, cfg.anchors);
  write_chronology_csv(table, dir / kChronology);
  write_exclusions_csv(table, dir / kExclusions);
  log << "chronology: " << table.facts.size() << " dated, " << table.exclusions.size()
      << " excluded\n";
  return 0;
}

int cmd_features(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out_dir;
  require(dir, kChronology, Command::chronology);
  const auto facts = read_chronology_csv(dir / kChronology);
  const auto accepted = filter_accepted(load_valid_corpus(cfg));
  std::map<std::string, TextStats> stats;
  for (const auto& r : accepted.records) {
    if (facts.count(r.name)) stats.emplace(r.name, text_statistics(r.text));
  }
  std::optional<EmbeddingTable> emb;
  if (cfg.embeddings_path) {
    if (!fs::exists(*cfg.embeddings_path)) {
      throw config_error("features.embeddings_path: '" + *cfg.embeddings_path +
                         "' does not exist");
    }
    emb = load_embeddings(*cfg.embeddings_path);
  }
  const auto m = assemble(facts, stats, cfg.features, emb ? &*emb : nullptr);
  write_feature_csv(m, dir / kFeatures);
  write_json(dir / kSchema, to_json(m.schema));
  log << "features: " << m.rows() << " rows x " << m.cols() << " columns\n";
  return 0;
}

int cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out_dir;
  require(dir, kSchema, Command::features);
  require(dir, kFeatures, Command::features);
  const auto m = load_features(dir);
  const auto rows = split_rows(m, load_valid_corpus(cfg), cfg);
  const auto fit_m = m.subset(rows.fit);
  const auto model = fit(cfg.learner, fit_m);
  save_model(model, dir / kModel);

  ojson summary;
  summary["model"] = std::string(to_string(model.kind()));
  summary["fit_scope"] = std::string(to_string(cfg.fit_scope));
  summary["dev_policy"] = std::string(to_string(cfg.dev_policy));
  summary["n_fit"] = rows.fit.size();
  summary["fingerprint"] = {{"n", model.fingerprint.n},
                            {"seed", model.fingerprint.seed},
                            {"config_hash", model.fingerprint.config_hash},
                            {"state_hash", model.fingerprint.state_hash}};
  if (model.diagnostics) {
    summary["diagnostics"] = {{"converged", model.diagnostics->converged},
                              {"iterations", model.diagnostics->iterations},
                              {"not_standardized", model.diagnostics->not_standardized}};
  }
  summary["training_metrics"] = to_json(regression_metrics(
      fit_m.target, predict(model, fit_m), cfg.eval.rel_tol, DegeneracyPolicy::lenient));
  write_json(dir / kTrainSummary, summary);
  log << "train: " << to_string(model.kind()) << " on " << rows.fit.size() << " rows\n";
  return 0;
}

int cmd_evaluate(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out_dir;
  require(dir, kModel, Command::train);
  require(dir, kSchema, Command::features);
  require(dir, kFeatures, Command::features);
  const auto model = load_model(dir / kModel);
  const auto m = load_features(dir);
  const auto rows = split_rows(m, load_valid_corpus(cfg), cfg);
  if (rows.test.empty()) throw Error("TooFewRows", "the test split has no dated petitions");
  const auto test_m = m.subset(rows.test);
  const VectorXd y_hat = predict(model, test_m);

  EvalReport report;
  report.model_kind = std::string(to_string(model.kind()));
  report.target = m.schema.target_name;
  report.n_train = model.fingerprint.n;
  report.n_test = rows.test.size();
  report.rel_tol = cfg.eval.rel_tol;
  report.metrics = regression_metrics(test_m.target, y_hat, cfg.eval.rel_tol,
                                      DegeneracyPolicy::lenient);
  report.target_leakage = has_gap_features(m.schema);
  if (cfg.eval.bootstrap_resamples > 0) {
    for (auto which : {MetricName::mse, MetricName::mae, MetricName::r2, MetricName::spearman,
                       MetricName::explained_variance, MetricName::tolerance_accuracy}) {
      if (!metric_value(report.metrics, which)) continue;
      try {
        report.intervals.push_back(bootstrap_ci(which, test_m.target, y_hat,
                                                cfg.eval.bootstrap_resamples,
                                                cfg.eval.bootstrap_level, cfg.eval.seed,
                                                cfg.eval.rel_tol));
      } catch (const Error& e) {
        if (e.code() != "UndefinedMetric") throw;
        log << "evaluate: no interval for " << to_string(which) << " (" << e.what() << ")\n";
      }
    }
  }
  write_json(dir / kEvalJson, to_json(report));
  write_text(dir / kEvalMd, to_markdown(report));
  log << "evaluate: " << report.n_test << " test rows";
  if (report.metrics.r2) log << ", r2=" << format_double(*report.metrics.r2);
  if (report.metrics.spearman_rho) log << ", rho=" << format_double(*report.metrics.spearman_rho);
  log << "\n";
  if (report.target_leakage) log << "evaluate: " << kTargetLeakageNotice << "\n";
  return 0;
}

int cmd_cv(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out_dir;
  require(dir, kSchema, Command::features);
  require(dir, kFeatures, Command::features);
  const auto m = load_features(dir);
  const auto rows = split_rows(m, load_valid_corpus(cfg), cfg);
  const auto fit_m = m.subset(rows.fit);
  ojson out;
  out["rows"] = rows.fit.size();
  out["kfold"] = to_json(kfold_cv(cfg.learner, fit_m, cfg.eval.kfold_k, cfg.eval.rel_tol,
                                  cfg.eval.seed));
  if (cfg.eval.mccv_iterations > 0) {
    out["mccv"] = to_json(mccv(cfg.learner, fit_m, cfg.eval.mccv_iterations,
                               cfg.eval.mccv_test_fraction, cfg.eval.rel_tol, cfg.eval.seed));
  }
  write_json(dir / kCv, out);
  log << "cv: " << cfg.eval.kfold_k << "-fold and " << cfg.eval.mccv_iterations
      << " MCCV iteration(s) over " << rows.fit.size() << " rows\n";
  return 0;
}

int cmd_rank(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out_dir;
  require(dir, kModel, Command::train);
  require(dir, kSchema, Command::features);
  require(dir, kFeatures, Command::features);
  const auto model = load_model(dir / kModel);
  const auto m = load_features(dir);
  const auto target = m.schema.target_name == target_column_name(TargetKind::log)
                          ? TargetKind::log
                          : TargetKind::inverse_square;
  const auto ranked = rank_petitions(m.names, predict(model, m), target);
  std::ostringstream out;
  csv::write_row(out, {"position", "name", "predicted_score"});
  for (const auto& r : ranked) {
    csv::write_row(out, {std::to_string(r.position), r.name, format_double(r.score)});
  }
  write_text(dir / kRanking, out.str());
  log << "rank: " << ranked.size() << " petitions ranked\n";
  return 0;
}

int cmd_leakage(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out_dir;
  require(dir, kValidation, Command::ingest);
  const auto corpus = load_valid_corpus(cfg);
  Corpus train;
  Corpus test;
  for (const auto& r : corpus.records) {
    if (r.split == Split::test) {
      test.records.push_back(r);
    } else if (r.split == Split::train ||
               (r.split == Split::dev && cfg.dev_policy == DevPolicy::merge)) {
      train.records.push_back(r);
    }
  }
  const auto report =
      cross_split_audit(train, test, cfg.leakage.threshold, cfg.leakage.normalization());
  write_json(dir / kLeakage, to_json(report));
  log << verdict(report) << "\n";
  return 0;
}

}  // namespace

// ---- config ----------------------------------------------------------------

NormalizationConfig LeakageSettings::normalization() const {
  NormalizationConfig cfg;
  cfg.lowercase = lowercase;
  cfg.strip_non_alphanumeric = strip_non_alphanumeric;
  cfg.remove_stopwords = remove_stopwords;
  cfg.stem = stem;
  if (remove_stopwords) {
    cfg.stopword_list = stopwords_path ? load_stopwords(*stopwords_path) : default_stopwords();
  }
  return cfg;
}

void PipelineConfig::check() const {
  if (corpus_path.empty()) throw config_error("corpus.path: required");
  if (out_dir.empty()) throw config_error("out_dir: required");
  nested("anchors", [&] { anchors.check(); return 0; });
  nested("learner", [&] { learner.check(); return 0; });
  if (!(eval.rel_tol > 0.0)) throw config_error("eval.rel_tol: must be > 0");
  if (eval.kfold_k < 2) throw config_error("eval.kfold_k: must be >= 2");
  if (!(eval.mccv_test_fraction > 0.0 && eval.mccv_test_fraction < 1.0)) {
    throw config_error("eval.mccv_test_fraction: must be in (0, 1)");
  }
  if (eval.bootstrap_resamples != 0 && eval.bootstrap_resamples < 100) {
    throw config_error("eval.bootstrap_resamples: must be 0 or >= 100");
  }
  if (!(eval.bootstrap_level > 0.0 && eval.bootstrap_level < 1.0)) {
    throw config_error("eval.bootstrap_level: must be in (0, 1)");
  }
  if (!(leakage.threshold > 0.0 && leakage.threshold <= 1.0)) {
    throw config_error("leakage.threshold: must be in (0, 1]");
  }
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  Fields top(j, "");
  if (const auto* c = top.child("corpus")) {
    Fields f(*c, "corpus");
    f.get("path", cfg.corpus_path);
    std::string format = "csv";
    f.get("format", format);
    cfg.corpus_format = nested("corpus.format", [&] { return parse_format(format); });
    f.finish();
  }
  if (const auto* a = top.child("anchors")) {
    cfg.anchors = nested("anchors", [&] { return anchor_config_from_json(*a); });
  }
  if (const auto* fe = top.child("features")) {
    Fields f(*fe, "features");
    std::string target(to_string(cfg.features.target));
    f.get("target", target);
    cfg.features.target = nested("features.target", [&] { return parse_target(target); });
    f.get("exclude_gap_features", cfg.features.exclude_gap_features);
    f.get("include_avg_word_length", cfg.features.include_avg_word_length);
    f.get("embeddings_path", cfg.embeddings_path);
    f.finish();
  }
  if (const auto* l = top.child("learner")) {
    cfg.learner = nested("learner", [&] { return learner_from_json(*l); });
  }
  if (const auto* s = top.child("splits")) {
    Fields f(*s, "splits");
    std::string dev(to_string(cfg.dev_policy));
    std::string scope(to_string(cfg.fit_scope));
    f.get("dev_policy", dev);
    f.get("fit_scope", scope);
    cfg.dev_policy = parse_dev_policy(dev);
    cfg.fit_scope = parse_fit_scope(scope);
    f.finish();
  }
  if (const auto* e = top.child("eval")) {
    Fields f(*e, "eval");
    f.get("rel_tol", cfg.eval.rel_tol);
    f.get("kfold_k", cfg.eval.kfold_k);
    f.get("mccv_iterations", cfg.eval.mccv_iterations);
    f.get("mccv_test_fraction", cfg.eval.mccv_test_fraction);
    f.get("bootstrap_resamples", cfg.eval.bootstrap_resamples);
    f.get("bootstrap_level", cfg.eval.bootstrap_level);
    f.get("seed", cfg.eval.seed);
    f.finish();
  }
  if (const auto* l = top.child("leakage")) {
    Fields f(*l, "leakage");
    f.get("threshold", cfg.leakage.threshold);
    f.get("lowercase", cfg.leakage.lowercase);
    f.get("strip_non_alphanumeric", cfg.leakage.strip_non_alphanumeric);
    f.get("remove_stopwords", cfg.leakage.remove_stopwords);
    f.get("stem", cfg.leakage.stem);
    f.get("stopwords_path", cfg.leakage.stopwords_path);
    f.finish();
  }
  top.get("out_dir", cfg.out_dir);
  top.finish();
  cfg.check();
  return cfg;
}

nlohmann::ordered_json to_json(const PipelineConfig& cfg) {
  ojson j;
  j["corpus"] = {{"path", cfg.corpus_path},
                 {"format", cfg.corpus_format == CorpusFormat::csv ? "csv" : "jsonl"}};
  j["anchors"] = to_json(cfg.anchors);
  ojson features;
  features["target"] = std::string(to_string(cfg.features.target));
  features["exclude_gap_features"] = cfg.features.exclude_gap_features;
  features["include_avg_word_length"] = cfg.features.include_avg_word_length;
  features["embeddings_path"] =
      cfg.embeddings_path ? ojson(*cfg.embeddings_path) : ojson(nullptr);
  j["features"] = features;
  j["learner"] = to_json(cfg.learner);
  j["splits"] = {{"dev_policy", std::string(to_string(cfg.dev_policy))},
                 {"fit_scope", std::string(to_string(cfg.fit_scope))}};
  ojson eval;
  eval["rel_tol"] = cfg.eval.rel_tol;
  eval["kfold_k"] = cfg.eval.kfold_k;
  eval["mccv_iterations"] = cfg.eval.mccv_iterations;
  eval["mccv_test_fraction"] = cfg.eval.mccv_test_fraction;
  eval["bootstrap_resamples"] = cfg.eval.bootstrap_resamples;
  eval["bootstrap_level"] = cfg.eval.bootstrap_level;
  eval["seed"] = cfg.eval.seed;
  j["eval"] = eval;
  ojson leak;
  leak["threshold"] = cfg.leakage.threshold;
  leak["lowercase"] = cfg.leakage.lowercase;
  leak["strip_non_alphanumeric"] = cfg.leakage.strip_non_alphanumeric;
  leak["remove_stopwords"] = cfg.leakage.remove_stopwords;
  leak["stem"] = cfg.leakage.stem;
  leak["stopwords_path"] =
      cfg.leakage.stopwords_path ? ojson(*cfg.leakage.stopwords_path) : ojson(nullptr);
  j["leakage"] = leak;
  return j;
}

std::string config_hash(const PipelineConfig& cfg) { return hex64(fnv1a64(to_json(cfg).dump())); }

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw config_error("config file '" + path.string() + "' does not exist");
  try {
    return config_from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("config file '" + path.string() + "': " + e.what());
  }
}

// ---- commands --------------------------------------------------------------

const std::vector<Command>& all_commands() {
  static const std::vector<Command> order{Command::ingest,   Command::chronology, Command::features,
                                          Command::train,    Command::evaluate,   Command::cv,
                                          Command::rank,     Command::leakage};
  return order;
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::ingest:
      return "ingest";
    case Command::chronology:
      return "chronology";
    case Command::features:
      return "features";
    case Command::train:
      return "train";
    case Command::evaluate:
      return "evaluate";
    case Command::cv:
      return "cv";
    case Command::rank:
      return "rank";
    default:
      return "leakage";
  }
}

Command parse_command(std::string_view raw) {
  for (Command c : all_commands()) {
    if (to_string(c) == raw) return c;
  }
  throw config_error("unknown command '" + std::string(raw) + "'");
}

int run_command(Command c, const PipelineConfig& cfg, std::ostream& log) {
  cfg.check();
  fs::create_directories(cfg.out_dir);
  int code = 0;
  switch (c) {
    case Command::ingest:
      code = cmd_ingest(cfg, log);
      break;
    case Command::chronology:
      code = cmd_chronology(cfg, log);
      break;
    case Command::features:
      code = cmd_features(cfg, log);
      break;
    case Command::train:
      code = cmd_train(cfg, log);
      break;
    case Command::evaluate:
      code = cmd_evaluate(cfg, log);
      break;
    case Command::cv:
      code = cmd_cv(cfg, log);
      break;
    case Command::rank:
      code = cmd_rank(cfg, log);
      break;
    case Command::leakage:
      code = cmd_leakage(cfg, log);
      break;
  }
  update_manifest(cfg, c);
  return code;
}

int run_all(const PipelineConfig& cfg, std::ostream& log) {
  for (Command c : all_commands()) {
    if (const int code = run_command(c, cfg, log); code != 0) return code;
  }
  return 0;
}

std::vector<RankedPetition> rank_petitions(const std::vector<std::string>& names,
                                           const VectorXd& scores, TargetKind target) {
  if (static_cast<Index>(names.size()) != scores.size()) {
    throw Error("LengthMismatch", "names and scores differ in length");
  }
  const double sign = target == TargetKind::inverse_square ? 1.0 : -1.0;
  auto order = std::vector<std::size_t>(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ua = sign * scores(static_cast<Index>(a));
    const double ub = sign * scores(static_cast<Index>(b));
    if (ua != ub) return ua > ub;
    return names[a] < names[b];
  });
  std::vector<RankedPetition> out;
  out.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.push_back({k + 1, names[order[k]], scores(static_cast<Index>(order[k]))});
  }
  return out;
}

std::string file_hash(const fs::path& path) { return hex64(fnv1a64(read_text(path))); }

}  // namespace petrank
