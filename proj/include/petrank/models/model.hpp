#pragma once

// Learner dispatch, the TrainedModel envelope, and model files.
//
// Model file (JSON):
//   {"version":1, "kind":..., "params":{...}, "schema":{...},
//    "fingerprint":{...}, "payload":{...}}
// Doubles are written in shortest round-trip form, so a load/save cycle
// reproduces predictions bit for bit.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "petrank/features.hpp"
#include "petrank/models/ensemble.hpp"
#include "petrank/models/linear.hpp"
#include "petrank/models/tree.hpp"

namespace petrank {

inline constexpr int kModelFileVersion = 1;

enum class ModelKind { tree, forest, gbt, ols, elastic_net };

ModelKind parse_model_kind(std::string_view raw);  // throws ConfigError
std::string_view to_string(ModelKind k);

struct LearnerSpec {
  ModelKind kind = ModelKind::forest;
  TreeParams tree;
  ForestParams forest;
  GbtParams gbt;
  ElasticNetParams elastic_net;
  // Fit a Standardizer on the training rows and apply it before the learner.
  // Defaults to on for elastic_net only.
  std::optional<bool> standardize;

  bool effective_standardize() const {
    return standardize.value_or(kind == ModelKind::elastic_net);
  }
  std::uint64_t seed() const;
  void check() const;
};

// Only the parameter block of the selected kind is serialized.
nlohmann::ordered_json to_json(const LearnerSpec& spec);
LearnerSpec learner_from_json(const nlohmann::json& j);

struct Fingerprint {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string config_hash;  // FNV-1a of the serialized learner spec
  std::string state_hash;   // FNV-1a of the serialized fitted payload

  bool operator==(const Fingerprint&) const = default;
};

struct ElasticNetDiagnostics {
  bool converged = false;
  int iterations = 0;
  bool not_standardized = false;
};

using ModelState = std::variant<RegressionTree, RandomForest, GradientBoosted, LinearModel>;

struct TrainedModel {
  LearnerSpec spec;
  ModelState state;
  FeatureSchema schema;
  std::optional<Standardizer> standardizer;
  std::optional<ElasticNetDiagnostics> diagnostics;
  Fingerprint fingerprint;

  ModelKind kind() const { return spec.kind; }
};

// Errors: EmptyMatrix, SchemaInvalid, ConfigError.
TrainedModel fit(const LearnerSpec& spec, const FeatureMatrix& x);

TrainedModel fit_tree(const FeatureMatrix& x, const TreeParams& params);
TrainedModel fit_forest(const FeatureMatrix& x, const ForestParams& params);
TrainedModel fit_gbt(const FeatureMatrix& x, const GbtParams& params);
TrainedModel fit_ols(const FeatureMatrix& x);
TrainedModel fit_elastic_net(const FeatureMatrix& x, const ElasticNetParams& params);

// Errors: SchemaMismatch.
VectorXd predict(const TrainedModel& model, const FeatureMatrix& x);

nlohmann::ordered_json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);  // VersionMismatch, CorruptFile

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace petrank
