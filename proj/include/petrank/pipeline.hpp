#pragma once

// Pipeline configuration and the command implementations behind the CLI.
//
// Every command reads inputs named by the config, writes fixed-name
// artifacts under out_dir, and records itself in out_dir/manifest.json.
//
//   ingest      validation.json
//   chronology  chronology.csv, exclusions.csv
//   features    features.csv, features.schema.json
//   train       model.json, train_summary.json
//   evaluate    eval.json, eval.md
//   cv          cv.json
//   rank        ranking.csv
//   leakage     leakage.json

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/chronology.hpp"
#include "petrank/corpus.hpp"
#include "petrank/features.hpp"
#include "petrank/models/model.hpp"
#include "petrank/textstats.hpp"

namespace petrank {

inline constexpr const char* kVersion = "0.1.0";

// Rows of the dev split: held out of fitting and testing, or fitted on.
enum class DevPolicy { reserve, merge };
// Which rows the model is fitted on: the training split, or every row.
enum class FitScope { train, all };

struct EvalSettings {
  double rel_tol = 0.1;
  std::size_t kfold_k = 5;
  std::size_t mccv_iterations = 10;
  double mccv_test_fraction = 0.2;
  std::size_t bootstrap_resamples = 1000;  // 0 disables intervals
  double bootstrap_level = 0.95;
  std::uint64_t seed = 0;
};

struct LeakageSettings {
  double threshold = 0.8;
  bool lowercase = true;
  bool strip_non_alphanumeric = true;
  bool remove_stopwords = false;
  bool stem = false;
  std::optional<std::string> stopwords_path;  // built-in list when absent

  NormalizationConfig normalization() const;
};

struct PipelineConfig {
  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::csv;
  AnchorConfig anchors;
  FeatureOptions features;
  std::optional<std::string> embeddings_path;
  LearnerSpec learner;
  DevPolicy dev_policy = DevPolicy::reserve;
  FitScope fit_scope = FitScope::train;
  EvalSettings eval;
  LeakageSettings leakage;
  std::string out_dir = "out";

  void check() const;  // ConfigError naming the offending field
};

// Unknown keys and wrongly typed values raise ConfigError naming the field.
PipelineConfig config_from_json(const nlohmann::json& j);
// out_dir is omitted: it selects where results go, not what they are.
nlohmann::ordered_json to_json(const PipelineConfig& cfg);
std::string config_hash(const PipelineConfig& cfg);

PipelineConfig load_config(const std::filesystem::path& path);

enum class Command { ingest, chronology, features, train, evaluate, cv, rank, leakage };

Command parse_command(std::string_view raw);  // throws ConfigError
std::string_view to_string(Command c);
const std::vector<Command>& all_commands();

// Runs one command. Progress lines and the leakage verdict go to `log`.
// Returns the process exit code for outcomes that are not exceptions
// (ingest with validation violations returns 3 after writing its report).
int run_command(Command c, const PipelineConfig& cfg, std::ostream& log);

// All commands in order; stops at the first nonzero exit code.
int run_all(const PipelineConfig& cfg, std::ostream& log);

// Ranking positions: descending urgency, ties broken by name. Urgency is
// the predicted score for the inverse-square target and its negation for
// the log target.
struct RankedPetition {
  std::size_t position = 0;  // 1-based
  std::string name;
  double score = 0.0;
};
std::vector<RankedPetition> rank_petitions(const std::vector<std::string>& names,
                                           const VectorXd& scores, TargetKind target);

std::string file_hash(const std::filesystem::path& path);

}  // namespace petrank
