#pragma once

// Feature matrix assembly: the numeric block derived from chronology and
// text statistics, optionally followed by an external embedding block.
//
// Embedding file format (UTF-8, one JSON document per line):
//   line 1:        {"format_version":1,"model_id":<string>,"dim":<int>,"count":<int>}
//   lines 2..N+1:  {"name":<string>,"vector":[<float> x dim]}

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/chronology.hpp"
#include "petrank/textstats.hpp"
#include "petrank/types.hpp"

namespace petrank {

enum class TargetKind { inverse_square, log };

TargetKind parse_target(std::string_view raw);  // throws ConfigError
std::string_view to_string(TargetKind t);
std::string_view target_column_name(TargetKind t);

struct FeatureSchema {
  std::vector<std::string> numeric_names;
  std::optional<std::string> embedding_model_id;
  std::size_t embedding_dim = 0;
  std::string target_name;

  std::size_t width() const { return numeric_names.size() + embedding_dim; }
  void check() const;  // throws Error("SchemaInvalid")

  bool operator==(const FeatureSchema&) const = default;
};

nlohmann::ordered_json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

struct FeatureMatrix {
  FeatureSchema schema;
  std::vector<std::string> names;
  MatrixXd values;  // n x (p + d)
  VectorXd target;  // n

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  // Rows by index, preserving the given order. Names travel with the rows.
  FeatureMatrix subset(const std::vector<std::size_t>& rows) const;
};

struct EmbeddingTable {
  std::string model_id;
  std::size_t dim = 0;
  std::map<std::string, VectorXd> vectors;
};

struct FeatureOptions {
  TargetKind target = TargetKind::inverse_square;
  // Numeric block {word_count, sentence_count, avg_word_length} only.
  bool exclude_gap_features = false;
  // Append avg_word_length to the default block.
  bool include_avg_word_length = false;
};

// Rows are ordered lexicographically by name.
// Errors: NameMismatch, DimZero.
FeatureMatrix assemble(const std::map<std::string, ChronologyFacts>& chronology,
                       const std::map<std::string, TextStats>& stats,
                       const FeatureOptions& options,
                       const EmbeddingTable* embeddings = nullptr);

// Errors: HeaderMismatch, DimensionMismatch, NonFiniteValue, DuplicateName,
// MalformedLine, IoError. Line numbers in messages are 1-based.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

// Per-column affine map x -> (x - mean) / scale, scale being the population
// standard deviation with 0 replaced by 1.
struct Standardizer {
  FeatureSchema schema;
  VectorXd mean;
  VectorXd scale;

  template <typename Derived>
  MatrixXd transform(const Eigen::MatrixBase<Derived>& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  }
};

Standardizer standardize_fit(const FeatureMatrix& matrix);
// Errors: SchemaMismatch.
FeatureMatrix standardize_apply(const FeatureMatrix& matrix, const Standardizer& table);

nlohmann::ordered_json to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& j);

// CSV with header `name,<feature columns...>,<target_name>` and values at
// round-trip precision; the schema lives in a JSON sidecar.
void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& csv_path);
FeatureMatrix read_feature_csv(const std::filesystem::path& csv_path, const FeatureSchema& schema);

}  // namespace petrank
