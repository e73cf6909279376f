#include "petrank/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>

#include "petrank/csv.hpp"
#include "petrank/error.hpp"

namespace petrank {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::vector<std::string> numeric_block(const FeatureOptions& o) {
  if (o.exclude_gap_features) return {"word_count", "sentence_count", "avg_word_length"};
  std::vector<std::string> names{"gap_days"};
  if (o.target != TargetKind::log) names.emplace_back("rank_score_log");
  names.emplace_back("word_count");
  names.emplace_back("sentence_count");
  if (o.include_avg_word_length) names.emplace_back("avg_word_length");
  return names;
}

double numeric_value(const std::string& column, const ChronologyFacts& f, const TextStats& s) {
  if (column == "gap_days") return static_cast<double>(f.gap_days);
  if (column == "rank_score_log") return f.rank_score_log;
  if (column == "word_count") return static_cast<double>(s.word_count);
  if (column == "sentence_count") return static_cast<double>(s.sentence_count);
  return s.avg_word_length;
}

std::vector<std::string> csv_columns(const FeatureSchema& schema) {
  std::vector<std::string> cols{"name"};
  cols.insert(cols.end(), schema.numeric_names.begin(), schema.numeric_names.end());
  for (std::size_t k = 0; k < schema.embedding_dim; ++k) cols.push_back("emb_" + std::to_string(k));
  cols.push_back(schema.target_name);
  return cols;
}

}  // namespace

TargetKind parse_target(std::string_view raw) {
  if (raw == "inverse_square" || raw == "rank_score_inverse_square") return TargetKind::inverse_square;
  if (raw == "log" || raw == "rank_score_log") return TargetKind::log;
  throw config_error("target must be inverse_square or log, got '" + std::string(raw) + "'");
}

std::string_view to_string(TargetKind t) {
  return t == TargetKind::log ? "log" : "inverse_square";
}

std::string_view target_column_name(TargetKind t) {
  return t == TargetKind::log ? "rank_score_log" : "rank_score_inverse_square";
}

void FeatureSchema::check() const {
  std::set<std::string> seen;
  for (const auto& n : numeric_names) {
    if (!seen.insert(n).second) throw Error("SchemaInvalid", "duplicate feature name " + n);
  }
  if ((embedding_dim == 0) != !embedding_model_id.has_value()) {
    throw Error("SchemaInvalid", "embedding_dim and embedding_model_id disagree");
  }
  if (seen.count(target_name)) {
    throw Error("SchemaInvalid", "target " + target_name + " is also a feature column");
  }
}

nlohmann::ordered_json to_json(const FeatureSchema& schema) {
  nlohmann::ordered_json j;
  j["numeric_names"] = schema.numeric_names;
  j["embedding_model_id"] = schema.embedding_model_id
                                ? nlohmann::ordered_json(*schema.embedding_model_id)
                                : nlohmann::ordered_json(nullptr);
  j["embedding_dim"] = schema.embedding_dim;
  j["target_name"] = schema.target_name;
  return j;
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
  FeatureSchema s;
  try {
    s.numeric_names = j.at("numeric_names").get<std::vector<std::string>>();
    if (!j.at("embedding_model_id").is_null()) {
      s.embedding_model_id = j.at("embedding_model_id").get<std::string>();
    }
    s.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    s.target_name = j.at("target_name").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("SchemaInvalid", e.what());
  }
  s.check();
  return s;
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::size_t>& rows) const {
  FeatureMatrix out;
  out.schema = schema;
  out.values.resize(static_cast<Index>(rows.size()), values.cols());
  out.target.resize(static_cast<Index>(rows.size()));
  out.names.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Index>(rows[i]);
    out.values.row(static_cast<Index>(i)) = values.row(r);
    out.target(static_cast<Index>(i)) = target(r);
    out.names.push_back(names[rows[i]]);
  }
  return out;
}

FeatureMatrix assemble(const std::map<std::string, ChronologyFacts>& chronology,
                       const std::map<std::string, TextStats>& stats,
                       const FeatureOptions& options, const EmbeddingTable* embeddings) {
  std::vector<std::string> missing;
  for (const auto& [name, _] : chronology) {
    if (!stats.count(name)) missing.push_back(name + " (stats)");
  }
  for (const auto& [name, _] : stats) {
    if (!chronology.count(name)) missing.push_back(name + " (chronology)");
  }
  if (embeddings) {
    if (embeddings->dim == 0) throw Error("DimZero", "embedding table has dim 0");
    for (const auto& [name, _] : chronology) {
      if (!embeddings->vectors.count(name)) missing.push_back(name + " (embeddings)");
    }
  }
  if (!missing.empty()) throw Error("NameMismatch", join(missing));

  FeatureMatrix m;
  m.schema.numeric_names = numeric_block(options);
  m.schema.target_name = std::string(target_column_name(options.target));
  if (embeddings) {
    m.schema.embedding_model_id = embeddings->model_id;
    m.schema.embedding_dim = embeddings->dim;
  }
  m.schema.check();

  const auto n = static_cast<Index>(chronology.size());
  const auto p = static_cast<Index>(m.schema.numeric_names.size());
  m.values.resize(n, static_cast<Index>(m.schema.width()));
  m.target.resize(n);
  m.names.reserve(chronology.size());
  Index i = 0;
  for (const auto& [name, facts] : chronology) {
    const auto& st = stats.at(name);
    for (Index c = 0; c < p; ++c) {
      m.values(i, c) = numeric_value(m.schema.numeric_names[static_cast<std::size_t>(c)], facts, st);
    }
    if (embeddings) {
      const auto& v = embeddings->vectors.at(name);
      if (static_cast<std::size_t>(v.size()) != embeddings->dim) {
        throw Error("DimensionMismatch", "embedding for " + name);
      }
      m.values.row(i).segment(p, v.size()) = v.transpose();
    }
    m.target(i) = options.target == TargetKind::log ? facts.rank_score_log
                                                    : facts.rank_score_inverse_square;
    m.names.push_back(name);
    ++i;
  }
  if (!m.values.allFinite() || !m.target.allFinite()) {
    throw Error("NonFiniteValue", "assembled feature matrix has non-finite entries");
  }
  return m;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  static const std::regex non_finite(R"((^|[^A-Za-z])(NaN|nan|-?Infinity|-?inf)([^A-Za-z]|$))");

  std::string line;
  if (!std::getline(in, line)) throw Error("HeaderMismatch", "missing header line");
  EmbeddingTable table;
  std::size_t count = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("format_version").get<int>() != 1) {
      throw Error("HeaderMismatch", "unsupported format_version");
    }
    table.model_id = header.at("model_id").get<std::string>();
    const auto dim = header.at("dim").get<long long>();
    const auto cnt = header.at("count").get<long long>();
    if (dim < 1 || cnt < 0) throw Error("HeaderMismatch", "dim must be >= 1 and count >= 0");
    table.dim = static_cast<std::size_t>(dim);
    count = static_cast<std::size_t>(cnt);
  } catch (const nlohmann::json::exception& e) {
    throw Error("HeaderMismatch", std::string("line 1: ") + e.what());
  }

  std::size_t line_no = 1;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      if (std::regex_search(line, non_finite)) throw Error("NonFiniteValue", where);
      throw Error("MalformedLine", where);
    }
    if (!obj.is_object() || !obj.contains("name") || !obj.contains("vector") ||
        !obj["name"].is_string() || !obj["vector"].is_array()) {
      throw Error("MalformedLine", where + ": expected {\"name\":..., \"vector\":[...]}");
    }
    const auto& arr = obj["vector"];
    if (arr.size() != table.dim) {
      throw Error("DimensionMismatch", where + ": length " + std::to_string(arr.size()) +
                                           " under dim " + std::to_string(table.dim));
    }
    VectorXd v(static_cast<Index>(table.dim));
    for (std::size_t k = 0; k < table.dim; ++k) {
      if (!arr[k].is_number()) {
        if (arr[k].is_null()) throw Error("NonFiniteValue", where);
        throw Error("MalformedLine", where + ": non-numeric vector entry");
      }
      v(static_cast<Index>(k)) = arr[k].get<double>();
    }
    if (!v.allFinite()) throw Error("NonFiniteValue", where);
    auto name = obj["name"].get<std::string>();
    if (!table.vectors.emplace(std::move(name), std::move(v)).second) {
      throw Error("DuplicateName", where);
    }
    ++records;
  }
  if (records != count) {
    throw Error("HeaderMismatch", "header count " + std::to_string(count) + " but " +
                                      std::to_string(records) + " records");
  }
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  nlohmann::ordered_json header;
  header["format_version"] = 1;
  header["model_id"] = table.model_id;
  header["dim"] = table.dim;
  header["count"] = table.vectors.size();
  out << header.dump() << '\n';
  for (const auto& [name, v] : table.vectors) {
    nlohmann::ordered_json rec;
    rec["name"] = name;
    rec["vector"] = std::vector<double>(v.data(), v.data() + v.size());
    out << rec.dump() << '\n';
  }
}

Standardizer standardize_fit(const FeatureMatrix& matrix) {
  Standardizer s;
  s.schema = matrix.schema;
  const auto n = static_cast<double>(matrix.rows());
  if (matrix.rows() == 0) {
    s.mean = VectorXd::Zero(matrix.cols());
    s.scale = VectorXd::Ones(matrix.cols());
    return s;
  }
  s.mean = matrix.values.colwise().mean().transpose();
  const MatrixXd centered = matrix.values.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().sum() / n).sqrt().transpose();
  for (Index c = 0; c < s.scale.size(); ++c) {
    if (s.scale(c) == 0.0) s.scale(c) = 1.0;
  }
  return s;
}

FeatureMatrix standardize_apply(const FeatureMatrix& matrix, const Standardizer& table) {
  if (!(matrix.schema == table.schema) || table.mean.size() != matrix.cols()) {
    throw Error("SchemaMismatch", "standardizer was fit on a different schema");
  }
  FeatureMatrix out = matrix;
  out.values = table.transform(matrix.values);
  return out;
}

nlohmann::ordered_json to_json(const Standardizer& s) {
  nlohmann::ordered_json j;
  j["schema"] = to_json(s.schema);
  j["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
  j["scale"] = std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size());
  return j;
}

Standardizer standardizer_from_json(const nlohmann::json& j) {
  Standardizer s;
  s.schema = schema_from_json(j.at("schema"));
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto scale = j.at("scale").get<std::vector<double>>();
  if (mean.size() != scale.size() || mean.size() != s.schema.width()) {
    throw Error("CorruptFile", "standardizer width mismatch");
  }
  s.mean = Eigen::Map<const VectorXd>(mean.data(), static_cast<Index>(mean.size()));
  s.scale = Eigen::Map<const VectorXd>(scale.data(), static_cast<Index>(scale.size()));
  return s;
}

void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + csv_path.string());
  csv::write_row(out, csv_columns(m.schema));
  for (Index i = 0; i < m.rows(); ++i) {
    csv::Row row{m.names[static_cast<std::size_t>(i)]};
    for (Index c = 0; c < m.cols(); ++c) row.push_back(format_double(m.values(i, c)));
    row.push_back(format_double(m.target(i)));
    csv::write_row(out, row);
  }
}

FeatureMatrix read_feature_csv(const std::filesystem::path& csv_path, const FeatureSchema& schema) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + csv_path.string());
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header || *header != csv_columns(schema)) {
    throw Error("SchemaMismatch", csv_path.string() + ": header does not match schema");
  }
  std::vector<csv::Row> rows;
  while (auto row = reader.next()) {
    if (row->size() != header->size()) {
      throw Error("CorruptFile", csv_path.string() + ": bad row at line " +
                                     std::to_string(reader.record_line()));
    }
    rows.push_back(std::move(*row));
  }
  FeatureMatrix m;
  m.schema = schema;
  const auto w = static_cast<Index>(schema.width());
  m.values.resize(static_cast<Index>(rows.size()), w);
  m.target.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.names.push_back(rows[i][0]);
    for (Index c = 0; c < w; ++c) {
      m.values(static_cast<Index>(i), c) = std::stod(rows[i][static_cast<std::size_t>(c) + 1]);
    }
    m.target(static_cast<Index>(i)) = std::stod(rows[i].back());
  }
  return m;
}

}  // namespace petrank
