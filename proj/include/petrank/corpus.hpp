#pragma once

// Petition corpus: loading (CSV or JSONL with columns text,label,split,name),
// validation, accepted-only filtering and split views.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace petrank {

enum class Split { train, test, dev, unknown };

enum class CorpusFormat { csv, jsonl };

// "train", "test", "dev"/"development" (case-insensitive). Anything else
// yields Split::unknown; the raw value is kept on the record for reporting.
Split normalize_split(std::string_view raw);

// Strict variant for user-facing arguments; throws Error("UnknownSplit").
Split parse_split(std::string_view raw);

std::string_view to_string(Split s);

CorpusFormat parse_format(std::string_view raw);

struct PetitionRecord {
  std::string text;
  int label = 0;  // 1 = accepted, 0 = rejected
  Split split = Split::unknown;
  std::string split_raw;
  std::string name;  // "<year>_<caseno>.txt"
};

struct Corpus {
  std::vector<PetitionRecord> records;
  std::string source_path;
  std::string format_tag;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

struct Violation {
  std::size_t row = 0;
  std::string rule;  // "label-domain", "split-domain", "name-format", ...
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_split;  // keys: train, test, dev
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Parses "<4-digit year>_<positive int>.txt" with year in [1800, 2100].
// Returns the year on success.
std::optional<int> parse_petition_name(std::string_view name);

// Errors: EmptyFile, MissingColumn, BadLabel, DuplicateName, CsvSyntax,
// JsonSyntax, IoError.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

ValidationReport validate(const Corpus& corpus);

// Errors: EmptyResult when no record has label 1.
Corpus filter_accepted(const Corpus& corpus);

// Errors: UnknownSplit when `which` is Split::unknown.
Corpus split_view(const Corpus& corpus, Split which);

nlohmann::ordered_json to_json(const ValidationReport& report);

void write_corpus_csv(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace petrank
