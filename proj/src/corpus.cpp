#include "petrank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "petrank/csv.hpp"
#include "petrank/error.hpp"

namespace petrank {
namespace {

constexpr std::array<std::string_view, 4> kColumns = {"text", "label", "split",
                                                      "name"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

int parse_label(std::string_view raw, std::size_t row) {
  const auto t = trim(raw);
  if (t == "0") return 0;
  if (t == "1") return 1;
  throw Error("BadLabel", "row " + std::to_string(row) + ": label '" +
                              std::string(raw) + "'");
}

int parse_json_label(const nlohmann::json& v, std::size_t row) {
  if (v.is_number_integer()) {
    const auto x = v.get<long long>();
    if (x == 0 || x == 1) return static_cast<int>(x);
  } else if (v.is_string()) {
    return parse_label(std::string_view(v.get_ref<const std::string&>()), row);
  } else if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x == 0.0 || x == 1.0) return static_cast<int>(x);
  }
  throw Error("BadLabel", "row " + std::to_string(row) + ": label " + v.dump());
}

void add_record(Corpus& corpus, std::unordered_set<std::string>& names,
                PetitionRecord rec) {
  if (!names.insert(rec.name).second) {
    throw Error("DuplicateName", rec.name);
  }
  corpus.records.push_back(std::move(rec));
}

Corpus load_csv(const std::filesystem::path& path, std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || (header->size() == 1 && trim((*header)[0]).empty())) {
    throw Error("EmptyFile", path.string());
  }
  // Tolerate a UTF-8 byte order mark on the first column name.
  if (!header->empty() && header->front().rfind("\xEF\xBB\xBF", 0) == 0) {
    header->front().erase(0, 3);
  }
  std::array<std::size_t, kColumns.size()> col{};
  for (std::size_t k = 0; k < kColumns.size(); ++k) {
    const auto it = std::find_if(header->begin(), header->end(), [&](const auto& h) {
      return trim(h) == kColumns[k];
    });
    if (it == header->end()) throw Error("MissingColumn", std::string(kColumns[k]));
    col[k] = static_cast<std::size_t>(it - header->begin());
  }

  Corpus corpus;
  corpus.source_path = path.string();
  corpus.format_tag = "csv";
  std::unordered_set<std::string> names;
  std::size_t row = 0;
  while (auto fields = reader.next()) {
    if (fields->size() == 1 && fields->front().empty()) continue;  // blank line
    if (fields->size() != header->size()) {
      throw Error("CsvSyntax", "line " + std::to_string(reader.record_line()) +
                                   ": expected " + std::to_string(header->size()) +
                                   " fields, got " + std::to_string(fields->size()));
    }
    PetitionRecord rec;
    rec.text = std::move((*fields)[col[0]]);
    rec.label = parse_label(std::string_view((*fields)[col[1]]), row);
    rec.split_raw = (*fields)[col[2]];
    rec.split = normalize_split(rec.split_raw);
    rec.name = std::string(trim((*fields)[col[3]]));
    add_record(corpus, names, std::move(rec));
    ++row;
  }
  return corpus;
}

Corpus load_jsonl(const std::filesystem::path& path, std::istream& in) {
  Corpus corpus;
  corpus.source_path = path.string();
  corpus.format_tag = "jsonl";
  std::unordered_set<std::string> names;
  std::string line;
  std::size_t row = 0;
  std::size_t line_no = 0;
  bool any_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    any_content = true;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("JsonSyntax", "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error("JsonSyntax", "line " + std::to_string(line_no) + ": not an object");
    }
    for (auto key : kColumns) {
      if (!obj.contains(std::string(key))) throw Error("MissingColumn", std::string(key));
    }
    PetitionRecord rec;
    if (!obj["text"].is_string() || !obj["name"].is_string() || !obj["split"].is_string()) {
      throw Error("JsonSyntax", "line " + std::to_string(line_no) +
                                    ": text, split and name must be strings");
    }
    rec.text = obj["text"].get<std::string>();
    rec.label = parse_json_label(obj["label"], row);
    rec.split_raw = obj["split"].get<std::string>();
    rec.split = normalize_split(rec.split_raw);
    rec.name = std::string(trim(obj["name"].get<std::string>()));
    add_record(corpus, names, std::move(rec));
    ++row;
  }
  if (!any_content) throw Error("EmptyFile", path.string());
  return corpus;
}

}  // namespace

Split normalize_split(std::string_view raw) {
  const auto s = lower(trim(raw));
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  if (s == "dev" || s == "development") return Split::dev;
  return Split::unknown;
}

Split parse_split(std::string_view raw) {
  const auto s = normalize_split(raw);
  if (s == Split::unknown) throw Error("UnknownSplit", std::string(raw));
  return s;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::test:
      return "test";
    case Split::dev:
      return "dev";
    default:
      return "unknown";
  }
}

CorpusFormat parse_format(std::string_view raw) {
  const auto s = lower(raw);
  if (s == "csv") return CorpusFormat::csv;
  if (s == "jsonl") return CorpusFormat::jsonl;
  throw config_error("corpus format must be csv or jsonl, got '" + std::string(raw) + "'");
}

std::optional<int> parse_petition_name(std::string_view name) {
  constexpr std::string_view suffix = ".txt";
  if (name.size() < 4 + 1 + 1 + suffix.size()) return std::nullopt;
  if (name.substr(name.size() - suffix.size()) != suffix) return std::nullopt;
  if (name[4] != '_') return std::nullopt;
  int year = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    year = year * 10 + (name[i] - '0');
  }
  const auto caseno = name.substr(5, name.size() - 5 - suffix.size());
  if (caseno.empty()) return std::nullopt;
  bool nonzero = false;
  for (char c : caseno) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    nonzero = nonzero || c != '0';
  }
  if (!nonzero) return std::nullopt;
  if (year < 1800 || year > 2100) return std::nullopt;
  return year;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  if (in.peek() == std::char_traits<char>::eof()) throw Error("EmptyFile", path.string());
  return format == CorpusFormat::csv ? load_csv(path, in) : load_jsonl(path, in);
}

ValidationReport validate(const Corpus& corpus) {
  ValidationReport report;
  report.total = corpus.size();
  report.per_split = {{"train", 0}, {"test", 0}, {"dev", 0}};
  std::set<std::string> seen;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    if (r.label == 1) {
      ++report.accepted;
    } else if (r.label == 0) {
      ++report.rejected;
    } else {
      report.violations.push_back(
          {i, "label-domain", "label " + std::to_string(r.label) + " not in {0,1}"});
    }
    if (r.split == Split::unknown) {
      report.violations.push_back(
          {i, "split-domain", "split '" + r.split_raw + "' not in {train,test,dev}"});
    } else {
      ++report.per_split[std::string(to_string(r.split))];
    }
    if (!parse_petition_name(r.name)) {
      report.violations.push_back(
          {i, "name-format", "name '" + r.name + "' is not <year>_<caseno>.txt"});
    }
    if (!seen.insert(r.name).second) {
      report.violations.push_back({i, "name-unique", "duplicate name '" + r.name + "'"});
    }
    if (trim(r.text).empty()) {
      report.violations.push_back({i, "text-empty", "text is empty after trimming"});
    }
  }
  return report;
}

Corpus filter_accepted(const Corpus& corpus) {
  Corpus out;
  out.source_path = corpus.source_path;
  out.format_tag = corpus.format_tag;
  std::copy_if(corpus.records.begin(), corpus.records.end(),
               std::back_inserter(out.records),
               [](const PetitionRecord& r) { return r.label == 1; });
  if (out.empty()) throw Error("EmptyResult", "no accepted records in " + corpus.source_path);
  return out;
}

Corpus split_view(const Corpus& corpus, Split which) {
  if (which == Split::unknown) throw Error("UnknownSplit", "unknown");
  Corpus out;
  out.source_path = corpus.source_path;
  out.format_tag = corpus.format_tag;
  std::copy_if(corpus.records.begin(), corpus.records.end(),
               std::back_inserter(out.records),
               [which](const PetitionRecord& r) { return r.split == which; });
  return out;
}

nlohmann::ordered_json to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["total"] = report.total;
  j["per_split"] = nlohmann::ordered_json::object();
  for (const auto& key : {"train", "test", "dev"}) {
    const auto it = report.per_split.find(key);
    j["per_split"][key] = it == report.per_split.end() ? 0 : it->second;
  }
  j["accepted"] = report.accepted;
  j["rejected"] = report.rejected;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back({{"row", v.row}, {"rule", v.rule}, {"message", v.message}});
  }
  return j;
}

void write_corpus_csv(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  csv::write_row(out, {"text", "label", "split", "name"});
  for (const auto& r : corpus.records) {
    csv::write_row(out, {r.text, std::to_string(r.label),
                         r.split == Split::unknown ? r.split_raw : std::string(to_string(r.split)),
                         r.name});
  }
}

}  // namespace petrank
