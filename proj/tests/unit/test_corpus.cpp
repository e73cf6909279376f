#include <doctest.h>

#include <set>
#include <sstream>

#include "petrank/corpus.hpp"
#include "petrank/csv.hpp"
#include "petrank/error.hpp"
#include "support.hpp"

using namespace petrank;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

Corpus three_rows(TempDir& dir) {
  write_file(dir / "c.csv",
             "text,label,split,name\n"
             "\"Leave granted, heard.\",1,train,2008_1.txt\n"
             "\"Dismissed.\nNo costs.\",0,Test,2009_2.txt\n"
             "Admitted,1,development,2010_3.txt\n");
  return load_corpus(dir / "c.csv", CorpusFormat::csv);
}

}  // namespace

TEST_CASE("csv reader handles quoting, embedded newlines and CRLF") {
  std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\"x\ny\",,z\n");
  csv::Reader r(in);
  auto row = r.next();
  REQUIRE(row);
  CHECK(*row == csv::Row{"a", "b,c", "say \"hi\""});
  CHECK(r.record_line() == 1);
  row = r.next();
  REQUIRE(row);
  CHECK(*row == csv::Row{"x\ny", "", "z"});
  CHECK(r.record_line() == 2);
  CHECK_FALSE(r.next());
}

TEST_CASE("csv reader rejects an unterminated quote") {
  std::istringstream in("a,\"open\n");
  csv::Reader r(in);
  CHECK(code_of([&] { r.next(); }) == "CsvSyntax");
}

TEST_CASE("csv escape round-trips through the reader") {
  const csv::Row row{"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
  std::ostringstream out;
  csv::write_row(out, row);
  std::istringstream in(out.str());
  csv::Reader r(in);
  CHECK(*r.next() == row);
}

TEST_CASE("load_corpus keeps file order and normalizes splits") {
  TempDir dir;
  const auto c = three_rows(dir);
  REQUIRE(c.size() == 3);
  CHECK(c.records[0].text == "Leave granted, heard.");
  CHECK(c.records[1].text == "Dismissed.\nNo costs.");
  CHECK(c.records[1].split == Split::test);
  CHECK(c.records[2].split == Split::dev);
  CHECK(c.records[2].split_raw == "development");
  CHECK(c.format_tag == "csv");
}

TEST_CASE("3-row fixture with labels {1,0,1} validates to accepted=2, rejected=1") {
  TempDir dir;
  const auto report = validate(three_rows(dir));
  CHECK(report.total == 3);
  CHECK(report.accepted == 2);
  CHECK(report.rejected == 1);
  CHECK(report.ok());
  CHECK(report.per_split.at("train") == 1);
  CHECK(report.per_split.at("test") == 1);
  CHECK(report.per_split.at("dev") == 1);
}

TEST_CASE("load_corpus reads jsonl with integer or string labels") {
  TempDir dir;
  write_file(dir / "c.jsonl",
             "{\"text\":\"A\",\"label\":1,\"split\":\"train\",\"name\":\"2008_1.txt\"}\n"
             "\n"
             "{\"text\":\"B\",\"label\":\"0\",\"split\":\"dev\",\"name\":\"2008_2.txt\"}\n");
  const auto c = load_corpus(dir / "c.jsonl", CorpusFormat::jsonl);
  REQUIRE(c.size() == 2);
  CHECK(c.records[0].label == 1);
  CHECK(c.records[1].label == 0);
  CHECK(c.records[1].split == Split::dev);
}

TEST_CASE("load_corpus errors") {
  TempDir dir;
  write_file(dir / "empty.csv", "");
  CHECK(code_of([&] { load_corpus(dir / "empty.csv", CorpusFormat::csv); }) == "EmptyFile");

  write_file(dir / "nocol.csv", "text,label,name\nA,1,2008_1.txt\n");
  CHECK(code_of([&] { load_corpus(dir / "nocol.csv", CorpusFormat::csv); }) == "MissingColumn");

  write_file(dir / "label.csv", "text,label,split,name\nA,2,train,2008_1.txt\n");
  CHECK(code_of([&] { load_corpus(dir / "label.csv", CorpusFormat::csv); }) == "BadLabel");

  write_file(dir / "dup.csv",
             "text,label,split,name\nA,1,train,2008_1.txt\nB,0,test,2008_1.txt\n");
  CHECK(code_of([&] { load_corpus(dir / "dup.csv", CorpusFormat::csv); }) == "DuplicateName");

  write_file(dir / "bad.jsonl", "{\"text\":\"A\",\n");
  CHECK(code_of([&] { load_corpus(dir / "bad.jsonl", CorpusFormat::jsonl); }) == "JsonSyntax");

  CHECK(code_of([&] { load_corpus(dir / "missing.csv", CorpusFormat::csv); }) == "IoError");
}

TEST_CASE("load_corpus tolerates a UTF-8 byte order mark") {
  TempDir dir;
  write_file(dir / "bom.csv", "\xEF\xBB\xBFtext,label,split,name\nA,1,train,2008_1.txt\n");
  CHECK(load_corpus(dir / "bom.csv", CorpusFormat::csv).size() == 1);
}

TEST_CASE("validate reports each rule") {
  Corpus c;
  c.records = {{"ok", 1, Split::train, "train", "2008_1.txt"},
               {"ok", 2, Split::train, "train", "2008_2.txt"},
               {"ok", 1, Split::unknown, "holdout", "2008_3.txt"},
               {"ok", 0, Split::test, "test", "x.txt"},
               {"  ", 0, Split::test, "test", "2008_5.txt"},
               {"ok", 0, Split::test, "test", "2008_5.txt"}};
  const auto report = validate(c);
  std::set<std::pair<std::size_t, std::string>> seen;
  for (const auto& v : report.violations) seen.emplace(v.row, v.rule);
  CHECK(seen.count({1, "label-domain"}));
  CHECK(seen.count({2, "split-domain"}));
  CHECK(seen.count({3, "name-format"}));
  CHECK(seen.count({4, "text-empty"}));
  CHECK(seen.count({5, "name-unique"}));
  CHECK(report.violations.size() == 5);
  CHECK(report.total == 6);
}

TEST_CASE("parse_petition_name") {
  CHECK(parse_petition_name("2008_1460.txt") == 2008);
  CHECK_FALSE(parse_petition_name("x.txt"));
  CHECK_FALSE(parse_petition_name("1799_1.txt"));
  CHECK_FALSE(parse_petition_name("2101_1.txt"));
  CHECK_FALSE(parse_petition_name("2008_0.txt"));
  CHECK_FALSE(parse_petition_name("2008_12.pdf"));
  CHECK_FALSE(parse_petition_name("08_12.txt"));
}

TEST_CASE("split aliases") {
  CHECK(normalize_split("DEV") == Split::dev);
  CHECK(normalize_split("Development") == Split::dev);
  CHECK(normalize_split("TRAIN") == Split::train);
  CHECK(normalize_split("validation") == Split::unknown);
  CHECK(code_of([] { parse_split("validation"); }) == "UnknownSplit");
}

TEST_CASE("filter_accepted keeps order, is idempotent, and rejects an all-rejected corpus") {
  TempDir dir;
  const auto c = three_rows(dir);
  const auto a = filter_accepted(c);
  REQUIRE(a.size() == 2);
  CHECK(a.records[0].name == "2008_1.txt");
  CHECK(a.records[1].name == "2010_3.txt");
  const auto aa = filter_accepted(a);
  REQUIRE(aa.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(aa.records[i].name == a.records[i].name);

  Corpus rejected;
  rejected.records = {{"x", 0, Split::train, "train", "2008_1.txt"}};
  CHECK(code_of([&] { filter_accepted(rejected); }) == "EmptyResult");
}

TEST_CASE("split views partition a valid corpus") {
  TempDir dir;
  const auto c = three_rows(dir);
  std::multiset<std::string> names;
  std::size_t total = 0;
  for (auto s : {Split::train, Split::test, Split::dev}) {
    const auto v = split_view(c, s);
    total += v.size();
    for (const auto& r : v.records) names.insert(r.name);
  }
  CHECK(total == c.size());
  CHECK(names.size() == std::set<std::string>(names.begin(), names.end()).size());

  Corpus train_only;
  train_only.records = {{"x", 1, Split::train, "train", "2008_1.txt"}};
  CHECK(split_view(train_only, Split::dev).empty());
  CHECK(code_of([&] { split_view(c, Split::unknown); }) == "UnknownSplit");
}

TEST_CASE("validation report JSON is stable across loads") {
  TempDir dir;
  const auto a = to_json(validate(three_rows(dir))).dump();
  const auto b = to_json(validate(three_rows(dir))).dump();
  CHECK(a == b);
}

TEST_CASE("write_corpus_csv round-trips") {
  TempDir dir;
  const auto c = three_rows(dir);
  write_corpus_csv(c, dir / "out.csv");
  const auto back = load_corpus(dir / "out.csv", CorpusFormat::csv);
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(back.records[i].text == c.records[i].text);
    CHECK(back.records[i].label == c.records[i].label);
    CHECK(back.records[i].split == c.records[i].split);
    CHECK(back.records[i].name == c.records[i].name);
  }
}
