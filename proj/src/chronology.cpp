#include "petrank/chronology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <tuple>

#include "petrank/csv.hpp"

namespace petrank {
namespace {

constexpr const char* kMonthAlternation =
    "january|february|march|april|may|june|july|august|september|october|november|"
    "december|jan|feb|mar|apr|jun|jul|aug|sept|sep|oct|nov|dec";

// Capture groups:
//   1-3   YYYY-MM-DD
//   4-7   D<sep>M<sep>YYYY (group 5 is the separator, reused via \5)
//   8-10  D Month YYYY
//   11-13 Month D, YYYY
const std::regex& date_regex() {
  static const std::regex re(
      std::string("(\\d{4})-(\\d{2})-(\\d{2})") +
          "|(\\d{1,2})([/-])(\\d{1,2})\\5(\\d{4})" +
          "|(\\d{1,2})(?:st|nd|rd|th)?\\s+(?:of\\s+)?(" + kMonthAlternation +
          ")\\.?,?\\s+(\\d{4})" + "|(" + kMonthAlternation +
          ")\\.?\\s+(\\d{1,2})(?:st|nd|rd|th)?,?\\s+(\\d{4})",
      std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return re;
}

unsigned month_from_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static const char* prefixes[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                   "jul", "aug", "sep", "oct", "nov", "dec"};
  for (unsigned m = 0; m < 12; ++m) {
    if (name.compare(0, 3, prefixes[m]) == 0) return m + 1;
  }
  return 0;
}

bool is_ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Byte offsets one past each whole-word occurrence of `keyword` in the
// lowercased text.
std::vector<std::size_t> keyword_ends(const std::string& lowered, const std::string& keyword) {
  std::vector<std::size_t> ends;
  if (keyword.empty()) return ends;
  for (std::size_t pos = lowered.find(keyword); pos != std::string::npos;
       pos = lowered.find(keyword, pos + 1)) {
    const std::size_t end = pos + keyword.size();
    const bool left_ok = pos == 0 || !is_ascii_alnum(lowered[pos - 1]);
    const bool right_ok = end == lowered.size() || !is_ascii_alnum(lowered[end]);
    if (left_ok && right_ok) ends.push_back(end);
  }
  return ends;
}

std::vector<AnchoredMatch> anchored(const std::string& lowered,
                                    const std::vector<DateMatch>& dates,
                                    const std::vector<std::string>& keywords,
                                    AnchorRole role, std::size_t window) {
  std::vector<AnchoredMatch> out;
  for (const auto& kw : keywords) {
    const auto key = ascii_lower(kw);
    for (std::size_t end : keyword_ends(lowered, key)) {
      for (const auto& d : dates) {
        if (d.offset >= end && d.offset - end <= window) {
          out.push_back({role, kw, d.date, d.offset});
        }
      }
    }
  }
  return out;
}

std::string describe(const std::vector<AnchoredMatch>& trace) {
  std::string s = std::to_string(trace.size()) + " anchored match(es)";
  for (const auto& m : trace) {
    s += "; ";
    s += m.role == AnchorRole::acceptance ? "acceptance" : "proceeding";
    s += " '" + m.keyword + "' " + format_date(m.date) + " @" + std::to_string(m.offset);
  }
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date parse_iso_date(std::string_view s) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  const std::string str(s);
  if (std::sscanf(str.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3 || str.size() != 10) {
    throw Error("BadDate", "'" + str + "' is not YYYY-MM-DD");
  }
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw Error("BadDate", "'" + str + "' is not a calendar date");
  return date;
}

void AnchorConfig::check() const {
  if (acceptance_keywords.empty()) throw config_error("anchors.acceptance_keywords is empty");
  if (proceeding_keywords.empty()) throw config_error("anchors.proceeding_keywords is empty");
  if (window_chars < 1) throw config_error("anchors.window_chars must be >= 1");
  for (const auto* list : {&acceptance_keywords, &proceeding_keywords}) {
    for (const auto& k : *list) {
      if (k.empty()) throw config_error("anchor keywords must be non-empty");
    }
  }
}

AnchorConfig anchor_config_from_json(const nlohmann::json& j) {
  AnchorConfig cfg;
  try {
    if (j.contains("acceptance_keywords")) {
      cfg.acceptance_keywords = j.at("acceptance_keywords").get<std::vector<std::string>>();
    }
    if (j.contains("proceeding_keywords")) {
      cfg.proceeding_keywords = j.at("proceeding_keywords").get<std::vector<std::string>>();
    }
    if (j.contains("window_chars")) {
      const auto w = j.at("window_chars").get<long long>();
      if (w < 1) throw config_error("anchors.window_chars must be >= 1");
      cfg.window_chars = static_cast<std::size_t>(w);
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("anchors: ") + e.what());
  }
  cfg.check();
  return cfg;
}

nlohmann::ordered_json to_json(const AnchorConfig& cfg) {
  nlohmann::ordered_json j;
  j["acceptance_keywords"] = cfg.acceptance_keywords;
  j["proceeding_keywords"] = cfg.proceeding_keywords;
  j["window_chars"] = cfg.window_chars;
  return j;
}

double rank_score_log(std::int64_t gap_days) {
  return std::log1p(static_cast<double>(gap_days));
}

double rank_score_inverse_square(std::int64_t gap_days) {
  const double g = static_cast<double>(std::max<std::int64_t>(gap_days, 1));
  return 1.0 / (g * g);
}

std::int64_t gap_days_between(const Date& a, const Date& b) {
  const auto diff = (std::chrono::sys_days{b} - std::chrono::sys_days{a}).count();
  return diff < 0 ? -diff : diff;
}

std::vector<DateMatch> find_dates(std::string_view text) {
  std::vector<DateMatch> out;
  const auto& re = date_regex();
  auto begin = text.begin();
  const auto end = text.end();
  std::match_results<std::string_view::const_iterator> m;
  auto flags = std::regex_constants::match_default;
  while (begin != end && std::regex_search(begin, end, m, re, flags)) {
    const auto start = static_cast<std::size_t>(m[0].first - text.begin());
    const auto stop = static_cast<std::size_t>(m[0].second - text.begin());
    const bool left_ok = start == 0 || !is_ascii_alnum(text[start - 1]);
    const bool right_ok = stop == text.size() || !std::isdigit(static_cast<unsigned char>(text[stop]));

    int y = 0;
    unsigned mo = 0, d = 0;
    if (m[1].matched) {
      y = std::stoi(m[1].str());
      mo = static_cast<unsigned>(std::stoi(m[2].str()));
      d = static_cast<unsigned>(std::stoi(m[3].str()));
    } else if (m[4].matched) {
      d = static_cast<unsigned>(std::stoi(m[4].str()));
      mo = static_cast<unsigned>(std::stoi(m[6].str()));
      y = std::stoi(m[7].str());
    } else if (m[8].matched) {
      d = static_cast<unsigned>(std::stoi(m[8].str()));
      mo = month_from_name(m[9].str());
      y = std::stoi(m[10].str());
    } else {
      mo = month_from_name(m[11].str());
      d = static_cast<unsigned>(std::stoi(m[12].str()));
      y = std::stoi(m[13].str());
    }
    const Date date{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};

    if (left_ok && right_ok && date.ok()) {
      out.push_back({date, start, stop - start});
      begin = m[0].second;
    } else {
      begin = m[0].first + 1;
    }
    flags = std::regex_constants::match_prev_avail;
  }
  return out;
}

ChronologyFacts extract_chronology(std::string_view text, const AnchorConfig& anchors) {
  anchors.check();
  const auto dates = find_dates(text);
  const auto lowered = ascii_lower(text);

  auto acc = anchored(lowered, dates, anchors.acceptance_keywords, AnchorRole::acceptance,
                      anchors.window_chars);
  auto proc = anchored(lowered, dates, anchors.proceeding_keywords, AnchorRole::proceeding,
                       anchors.window_chars);

  std::vector<AnchoredMatch> trace = acc;
  trace.insert(trace.end(), proc.begin(), proc.end());

  // Earliest calendar date, then lowest offset, then keyword list order
  // (candidates were generated in keyword order, so stable order suffices).
  const auto earlier = [](const AnchoredMatch& a, const AnchoredMatch& b) {
    return std::tie(a.date, a.offset) < std::tie(b.date, b.offset);
  };
  if (acc.empty()) {
    throw ChronologyError("NoAcceptanceDate", describe(trace), trace);
  }
  const auto acceptance = *std::min_element(acc.begin(), acc.end(), earlier);

  std::erase_if(proc, [&](const AnchoredMatch& p) { return p.date < acceptance.date; });
  if (proc.empty()) {
    throw ChronologyError("NoProceedingDate", describe(trace), trace);
  }
  const auto proceeding = *std::min_element(proc.begin(), proc.end(), earlier);

  ChronologyFacts facts;
  facts.acceptance_date = acceptance.date;
  facts.proceeding_date = proceeding.date;
  facts.gap_days = gap_days_between(acceptance.date, proceeding.date);
  facts.rank_score_log = rank_score_log(facts.gap_days);
  facts.rank_score_inverse_square = rank_score_inverse_square(facts.gap_days);
  facts.extraction_trace = std::move(trace);
  return facts;
}

ChronologyTable chronologize_corpus(const Corpus& corpus, const AnchorConfig& anchors) {
  anchors.check();
  ChronologyTable table;
  for (const auto& rec : corpus.records) {
    try {
      table.facts.emplace(rec.name, extract_chronology(rec.text, anchors));
    } catch (const ChronologyError& e) {
      table.exclusions.push_back({rec.name, e.code(), e.what()});
    }
  }
  return table;
}

void write_chronology_csv(const ChronologyTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  csv::write_row(out, {"name", "acceptance_date", "proceeding_date", "gap_days",
                       "rank_score_log", "rank_score_inverse_square"});
  for (const auto& [name, f] : table.facts) {
    csv::write_row(out, {name, format_date(f.acceptance_date), format_date(f.proceeding_date),
                         std::to_string(f.gap_days), format_double(f.rank_score_log),
                         format_double(f.rank_score_inverse_square)});
  }
}

void write_exclusions_csv(const ChronologyTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  csv::write_row(out, {"name", "error", "message"});
  for (const auto& e : table.exclusions) csv::write_row(out, {e.name, e.code, e.message});
}

std::map<std::string, ChronologyFacts> read_chronology_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  csv::Reader reader(in);
  const auto header = reader.next();
  const csv::Row expected{"name", "acceptance_date", "proceeding_date", "gap_days",
                          "rank_score_log", "rank_score_inverse_square"};
  if (!header || *header != expected) {
    throw Error("CorruptFile", path.string() + ": unexpected chronology header");
  }
  std::map<std::string, ChronologyFacts> out;
  while (auto row = reader.next()) {
    if (row->size() != expected.size()) {
      throw Error("CorruptFile", path.string() + ": bad row at line " +
                                     std::to_string(reader.record_line()));
    }
    ChronologyFacts f;
    f.acceptance_date = parse_iso_date((*row)[1]);
    f.proceeding_date = parse_iso_date((*row)[2]);
    f.gap_days = std::stoll((*row)[3]);
    f.rank_score_log = std::stod((*row)[4]);
    f.rank_score_inverse_square = std::stod((*row)[5]);
    out.emplace((*row)[0], std::move(f));
  }
  return out;
}

}  // namespace petrank
