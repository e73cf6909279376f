#pragma once

// Chronology extraction: locate the acceptance (filing) date and the first
// proceeding (hearing) date in raw petition text and derive the delay
// features and urgency scores from them.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/corpus.hpp"
#include "petrank/error.hpp"

namespace petrank {

using Date = std::chrono::year_month_day;

std::string format_date(const Date& d);  // YYYY-MM-DD
Date parse_iso_date(std::string_view s);  // throws Error("BadDate")

struct DateMatch {
  Date date;
  std::size_t offset = 0;  // byte offset of the first character of the match
  std::size_t length = 0;
};

enum class AnchorRole { acceptance, proceeding };

struct AnchoredMatch {
  AnchorRole role = AnchorRole::acceptance;
  std::string keyword;
  Date date;
  std::size_t offset = 0;
};

struct AnchorConfig {
  std::vector<std::string> acceptance_keywords{"filed", "admitted", "instituted",
                                               "presented"};
  std::vector<std::string> proceeding_keywords{"hearing", "scheduled", "listed", "heard"};
  // A date is anchored to a keyword when it starts at most this many bytes
  // after the end of the keyword occurrence.
  std::size_t window_chars = 120;

  void check() const;  // throws ConfigError
};

AnchorConfig anchor_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const AnchorConfig& cfg);

struct ChronologyFacts {
  Date acceptance_date;
  Date proceeding_date;
  std::int64_t gap_days = 0;
  double rank_score_log = 0.0;
  double rank_score_inverse_square = 1.0;
  std::vector<AnchoredMatch> extraction_trace;
};

// Thrown by extract_chronology; carries every anchored match considered.
class ChronologyError : public Error {
 public:
  ChronologyError(std::string code, const std::string& message,
                  std::vector<AnchoredMatch> trace)
      : Error(std::move(code), message), trace_(std::move(trace)) {}
  const std::vector<AnchoredMatch>& trace() const { return trace_; }

 private:
  std::vector<AnchoredMatch> trace_;
};

// ln(1 + gap)
double rank_score_log(std::int64_t gap_days);
// 1 / max(gap, 1)^2
double rank_score_inverse_square(std::int64_t gap_days);
// |b - a| in whole days
std::int64_t gap_days_between(const Date& a, const Date& b);

// Recognized forms (case-insensitive): "D Month YYYY" (optional ordinal
// suffix, optional "of", optional comma), "Month D, YYYY", "D/M/YYYY",
// "D-M-YYYY" and "YYYY-MM-DD". Month names may be full or
// three-letter abbreviations (plus "Sept"). Impossible calendar dates and
// two-digit years are rejected. Results are ordered by offset and do not
// overlap.
std::vector<DateMatch> find_dates(std::string_view text);

// Errors: NoAcceptanceDate, NoProceedingDate (as ChronologyError).
ChronologyFacts extract_chronology(std::string_view text, const AnchorConfig& anchors);

struct Exclusion {
  std::string name;
  std::string code;
  std::string message;
};

struct ChronologyTable {
  std::map<std::string, ChronologyFacts> facts;
  std::vector<Exclusion> exclusions;  // in record order
};

ChronologyTable chronologize_corpus(const Corpus& corpus, const AnchorConfig& anchors);

// CSV columns: name, acceptance_date, proceeding_date, gap_days,
// rank_score_log, rank_score_inverse_square (rows sorted by name).
void write_chronology_csv(const ChronologyTable& table, const std::filesystem::path& path);
void write_exclusions_csv(const ChronologyTable& table, const std::filesystem::path& path);
// Reads a chronology CSV back; traces are not persisted.
std::map<std::string, ChronologyFacts> read_chronology_csv(const std::filesystem::path& path);

}  // namespace petrank
