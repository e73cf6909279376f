#pragma once

// Tokenization, token normalization, and per-petition text statistics.
//
// Definitions used throughout the project:
//   word      maximal run of alphanumeric code points. ASCII letters/digits
//             are alphanumeric; non-ASCII code points are alphanumeric unless
//             they fall in a punctuation, symbol, space or control block
//             (see is_word_codepoint). Invalid UTF-8 bytes separate words.
//   sentence  maximal segment terminated by '.', '?', '!' or end of text that
//             contains at least one word.
//
// Stemmer (applied to lowercase tokens, one plural rule then one
// gerund/past rule):
//   1. "sses" -> "ss";  "ies" -> "i";  "es" -> "" if length >= 5;
//      "s" -> "" if length >= 4 and not ending in "ss" or "us".
//   2. "ing" or "ed" -> "" if at least 3 characters remain; then a doubled
//      final consonant other than l, s, z is reduced to one.
// So "judges" -> "judg", "running" -> "run", "filed" -> "fil".

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace petrank {

struct TextStats {
  std::size_t word_count = 0;
  std::size_t sentence_count = 0;
  double avg_word_length = 0.0;  // code points per word

  bool operator==(const TextStats&) const = default;
};

struct NormalizationConfig {
  bool lowercase = false;
  bool strip_non_alphanumeric = false;
  bool remove_stopwords = false;
  bool stem = false;
  std::set<std::string> stopword_list;

  // Throws Error("ConfigError") if stopword removal is on with an empty list.
  void check() const;
};

bool is_word_codepoint(char32_t cp);

// Number of code points in a UTF-8 string; invalid bytes count as one each.
std::size_t utf8_length(std::string_view s);

std::vector<std::string> tokenize(std::string_view text);

// Lowercase -> strip -> stopword removal -> stem, each step when enabled.
// Lowercasing covers ASCII and the Latin-1/Latin Extended-A, Greek and
// Cyrillic capital ranges.
std::vector<std::string> normalize(std::vector<std::string> tokens,
                                   const NormalizationConfig& cfg);

std::string stem(std::string_view token);

std::string to_lower(std::string_view token);

// Errors: EmptyText for empty or whitespace-only input.
TextStats text_statistics(std::string_view text);

// One token per line; blank lines and lines starting with '#' are skipped.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

// The built-in English list (identical to data/stopwords_en.txt).
const std::set<std::string>& default_stopwords();

}  // namespace petrank
