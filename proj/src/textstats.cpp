#include "petrank/textstats.hpp"

#include <cctype>
#include <fstream>

#include "petrank/error.hpp"

namespace petrank {
namespace {

// Decodes one code point starting at s[i]; advances i. Invalid or truncated
// sequences decode as U+FFFD and consume a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + static_cast<std::size_t>(len) > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong forms and surrogates.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
      (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
    ++i;
    return 0xFFFD;
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t lower_codepoint(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0x80) return cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x138 && cp != 0x149 &&
      cp != 0x17F) {
    // Latin Extended-A alternates upper/lower, with a phase shift between
    // U+0139 and U+0148 and again from U+0179.
    const bool shifted = (cp >= 0x139 && cp <= 0x148) || cp >= 0x179;
    const bool upper = shifted ? (cp % 2 == 1) : (cp % 2 == 0);
    return upper ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

bool is_sentence_terminator(char32_t cp) { return cp == '.' || cp == '?' || cp == '!'; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// Kept in sync with data/stopwords_en.txt.
constexpr const char* kDefaultStopwords[] = {
    "a",       "about",   "above",   "after",   "again",   "against", "all",
    "am",      "an",      "and",     "any",     "are",     "as",      "at",
    "be",      "because", "been",    "before",  "being",   "below",   "between",
    "both",    "but",     "by",      "can",     "could",   "did",     "do",
    "does",    "doing",   "down",    "during",  "each",    "few",     "for",
    "from",    "further", "had",     "has",     "have",    "having",  "he",
    "her",     "here",    "hers",    "herself", "him",     "himself", "his",
    "how",     "i",       "if",      "in",      "into",    "is",      "it",
    "its",     "itself",  "me",      "more",    "most",    "my",      "myself",
    "no",      "nor",     "not",     "of",      "off",     "on",      "once",
    "only",    "or",      "other",   "ought",   "our",     "ours",    "ourselves",
    "out",     "over",    "own",     "same",    "shall",   "she",     "should",
    "so",      "some",    "such",    "than",    "that",    "the",     "their",
    "theirs",  "them",    "themselves", "then", "there",   "these",   "they",
    "this",    "those",   "through", "to",      "too",     "under",   "until",
    "up",      "very",    "was",     "we",      "were",    "what",    "when",
    "where",   "which",   "while",   "who",     "whom",    "why",     "will",
    "with",    "would",   "you",     "your",    "yours",   "yourself", "yourselves",
};

}  // namespace

bool is_word_codepoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp <= 0xBF) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp == 0x37E || cp == 0x387) return false;
  if (cp >= 0x55A && cp <= 0x55F) return false;
  if (cp == 0x589 || cp == 0x5BE || cp == 0x5C0 || cp == 0x5C3 || cp == 0x5C6 ||
      cp == 0x5F3 || cp == 0x5F4) {
    return false;
  }
  if (cp == 0x60C || cp == 0x61B || cp == 0x61F || (cp >= 0x66A && cp <= 0x66D) ||
      cp == 0x6D4) {
    return false;
  }
  if (cp == 0x964 || cp == 0x965 || cp == 0x970) return false;  // Devanagari danda
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols, arrows
  if (cp >= 0x2E00 && cp <= 0x2E7F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xE000 && cp <= 0xF8FF) return false;  // private use
  if (cp >= 0xFE30 && cp <= 0xFE6F) return false;
  if (cp == 0xFEFF || (cp >= 0xFFF0 && cp <= 0xFFFF)) return false;
  if (cp >= 0xF0000) return false;  // supplementary private use
  if ((cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
      (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65)) {
    return false;
  }
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;  // emoji and pictographs
  return true;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++n) decode_utf8(s, i);
  return n;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < text.size()) {
    const std::size_t at = i;
    const char32_t cp = decode_utf8(text, i);
    const bool word = cp != 0xFFFD && is_word_codepoint(cp);
    if (word && start == std::string_view::npos) {
      start = at;
    } else if (!word && start != std::string_view::npos) {
      tokens.emplace_back(text.substr(start, at - start));
      start = std::string_view::npos;
    }
  }
  if (start != std::string_view::npos) tokens.emplace_back(text.substr(start));
  return tokens;
}

std::string to_lower(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size();) {
    encode_utf8(lower_codepoint(decode_utf8(token, i)), out);
  }
  return out;
}

std::string stem(std::string_view token) {
  std::string w(token);
  // Plural.
  if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "es") && w.size() >= 5) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "s") && w.size() >= 4 && !ends_with(w, "ss") &&
             !ends_with(w, "us")) {
    w.resize(w.size() - 1);
  }
  // Gerund / past.
  std::size_t cut = 0;
  if (ends_with(w, "ing") && w.size() >= 6) {
    cut = 3;
  } else if (ends_with(w, "ed") && w.size() >= 5) {
    cut = 2;
  }
  if (cut) {
    w.resize(w.size() - cut);
    const auto n = w.size();
    if (n >= 2 && w[n - 1] == w[n - 2] && !is_vowel(w[n - 1]) && w[n - 1] != 'l' &&
        w[n - 1] != 's' && w[n - 1] != 'z' &&
        std::isalpha(static_cast<unsigned char>(w[n - 1]))) {
      w.pop_back();
    }
  }
  return w;
}

void NormalizationConfig::check() const {
  if (remove_stopwords && stopword_list.empty()) {
    throw config_error("stopword removal enabled with an empty stopword list");
  }
}

std::vector<std::string> normalize(std::vector<std::string> tokens,
                                   const NormalizationConfig& cfg) {
  cfg.check();
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    if (cfg.lowercase) t = to_lower(t);
    if (cfg.strip_non_alphanumeric) {
      std::string kept;
      for (std::size_t i = 0; i < t.size();) {
        const std::size_t at = i;
        const char32_t cp = decode_utf8(t, i);
        if (cp != 0xFFFD && is_word_codepoint(cp)) kept.append(t, at, i - at);
      }
      t = std::move(kept);
      if (t.empty()) continue;
    }
    if (cfg.remove_stopwords && cfg.stopword_list.count(t)) continue;
    if (cfg.stem) t = stem(t);
    out.push_back(std::move(t));
  }
  return out;
}

TextStats text_statistics(std::string_view text) {
  TextStats stats;
  std::size_t chars = 0;
  bool in_word = false;
  bool segment_has_word = false;
  bool any_non_space = false;
  for (std::size_t i = 0; i < text.size();) {
    const char32_t cp = decode_utf8(text, i);
    if (!(cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v')) {
      any_non_space = true;
    }
    const bool word = cp != 0xFFFD && is_word_codepoint(cp);
    if (word) {
      if (!in_word) ++stats.word_count;
      in_word = true;
      segment_has_word = true;
      ++chars;
      continue;
    }
    in_word = false;
    if (is_sentence_terminator(cp)) {
      if (segment_has_word) ++stats.sentence_count;
      segment_has_word = false;
    }
  }
  if (!any_non_space) throw Error("EmptyText", "text is empty or whitespace-only");
  if (segment_has_word) ++stats.sentence_count;
  // Non-empty text without any word still counts as one sentence.
  if (stats.sentence_count == 0) stats.sentence_count = 1;
  if (stats.word_count > 0) {
    stats.avg_word_length = static_cast<double>(chars) / static_cast<double>(stats.word_count);
  }
  return stats;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open stopword list " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    words.insert(line.substr(b));
  }
  return words;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words(std::begin(kDefaultStopwords),
                                           std::end(kDefaultStopwords));
  return words;
}

}  // namespace petrank
