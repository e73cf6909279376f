#pragma once

// Minimal RFC-4180 reader/writer. Quoted fields may contain commas, doubled
// quotes, and CR/LF line breaks. Record terminators are LF or CRLF.

#include <istream>
#include <ostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace petrank::csv {

using Row = std::vector<std::string>;

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Reads the next record. Returns std::nullopt at end of input.
  // Throws Error("CsvSyntax") on an unterminated quoted field.
  std::optional<Row> next();

  // 1-based physical line at which the last returned record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Quotes a field only when it contains a comma, quote, CR, or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

}  // namespace petrank::csv
