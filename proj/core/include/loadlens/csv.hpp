#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace loadlens::csv {

/// Splits one CSV line on commas. No quoting: none of the formats here quote.
/// A trailing '\r' (CRLF input) is stripped from the last field.
std::vector<std::string_view> split(std::string_view line);

/// Splits into at most `max_fields` views written to `out`; returns the count,
/// or -1 if the line has more fields than `max_fields`.
int split_into(std::string_view line, std::string_view* out, int max_fields);

std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);

/// Line reader that tracks 1-based line numbers and tolerates a missing
/// final newline.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Reads the next line into `line` (without the terminator).
  bool next(std::string& line);

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace loadlens::csv
