#include "loadlens/csv.hpp"

#include <charconv>
#include <cstdlib>

#include "loadlens/fixed.hpp"

namespace loadlens {

std::optional<Milli> parse_milli(std::string_view text) {
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-') {
    negative = true;
    i = 1;
  }

  Milli integer_part = 0;
  std::size_t int_digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
    integer_part = integer_part * 10 + (text[i] - '0');
    if (integer_part > (INT64_MAX / kMilliPerKwh) - 1) return std::nullopt;
    ++i;
    ++int_digits;
  }

  Milli frac_part = 0;
  std::size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      if (frac_digits == 3) return std::nullopt;  // finer than meter resolution
      frac_part = frac_part * 10 + (text[i] - '0');
      ++i;
      ++frac_digits;
    }
  }

  if (i != text.size()) return std::nullopt;
  if (int_digits == 0 && frac_digits == 0) return std::nullopt;

  for (std::size_t d = frac_digits; d < 3; ++d) frac_part *= 10;
  Milli value = integer_part * kMilliPerKwh + frac_part;
  return negative ? -value : value;
}

void append_milli(std::string& out, Milli m) {
  if (m < 0) {
    out.push_back('-');
    m = -m;
  }
  out += std::to_string(m / kMilliPerKwh);
  Milli frac = m % kMilliPerKwh;
  out.push_back('.');
  out.push_back(static_cast<char>('0' + frac / 100));
  out.push_back(static_cast<char>('0' + (frac / 10) % 10));
  out.push_back(static_cast<char>('0' + frac % 10));
}

std::string format_milli(Milli m) {
  std::string out;
  append_milli(out, m);
  return out;
}

namespace csv {

std::vector<std::string_view> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

int split_into(std::string_view line, std::string_view* out, int max_fields) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  int n = 0;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (n == max_fields) return -1;
    if (comma == std::string_view::npos) {
      out[n++] = line.substr(start);
      return n;
    }
    out[n++] = line.substr(start, comma - start);
    start = comma + 1;
  }
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  std::string buf(text);
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return value;
}

bool LineReader::next(std::string& line) {
  if (!std::getline(in_, line)) return false;
  ++line_no_;
  return true;
}

}  // namespace csv
}  // namespace loadlens
