#include "qee/cli/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace qee::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  // Negative zero prints as "-0", which compares unequal in diffs for no reason.
  if (x == 0.0) x = 0.0;
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string format_short(double x) {
  if (!std::isfinite(x)) return format_double(x);
  if (x == 0.0) x = 0.0;
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::general, 12);
  return std::string(buf.data(), res.ptr);
}

CsvRow& CsvRow::add(double x) {
  cells_.push_back(format_double(x));
  return *this;
}

CsvRow& CsvRow::add(std::size_t x) {
  cells_.push_back(std::to_string(x));
  return *this;
}

CsvRow& CsvRow::add(bool x) {
  cells_.emplace_back(x ? "true" : "false");
  return *this;
}

CsvRow& CsvRow::add(const std::string& s) {
  cells_.push_back(s);
  return *this;
}

CsvRow& CsvRow::add_na() {
  cells_.emplace_back("na");
  return *this;
}

void write_csv_line(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) os << ',';
    os << cells[k];
  }
  os << '\n';
}

}  // namespace qee::cli
