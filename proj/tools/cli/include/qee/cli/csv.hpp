#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qee::cli {

// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double x);
// 12 significant digits, for human-readable reports.
std::string format_short(double x);

class CsvRow {
 public:
  CsvRow& add(double x);
  CsvRow& add(std::size_t x);
  CsvRow& add(bool x);
  CsvRow& add(const std::string& s);
  CsvRow& add_na();
  template <typename T>
  CsvRow& add(const std::optional<T>& x) {
    return x ? add(*x) : add_na();
  }

  const std::vector<std::string>& cells() const { return cells_; }

 private:
  std::vector<std::string> cells_;
};

void write_csv_line(std::ostream& os, const std::vector<std::string>& cells);

}  // namespace qee::cli
