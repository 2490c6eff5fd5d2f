#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace pldkit {

/// Full round-trip precision: 17 significant digits, '.' separator.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// One-line header, then value rows. Numeric cells go through format_double
// so a rerun with the same inputs is byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(const std::vector<std::string>& columns) { write_line(columns); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (const double v : values) cells.push_back(format_double(v));
    write_line(cells);
  }

  void row(const std::vector<std::string>& cells) { write_line(cells); }

 private:
  void write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

  std::ostream& os_;
};

}  // namespace pldkit
