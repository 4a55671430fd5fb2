#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qfe {

// Lossless float formatting: 17 significant digits round-trips any double.
inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using CsvCell = std::variant<double, long long, std::string>;

// Minimal CSV emitter: fixed header, one row at a time, no quoting (fields
// never contain commas here).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    columns_ = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(std::initializer_list<CsvCell> cells) {
    if (cells.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
    bool first = true;
    for (const auto& cell : cells) {
      if (!first) out_ << ',';
      first = false;
      if (std::holds_alternative<double>(cell))
        out_ << csv_double(std::get<double>(cell));
      else if (std::holds_alternative<long long>(cell))
        out_ << std::get<long long>(cell);
      else
        out_ << std::get<std::string>(cell);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

}  // namespace qfe
