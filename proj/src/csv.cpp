#include "itbeam/csv.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace itbeam {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no "-0"
  return fmt::format("{:.12g}", v);
}

std::string csv_number(std::int64_t v) { return std::to_string(v); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CSV needs at least one column");
}

void CsvTable::meta(const std::string& key, const std::string& value) {
  meta_.emplace_back(key, value);
}

void CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) +
                                " cells, header has " + std::to_string(header_.size()));
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out) const {
  for (const auto& [k, v] : meta_) out << "# " << k << '=' << v << '\n';
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::save(const std::string& path) const {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(f);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace itbeam
