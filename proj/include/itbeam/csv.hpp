#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace itbeam {

/// 12 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string csv_number(double v);
std::string csv_number(std::int64_t v);

/// A header, "# key=value" comment lines and a fixed number of columns.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void meta(const std::string& key, const std::string& value);
  void row(std::vector<std::string> cells);

  std::size_t columns() const { return header_.size(); }
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& out) const;
  /// Writes to `path`, or to stdout when the path is empty or "-".
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace itbeam
