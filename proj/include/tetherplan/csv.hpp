#pragma once

// Plain CSV tables with locale-independent numbers (9 significant digits).

#include <filesystem>
#include <string>
#include <vector>

namespace tetherplan {

std::string format_number(double value);

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void add_row(std::vector<std::string> cells);
  void add_numbers(const std::vector<double>& values);

  /// Index of a header column; throws IoError when missing.
  std::size_t column(const std::string& name) const;

  std::string str() const;
  void write(const std::filesystem::path& path) const;
  static CsvTable read(const std::filesystem::path& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses a number written by format_number (or any plain decimal).
double parse_number(const std::string& text);

}  // namespace tetherplan
