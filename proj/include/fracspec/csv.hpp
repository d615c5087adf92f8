#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace fracspec {

inline constexpr const char* kToolVersion = "1.0.0";

// Shortest decimal text that round-trips the double.
std::string format_double(double v);

// Table with a leading comment line and a header row; rows are rendered eagerly.
class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvTable(std::string comment, std::vector<std::string> columns);
  void add_row(const std::vector<Cell>& cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::string comment_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

}  // namespace fracspec
