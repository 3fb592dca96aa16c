#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace haptic::io {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Fixed numeric formatting used in every output file (12 significant digits).
std::string format_number(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Numeric CSV with optional `# key=value` metadata lines before or after
/// the header row. Other comment lines are ignored.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  const std::string* find_metadata(const std::string& key) const;
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source = "csv");
CsvTable load_csv(const std::filesystem::path& path);
std::string format_csv(const CsvTable& table);

}  // namespace haptic::io
