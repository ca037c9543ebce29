#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace adaudit {

/// RFC 4180 writer. Numbers are formatted by the caller (see fmt_real) so the
/// output is byte-stable across runs.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void row(std::initializer_list<std::string_view> cells);
  void row(const std::vector<std::string>& cells);

 private:
  void cell(std::string_view value, bool first);
  std::ofstream out_;
};

std::string csv_escape(std::string_view value);

/// Shortest decimal that round-trips the double.
std::string fmt_real(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name; throws config_invalid when missing.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

}  // namespace adaudit
