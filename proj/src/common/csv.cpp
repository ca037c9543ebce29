#include "adaudit/common/csv.hpp"

#include <fmt/format.h>

#include <sstream>

#include "adaudit/common/error.hpp"

namespace adaudit {

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) fail(Errc::io, "cannot write " + path.string());
}

void CsvWriter::row(std::initializer_list<std::string_view> cells) {
  bool first = true;
  for (auto c : cells) {
    cell(c, first);
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  bool first = true;
  for (const auto& c : cells) {
    cell(c, first);
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::cell(std::string_view value, bool first) {
  if (!first) out_ << ',';
  out_ << csv_escape(value);
}

std::string csv_escape(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string fmt_real(double value) { return fmt::format("{}", value); }

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(Errc::config_invalid, "csv column missing: " + std::string(name));
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;
  auto end_row = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    if (!(row.size() == 1 && row[0].empty())) {
      if (table.header.empty()) table.header = std::move(row);
      else table.rows.push_back(std::move(row));
    }
    row.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n') {
      end_row();
    } else if (c != '\r') {
      cell.push_back(c);
      any = true;
    }
  }
  if (any || !cell.empty() || !row.empty()) end_row();
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace adaudit
