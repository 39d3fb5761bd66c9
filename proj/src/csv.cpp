#include "varhsmm/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "varhsmm/errors.hpp"

namespace varhsmm {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  CsvTable table;
  if (!std::getline(in, line) || trim(line).empty())
    throw ValidationError(fmt::format("{}: missing header row", source));
  for (auto& name : split_line(line)) table.header.push_back(trim(name));
  const auto cols = table.header.size();

  std::vector<double> cells;
  std::size_t rows = 0;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != cols)
      throw ValidationError(fmt::format("{}: row {} has {} columns, header has {}", source, rows + 1,
                                        fields.size(), cols));
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cell = trim(fields[c]);
      double value = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size() || !std::isfinite(value))
        throw ValidationError(fmt::format("{}: non-numeric value '{}' at row {}, column {} ({})", source, cell,
                                          rows + 1, c + 1, table.header[c]));
      cells.push_back(value);
    }
    ++rows;
  }
  table.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading {}", path.string()));
  return buffer.str();
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

std::string format_double(double value) { return fmt::format("{}", value); }

std::string to_csv(const CsvTable& table) {
  if (!table.header.empty() && static_cast<Eigen::Index>(table.header.size()) != table.values.cols())
    throw ValidationError("CSV header and body widths differ");
  std::string out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c > 0) out += ',';
    out += table.header[c];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_double(table.values(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
  }
  fs::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write {}", temp.string()));
    out << contents;
    out.flush();
    if (!out) throw IoError(fmt::format("error writing {}", temp.string()));
  }
  fs::rename(temp, path, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw IoError(fmt::format("cannot move output into place at {}", path.string()));
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text_atomic(path, to_csv(table)); }

std::vector<std::string> default_header(int columns, const std::string& prefix) {
  std::vector<std::string> out;
  for (int c = 1; c <= columns; ++c) out.push_back(fmt::format("{}{}", prefix, c));
  return out;
}

}  // namespace varhsmm
