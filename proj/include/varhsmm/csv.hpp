#ifndef VARHSMM_CSV_HPP
#define VARHSMM_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "varhsmm/model.hpp"

namespace varhsmm {

/// A header row plus a dense numeric body.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// Comma-separated, header row first, every body cell a decimal double.
/// Throws IoError when the file cannot be read and ValidationError (with a
/// 1-based row and column) on ragged rows or non-numeric cells.
CsvTable parse_csv(const std::string& text, const std::string& source = "input");
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);

std::string to_csv(const CsvTable& table);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

std::string read_text(const std::filesystem::path& path);

/// "y1", "y2", ...
std::vector<std::string> default_header(int columns, const std::string& prefix = "y");

}  // namespace varhsmm

#endif  // VARHSMM_CSV_HPP
