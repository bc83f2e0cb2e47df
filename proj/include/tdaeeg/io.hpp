#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tdaeeg/types.hpp"

namespace tdaeeg::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Comma-separated, optional surrounding whitespace, no quoting. Blank lines
// are skipped. Rows may differ in length; callers check raggedness.
CsvTable read_csv(const std::filesystem::path& path, bool has_header);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s) noexcept;

// Strict parse: the whole cell must be a number. "inf"/"+inf" accepted only
// when allow_inf is set.
double parse_double(std::string_view cell, bool allow_inf = false);
long long parse_int(std::string_view cell);

// Shortest round-tripping representation; "inf" for +infinity.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

// Cloud CSV: header "time_index,x0,...". time_index column is -1-free only
// when the cloud carries indices; otherwise row numbers are written.
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_cloud(const std::filesystem::path& path);

// Diagram CSV: header "dim,birth,death", rows in diagram order.
void write_diagram(const std::filesystem::path& path, const PersistenceDiagram& diagram);
std::string diagram_to_csv(const PersistenceDiagram& diagram);
PersistenceDiagram read_diagram(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                  const std::vector<double>& values);
std::vector<double> read_matrix(const std::filesystem::path& path, std::size_t& rows,
                                std::size_t& cols);

}  // namespace tdaeeg::io
