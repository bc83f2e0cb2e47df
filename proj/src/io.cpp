#include "tdaeeg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tdaeeg/error.hpp"

namespace tdaeeg::io {

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (first && has_header) {
      table.header = std::move(cells);
    } else {
      table.rows.push_back(std::move(cells));
    }
    first = false;
  }
  return table;
}

double parse_double(std::string_view cell, bool allow_inf) {
  cell = trim(cell);
  if (allow_inf && (cell == "inf" || cell == "+inf" || cell == "Inf")) return kInfinity;
  double v = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || cell.empty())
    throw ParseError("non-numeric cell '" + std::string(cell) + "'");
  if (!std::isfinite(v)) throw ParseError("non-finite cell '" + std::string(cell) + "'");
  return v;
}

long long parse_int(std::string_view cell) {
  cell = trim(cell);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
    throw ParseError("non-integer cell '" + std::string(cell) + "'");
  return v;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string out = "time_index";
  for (std::size_t d = 0; d < cloud.dim; ++d) out += ",x" + std::to_string(d);
  out += '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out += std::to_string(cloud.time_index.empty() ? static_cast<std::int64_t>(i)
                                                   : cloud.time_index[i]);
    for (double v : cloud.point(i)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text(path, out);
}

PointCloud read_cloud(const std::filesystem::path& path) {
  const auto table = read_csv(path, true);
  if (table.header.empty() || table.header.front() != "time_index")
    throw ParseError(path.string() + ": cloud CSV must start with a time_index column");
  PointCloud cloud;
  cloud.dim = table.header.size() - 1;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw ParseError(path.string() + ": ragged rows");
    cloud.time_index.push_back(parse_int(row[0]));
    for (std::size_t d = 1; d < row.size(); ++d) cloud.coords.push_back(parse_double(row[d]));
  }
  cloud.validate();
  return cloud;
}

std::string diagram_to_csv(const PersistenceDiagram& diagram) {
  std::string out = "dim,birth,death\n";
  for (const auto& f : diagram.features) {
    out += std::to_string(f.dim);
    out += ',';
    out += format_double(f.birth);
    out += ',';
    out += format_double(f.death);
    out += '\n';
  }
  return out;
}

void write_diagram(const std::filesystem::path& path, const PersistenceDiagram& diagram) {
  write_text(path, diagram_to_csv(diagram));
}

PersistenceDiagram read_diagram(const std::filesystem::path& path) {
  auto table = read_csv(path, false);
  PersistenceDiagram diagram;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (r == 0 && !row.empty() && row[0] == "dim") continue;
    if (row.size() != 3) throw ParseError(path.string() + ": diagram rows need dim,birth,death");
    Feature f;
    f.dim = static_cast<int>(parse_int(row[0]));
    f.birth = parse_double(row[1]);
    f.death = parse_double(row[2], true);
    diagram.features.push_back(f);
  }
  diagram.validate();
  return diagram;
}

void write_matrix(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                  const std::vector<double>& values) {
  std::string out;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out += ',';
      out += format_double(values[r * cols + c]);
    }
    out += '\n';
  }
  write_text(path, out);
}

std::vector<double> read_matrix(const std::filesystem::path& path, std::size_t& rows,
                                std::size_t& cols) {
  const auto table = read_csv(path, false);
  rows = table.rows.size();
  cols = rows ? table.rows.front().size() : 0;
  std::vector<double> values;
  values.reserve(rows * cols);
  for (const auto& row : table.rows) {
    if (row.size() != cols) throw ParseError(path.string() + ": ragged rows");
    for (const auto& cell : row) values.push_back(parse_double(cell));
  }
  return values;
}

}  // namespace tdaeeg::io
