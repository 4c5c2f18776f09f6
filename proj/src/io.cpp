#include "dphase/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace dphase {

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string format_csv(const GridFunction& u) {
  const Grid& g = u.grid();
  std::string out = g.dim() == 1 ? "x,value\n" : "x,y,value\n";
  for (std::size_t k = 0; k < u.size(); ++k) {
    out += format_real(g.coordinate(k, 0));
    if (g.dim() == 2) {
      out += ',';
      out += format_real(g.coordinate(k, 1));
    }
    out += ',';
    out += format_real(u[k]);
    out += '\n';
  }
  return out;
}

namespace {

double parse_number(const std::string& field, std::size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw contract_error(
        fmt::format("csv line {}: '{}' is not a finite number", line, field));
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

}  // namespace

GridFunction parse_csv(const std::string& text, const Grid& grid) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw contract_error("csv: empty input");
  const std::vector<std::string> expected =
      grid.dim() == 1 ? std::vector<std::string>{"x", "value"}
                      : std::vector<std::string>{"x", "y", "value"};
  if (split(line) != expected)
    throw contract_error(fmt::format("csv: header '{}' does not match a {}-D grid",
                                     line, grid.dim()));
  std::vector<double> values;
  std::size_t lineno = 1;
  const double tol = 1e-9 * grid.spacing();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != expected.size())
      throw contract_error(fmt::format("csv line {}: expected {} fields", lineno,
                                       expected.size()));
    const std::size_t k = values.size();
    if (k >= grid.node_count())
      throw contract_error(fmt::format("csv: more than {} rows", grid.node_count()));
    for (int a = 0; a < grid.dim(); ++a)
      if (std::abs(parse_number(fields[a], lineno) - grid.coordinate(k, a)) > tol)
        throw contract_error(fmt::format(
            "csv line {}: coordinate does not match interior node {}", lineno, k));
    values.push_back(parse_number(fields.back(), lineno));
  }
  if (values.size() != grid.node_count())
    throw contract_error(fmt::format("csv: expected {} rows, found {}",
                                     grid.node_count(), values.size()));
  return GridFunction(grid, std::move(values));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw contract_error("cannot write " + path.string());
  out << text;
  if (!out) throw contract_error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw contract_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const GridFunction& u) {
  write_text(path, format_csv(u));
}

GridFunction read_csv(const std::filesystem::path& path, const Grid& grid) {
  return parse_csv(read_text(path), grid);
}

Record& Record::add(std::string key, double value) {
  lines_.emplace_back(std::move(key), format_real(value));
  return *this;
}
Record& Record::add(std::string key, int value) {
  lines_.emplace_back(std::move(key), std::to_string(value));
  return *this;
}
Record& Record::add(std::string key, std::size_t value) {
  lines_.emplace_back(std::move(key), std::to_string(value));
  return *this;
}
Record& Record::add(std::string key, bool value) {
  lines_.emplace_back(std::move(key), value ? "true" : "false");
  return *this;
}
Record& Record::add(std::string key, std::string value) {
  lines_.emplace_back(std::move(key), std::move(value));
  return *this;
}

std::string Record::str() const {
  std::string out;
  for (const auto& [k, v] : lines_) out += k + " = " + v + "\n";
  return out;
}

std::string format_series(const std::string& header, const std::vector<double>& values) {
  std::string out = header + "\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out += std::to_string(i) + "," + format_real(values[i]) + "\n";
  return out;
}

}  // namespace dphase
