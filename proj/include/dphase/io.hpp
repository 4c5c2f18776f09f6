// io.hpp
//
// Text serialization: grid functions as CSV (`x[,y],value`, interior nodes
// in lexicographic order, 17 significant digits) and line-oriented
// `key = value` report records.

#ifndef DPHASE_IO_HPP
#define DPHASE_IO_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dphase/grid.hpp"

namespace dphase {

/// %.17g, the shortest width that round-trips every double.
std::string format_real(double v);

std::string format_csv(const GridFunction& u);

/// Parses the CSV written by format_csv. Header, row count and node
/// coordinates must match `grid`.
GridFunction parse_csv(const std::string& text, const Grid& grid);

void write_csv(const std::filesystem::path& path, const GridFunction& u);
GridFunction read_csv(const std::filesystem::path& path, const Grid& grid);

/// Ordered `key = value` lines.
class Record {
public:
  Record& add(std::string key, double value);
  Record& add(std::string key, int value);
  Record& add(std::string key, std::size_t value);
  Record& add(std::string key, bool value);
  Record& add(std::string key, std::string value);
  Record& add(std::string key, const char* value) {
    return add(std::move(key), std::string(value));
  }

  std::string str() const;

private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

/// `index,value` rows under the given header.
std::string format_series(const std::string& header, const std::vector<double>& values);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace dphase

#endif
