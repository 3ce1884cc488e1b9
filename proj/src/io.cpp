#include "collapse/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "collapse/errors.hpp"

namespace collapse {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns)
    : path_(std::move(path)), ncols_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += columns[i];
  }
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw ConfigError("CSV row width mismatch: " + path_);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_double(values[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  if (values.size() != ncols_) throw ConfigError("CSV row width mismatch: " + path_);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += values[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path_);
  out << buffer_;
  closed_ = true;
}

}  // namespace collapse
