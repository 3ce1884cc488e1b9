#pragma once

#include <string>
#include <vector>

namespace collapse {

// shortest round-trip formatting (deterministic across runs)
std::string format_double(double v);

// Writes rows to a CSV file; every double goes through format_double so
// repeated runs produce identical bytes.
class CsvWriter {
 public:
  CsvWriter(std::string path, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string buffer_;
  std::size_t ncols_;
  bool closed_ = false;
};

}  // namespace collapse
