#pragma once

#include <fstream>
#include <string>
#include <vector>

// Schema-stable CSV emission and the bundled reader. Doubles are written
// with %.17g so every emitted file parses back to the exact same values.

namespace forge::csv {

class Writer {
 public:
  Writer(const std::string& path, const std::vector<std::string>& header);

  Writer& field(const std::string& s);
  Writer& field(double x);
  Writer& field(long x);
  Writer& field(int x) { return field(static_cast<long>(x)); }
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::size_t row_fields_ = 0;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  double as_double(std::size_t row, int col) const;
};

Table read(const std::string& path);

std::string format_double(double x);

}  // namespace forge::csv
