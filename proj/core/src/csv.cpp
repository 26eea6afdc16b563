#include "forge/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace forge::csv {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Writer::Writer(const std::string& path,
               const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("csv: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

Writer& Writer::field(const std::string& s) {
  if (row_fields_) out_ << ',';
  out_ << s;
  ++row_fields_;
  return *this;
}

Writer& Writer::field(double x) { return field(format_double(x)); }

Writer& Writer::field(long x) { return field(std::to_string(x)); }

void Writer::end_row() {
  if (row_fields_ != columns_) {
    throw std::logic_error("csv: row width does not match header");
  }
  out_ << '\n';
  row_fields_ = 0;
}

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double Table::as_double(std::size_t row, int col) const {
  return std::stod(rows.at(row).at(col));
}

Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot read " + path);
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace forge::csv
