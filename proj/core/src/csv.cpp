// SPDX-License-Identifier: Apache-2.0
#include "dwsl/csv.hpp"

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"

namespace dwsl {

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  write_line(header);
}

void CsvWriter::write_line(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

CsvWriter::Row& CsvWriter::Row::operator<<(double v) {
  cells_.push_back(format_double(v));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(int v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(long long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(const std::string& v) {
  cells_.push_back(v);
  return *this;
}

CsvWriter::Row::~Row() {
  cells_.resize(w_.columns_);
  w_.write_line(cells_);
}

}  // namespace dwsl
