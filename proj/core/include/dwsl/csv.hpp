// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace dwsl {

// Comma separated, header row, LF line endings, doubles at 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row& operator<<(double v);
    Row& operator<<(int v);
    Row& operator<<(long long v);
    Row& operator<<(const std::string& v);
    Row& operator<<(const char* v) { return *this << std::string(v); }
    ~Row();

   private:
    CsvWriter& w_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }
  std::size_t columns() const { return columns_; }

 private:
  void write_line(const std::vector<std::string>& cells);
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace dwsl
