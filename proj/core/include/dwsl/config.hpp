// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dwsl {

// key=value lines grouped under optional [section] headers. '#' starts a
// comment. Keys before any header live in section "".
class KeyValueConfig {
 public:
  using Section = std::map<std::string, std::string>;

  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const std::string* find(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, std::string value);

  const std::map<std::string, Section>& sections() const { return sections_; }
  std::string to_string() const;

 private:
  std::map<std::string, Section> sections_;
};

std::string format_double(double v);
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
std::string_view trim(std::string_view s);

}  // namespace dwsl
