// Copyright 2026 The ensloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ensloss {

// Config grammar, one entry per line:
//
//   # comment                    (also allowed after a value)
//   key = value
//   key = item, item, item       (lists are comma-separated)
//
// Keys are [a-z0-9_]+. Blank lines are ignored. A repeated key is an error.

struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

class ConfigMap {
 public:
  /// Throws ConfigError naming the offending line.
  static ConfigMap parse(std::istream& in, std::string source = "<config>");
  static ConfigMap parse_file(const std::filesystem::path& path);

  bool contains(std::string_view key) const;
  const std::map<std::string, ConfigEntry, std::less<>>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<std::string> get_list(std::string_view key) const;
  std::vector<double> get_double_list(std::string_view key) const;

  /// Throws ConfigError for the first key not in `known`.
  void reject_unknown(const std::vector<std::string_view>& known) const;

 private:
  const ConfigEntry& at(std::string_view key) const;
  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

  std::string source_;
  std::map<std::string, ConfigEntry, std::less<>> entries_;
};

/// Scalar parsers shared by config files and command-line flags. Each throws
/// ConfigError with `field` in the message.
double parse_double_field(std::string_view field, std::string_view text);
std::size_t parse_size_field(std::string_view field, std::string_view text);
std::uint64_t parse_u64_field(std::string_view field, std::string_view text);
bool parse_bool_field(std::string_view field, std::string_view text);
std::vector<std::string> split_list(std::string_view text);

}  // namespace ensloss
