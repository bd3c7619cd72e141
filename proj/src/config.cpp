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

#include "ensloss/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>

#include "ensloss/errors.hpp"

namespace ensloss {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

}  // namespace

double parse_double_field(std::string_view field, std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(std::string(field) + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64_field(std::string_view field, std::string_view text) {
  const auto s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(std::string(field) + ": expected a nonnegative integer, got '" +
                      std::string(s) + "'");
  }
  return v;
}

std::size_t parse_size_field(std::string_view field, std::string_view text) {
  return static_cast<std::size_t>(parse_u64_field(field, text));
}

bool parse_bool_field(std::string_view field, std::string_view text) {
  const auto s = trim(text);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(std::string(field) + ": expected true or false, got '" + std::string(s) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - start));
    if (!piece.empty()) items.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

ConfigMap ConfigMap::parse(std::istream& in, std::string source) {
  ConfigMap cfg;
  cfg.source_ = std::move(source);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = cfg.source_ + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(where + ": missing value for '" + std::string(key) + "'");
    if (!cfg.entries_.emplace(std::string(key), ConfigEntry{std::string(value), line_no}).second) {
      throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

ConfigMap ConfigMap::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse(in, path.string());
}

bool ConfigMap::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

const ConfigEntry& ConfigMap::at(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing key '" + std::string(key) + "'");
  return it->second;
}

void ConfigMap::fail(std::string_view key, const std::string& what) const {
  throw ConfigError(source_ + ":" + std::to_string(at(key).line) + ": " + what);
}

std::string ConfigMap::get_string(std::string_view key) const { return at(key).value; }

double ConfigMap::get_double(std::string_view key) const {
  try {
    return parse_double_field(key, at(key).value);
  } catch (const ConfigError& e) {
    fail(key, e.what());
  }
}

std::size_t ConfigMap::get_size(std::string_view key) const {
  try {
    return parse_size_field(key, at(key).value);
  } catch (const ConfigError& e) {
    fail(key, e.what());
  }
}

std::uint64_t ConfigMap::get_u64(std::string_view key) const {
  try {
    return parse_u64_field(key, at(key).value);
  } catch (const ConfigError& e) {
    fail(key, e.what());
  }
}

bool ConfigMap::get_bool(std::string_view key) const {
  try {
    return parse_bool_field(key, at(key).value);
  } catch (const ConfigError& e) {
    fail(key, e.what());
  }
}

std::vector<std::string> ConfigMap::get_list(std::string_view key) const {
  return split_list(at(key).value);
}

std::vector<double> ConfigMap::get_double_list(std::string_view key) const {
  std::vector<double> out;
  for (const auto& item : get_list(key)) {
    try {
      out.push_back(parse_double_field(key, item));
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  }
  return out;
}

void ConfigMap::reject_unknown(const std::vector<std::string_view>& known) const {
  for (const auto& [key, entry] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace ensloss
