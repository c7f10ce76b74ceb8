// Copyright 2026 The kdnas Authors.
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

#include "kdnas/kv_config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kdnas/errors.h"

namespace kdnas {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

double ParseDouble(std::string_view text, std::string_view what) {
  text = Trim(text);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": expected a number, got '" +
                      std::string(text) + "'");
  }
  return value;
}

std::int64_t ParseInt(std::string_view text, std::string_view what) {
  text = Trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": expected an integer, got '" +
                      std::string(text) + "'");
  }
  return value;
}

KeyValueFile KeyValueFile::Parse(std::string_view text, std::string source) {
  KeyValueFile file;
  file.source_ = std::move(source);
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(file.source_ + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(file.source_ + ":" + std::to_string(line_no) +
                        ": empty key");
    }
    if (!file.entries_.emplace(key, std::move(value)).second) {
      throw ConfigError(file.source_ + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
  }
  return file;
}

KeyValueFile KeyValueFile::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path.string());
}

bool KeyValueFile::Has(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

const std::string& KeyValueFile::Get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(source_ + ": missing key '" + std::string(key) + "'");
  }
  read_.insert(it->first);
  return it->second;
}

std::string KeyValueFile::GetOr(std::string_view key,
                                std::string fallback) const {
  return Has(key) ? Get(key) : fallback;
}

double KeyValueFile::GetDouble(std::string_view key) const {
  return ParseDouble(Get(key), source_ + ": " + std::string(key));
}

double KeyValueFile::GetDoubleOr(std::string_view key, double fallback) const {
  return Has(key) ? GetDouble(key) : fallback;
}

std::int64_t KeyValueFile::GetInt(std::string_view key) const {
  return ParseInt(Get(key), source_ + ": " + std::string(key));
}

std::int64_t KeyValueFile::GetIntOr(std::string_view key,
                                    std::int64_t fallback) const {
  return Has(key) ? GetInt(key) : fallback;
}

bool KeyValueFile::GetBoolOr(std::string_view key, bool fallback) const {
  if (!Has(key)) return fallback;
  const std::string& v = Get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(source_ + ": " + std::string(key) +
                    ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> KeyValueFile::GetList(std::string_view key) const {
  std::vector<std::string> items;
  std::string current;
  for (char c : Get(key)) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!current.empty()) items.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) items.push_back(std::move(current));
  return items;
}

std::vector<std::string> KeyValueFile::Unread() const {
  std::vector<std::string> unread;
  for (const auto& [key, value] : entries_) {
    if (!read_.contains(key)) unread.push_back(key);
  }
  return unread;
}

}  // namespace kdnas
