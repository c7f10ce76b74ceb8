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

#ifndef KDNAS_KV_CONFIG_H_
#define KDNAS_KV_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kdnas {

// Flat "key = value" text file. Blank lines and text after '#' are ignored.
// Keys are unique; a repeated key is a ConfigError.
class KeyValueFile {
 public:
  static KeyValueFile Parse(std::string_view text,
                            std::string source = "<string>");
  static KeyValueFile Load(const std::filesystem::path& path);

  bool Has(std::string_view key) const;
  const std::string& Get(std::string_view key) const;
  std::string GetOr(std::string_view key, std::string fallback) const;

  double GetDouble(std::string_view key) const;
  double GetDoubleOr(std::string_view key, double fallback) const;
  std::int64_t GetInt(std::string_view key) const;
  std::int64_t GetIntOr(std::string_view key, std::int64_t fallback) const;
  bool GetBoolOr(std::string_view key, bool fallback) const;

  // Value split on commas and whitespace.
  std::vector<std::string> GetList(std::string_view key) const;

  // Keys present in the file that were never read through a getter.
  std::vector<std::string> Unread() const;

  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  mutable std::set<std::string, std::less<>> read_;
  std::string source_;
};

double ParseDouble(std::string_view text, std::string_view what);
std::int64_t ParseInt(std::string_view text, std::string_view what);

}  // namespace kdnas

#endif  // KDNAS_KV_CONFIG_H_
