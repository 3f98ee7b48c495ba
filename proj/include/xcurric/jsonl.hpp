// Copyright 2026 The xcurric Authors.
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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "json.hpp"
#include "xcurric/error.hpp"

namespace xcurric {

// Insertion-ordered so every emitted record has a stable, documented key order.
using Json = nlohmann::ordered_json;

// Calls fn(record, line_number) for every non-blank line; line numbers are
// 1-based physical lines. Parse failures name the source and the line.
template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      fail(source, ": line ", line_no, ": malformed JSON (", e.what(), ")");
    }
    if (!record.is_object()) fail(source, ": line ", line_no, ": expected a JSON object");
    fn(record, line_no);
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open ", path.string(), " for reading");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot open ", path.string(), " for writing");
  return out;
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_input(path);
  for_each_json_line(in, path.string(), std::forward<Fn>(fn));
}

inline void write_json_lines(const std::filesystem::path& path, const std::vector<Json>& records) {
  auto out = open_output(path);
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) fail("write failed: ", path.string());
}

inline Json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(path.string(), ": malformed JSON (", e.what(), ")");
  }
}

inline void write_json_file(const std::filesystem::path& path, const Json& value) {
  auto out = open_output(path);
  out << value.dump(2) << '\n';
  if (!out) fail("write failed: ", path.string());
}

// Typed field access with errors that carry the record's location.
template <typename T>
T required_field(const Json& record, const char* key, const std::string& where) {
  auto it = record.find(key);
  if (it == record.end()) fail(where, ": missing field \"", key, "\"");
  try {
    return it->template get<T>();
  } catch (const Json::exception&) {
    fail(where, ": field \"", key, "\" has the wrong type");
  }
}

}  // namespace xcurric
