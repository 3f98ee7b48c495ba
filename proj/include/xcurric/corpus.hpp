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

// Data-to-text samples: the in-memory model, JSONL ingestion and the
// linearization of facts and tables into model-input strings.
//
// On disk one sample is one JSON object per line, either
//   {"id", "lang", "facts": [{"head", "relation", "tail"}], "text"}
// or
//   {"id", "lang", "page_title", "section_title",
//    "cells": [{"column_header", "value"}], "text"}
// with an optional free-form "meta" object.

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/text.hpp"

namespace xcurric {

struct FactTriple {
  std::string head;
  std::string relation;
  std::string tail;

  bool operator==(const FactTriple&) const = default;
};

struct TableCell {
  std::string column_header;  // may be empty
  std::string value;

  bool operator==(const TableCell&) const = default;
};

struct TableContent {
  std::string page_title;
  std::string section_title;
  std::vector<TableCell> cells;

  bool operator==(const TableContent&) const = default;
};

using FactList = std::vector<FactTriple>;
using Content = std::variant<FactList, TableContent>;

struct Sample {
  std::string id;
  std::string lang;
  Content content;
  std::string text;
  Json meta = Json::object();

  bool has_facts() const { return std::holds_alternative<FactList>(content); }
  const FactList& facts() const { return std::get<FactList>(content); }
  const TableContent& table() const { return std::get<TableContent>(content); }

  bool operator==(const Sample&) const = default;
};

// Language codes of the supported corpora, with display names.
inline const std::map<std::string, std::string, std::less<>>& known_languages() {
  static const std::map<std::string, std::string, std::less<>> kLanguages = {
      {"as", "Assamese"}, {"bn", "Bangla"},    {"en", "English"},
      {"gu", "Gujarati"}, {"hi", "Hindi"},     {"kn", "Kannada"},
      {"ml", "Malayalam"}, {"mr", "Marathi"},  {"or", "Odia"},
      {"pa", "Punjabi"},  {"ta", "Tamil"},     {"te", "Telugu"},
  };
  return kLanguages;
}

inline std::string language_name(std::string_view code) {
  const auto& langs = known_languages();
  auto it = langs.find(code);
  return it == langs.end() ? std::string(code) : it->second;
}

// Ordered, id-unique collection. Immutable once built.
class SampleSet {
 public:
  SampleSet() = default;

  SampleSet(std::vector<Sample> samples, std::string source_path)
      : samples_(std::move(samples)), source_path_(std::move(source_path)) {
    index_.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!index_.emplace(samples_[i].id, i).second) {
        fail(source_path_, ": duplicate sample id \"", samples_[i].id, "\"");
      }
    }
  }

  const std::vector<Sample>& samples() const { return samples_; }
  const std::string& source_path() const { return source_path_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  const Sample* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &samples_[it->second];
  }

  bool operator==(const SampleSet& other) const { return samples_ == other.samples_; }

 private:
  std::vector<Sample> samples_;
  std::string source_path_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class InputFormat { facts, table, detect };

inline InputFormat parse_input_format(std::string_view s) {
  if (s == "facts") return InputFormat::facts;
  if (s == "table") return InputFormat::table;
  if (s == "auto" || s == "detect") return InputFormat::detect;
  usage_fail("unknown input format \"", s, "\" (expected facts, table or auto)");
}

struct LoadOptions {
  // Codes accepted in addition to known_languages().
  std::set<std::string, std::less<>> extra_languages;
  bool allow_any_language = false;
};

namespace detail {

inline std::string trimmed_field(const Json& obj, const char* key, const std::string& where,
                                 bool allow_empty = false) {
  auto value = std::string(trim(required_field<std::string>(obj, key, where)));
  if (value.empty() && !allow_empty) fail(where, ": field \"", key, "\" is empty");
  return value;
}

}  // namespace detail

// Builds one Sample from a parsed record. `fallback_id` is used when the
// record carries no "id".
inline Sample sample_from_json(const Json& record, InputFormat format,
                               const std::string& fallback_id, const std::string& where,
                               const LoadOptions& options = {}) {
  Sample s;
  s.id = record.contains("id") ? detail::trimmed_field(record, "id", where) : fallback_id;
  s.lang = detail::trimmed_field(record, "lang", where);
  if (!options.allow_any_language && !known_languages().contains(s.lang) &&
      !options.extra_languages.contains(s.lang)) {
    fail(where, ": unsupported language \"", s.lang, "\"");
  }
  s.text = detail::trimmed_field(record, "text", where);

  if (format == InputFormat::detect) {
    format = record.contains("facts") ? InputFormat::facts : InputFormat::table;
  }
  if (format == InputFormat::facts) {
    auto it = record.find("facts");
    if (it == record.end() || !it->is_array()) fail(where, ": missing \"facts\" array");
    FactList facts;
    for (const auto& f : *it) {
      if (!f.is_object()) fail(where, ": fact entries must be objects");
      facts.push_back({detail::trimmed_field(f, "head", where),
                       detail::trimmed_field(f, "relation", where),
                       detail::trimmed_field(f, "tail", where)});
    }
    if (facts.empty()) fail(where, ": no facts");
    s.content = std::move(facts);
  } else {
    TableContent table;
    table.page_title = detail::trimmed_field(record, "page_title", where, true);
    table.section_title = detail::trimmed_field(record, "section_title", where, true);
    auto it = record.find("cells");
    if (it == record.end() || !it->is_array()) fail(where, ": missing \"cells\" array");
    for (const auto& c : *it) {
      if (!c.is_object()) fail(where, ": cell entries must be objects");
      table.cells.push_back({detail::trimmed_field(c, "column_header", where, true),
                             detail::trimmed_field(c, "value", where)});
    }
    if (table.cells.empty()) fail(where, ": no cells");
    s.content = std::move(table);
  }

  // Unrecognised keys are folded into meta so that a save/load cycle is stable.
  static const std::set<std::string, std::less<>> kKnown = {
      "id", "lang", "text", "facts", "page_title", "section_title", "cells", "meta"};
  if (auto it = record.find("meta"); it != record.end()) {
    if (!it->is_object()) fail(where, ": \"meta\" must be an object");
    s.meta = *it;
  }
  for (auto it = record.begin(); it != record.end(); ++it) {
    if (!kKnown.contains(it.key())) s.meta[it.key()] = it.value();
  }
  return s;
}

inline Json to_json(const Sample& s) {
  Json j;
  j["id"] = s.id;
  j["lang"] = s.lang;
  if (s.has_facts()) {
    Json facts = Json::array();
    for (const auto& f : s.facts()) {
      facts.push_back({{"head", f.head}, {"relation", f.relation}, {"tail", f.tail}});
    }
    j["facts"] = std::move(facts);
  } else {
    const auto& t = s.table();
    j["page_title"] = t.page_title;
    j["section_title"] = t.section_title;
    Json cells = Json::array();
    for (const auto& c : t.cells) {
      cells.push_back({{"column_header", c.column_header}, {"value", c.value}});
    }
    j["cells"] = std::move(cells);
  }
  j["text"] = s.text;
  if (!s.meta.empty()) j["meta"] = s.meta;
  return j;
}

inline SampleSet parse_samples(std::istream& in, InputFormat format, const std::string& source,
                               const LoadOptions& options = {}) {
  std::vector<Sample> samples;
  std::unordered_map<std::string, std::size_t> seen;
  for_each_json_line(in, source, [&](const Json& record, std::size_t line_no) {
    const std::string where = detail::concat(source, ": line ", line_no);
    Sample s = sample_from_json(record, format, detail::concat("line-", line_no), where, options);
    if (auto [it, inserted] = seen.emplace(s.id, line_no); !inserted) {
      fail(where, ": duplicate id \"", s.id, "\" (first seen on line ", it->second, ")");
    }
    samples.push_back(std::move(s));
  });
  return SampleSet(std::move(samples), source);
}

inline SampleSet load_samples(const std::filesystem::path& path, InputFormat format,
                              const LoadOptions& options = {}) {
  auto in = open_input(path);
  return parse_samples(in, format, path.string(), options);
}

inline void save_samples(const SampleSet& set, const std::filesystem::path& path) {
  std::vector<Json> records;
  records.reserve(set.size());
  for (const auto& s : set) records.push_back(to_json(s));
  write_json_lines(path, records);
}

// Tag tokens of the linearized input. Only the first three are fixed by the
// fact-triple format; the table tags follow the same pattern.
namespace tags {
inline constexpr std::string_view kHead = "<H>";
inline constexpr std::string_view kRelation = "<R>";
inline constexpr std::string_view kTail = "<T>";
inline constexpr std::string_view kPage = "<page>";
inline constexpr std::string_view kSection = "<section>";
inline constexpr std::string_view kCell = "<cell>";
inline constexpr std::string_view kColumn = "<col>";
}  // namespace tags

// "<H> h1 <R> r1 <T> t1 <H> h2 ..." in input order; no delimiter besides the
// next <H>.
inline std::string linearize_facts(std::span<const FactTriple> facts) {
  if (facts.empty()) fail("no facts");
  std::string out;
  for (const auto& f : facts) {
    if (!out.empty()) out += ' ';
    out.append(tags::kHead).append(" ").append(f.head);
    out.append(" ").append(tags::kRelation).append(" ").append(f.relation);
    out.append(" ").append(tags::kTail).append(" ").append(f.tail);
  }
  return out;
}

// "<page> P <section> S <cell> v1 <col> h1 ...". Empty titles and headers
// leave their tag followed directly by the next one.
inline std::string linearize_table(std::string_view page_title, std::string_view section_title,
                                   std::span<const TableCell> cells) {
  if (cells.empty()) fail("no cells");
  std::string out;
  auto emit = [&out](std::string_view tag, std::string_view value) {
    if (!out.empty()) out += ' ';
    out += tag;
    if (!value.empty()) out.append(" ").append(value);
  };
  emit(tags::kPage, page_title);
  emit(tags::kSection, section_title);
  for (const auto& c : cells) {
    emit(tags::kCell, c.value);
    emit(tags::kColumn, c.column_header);
  }
  return out;
}

inline std::string linearize(const Sample& s) {
  if (s.has_facts()) return linearize_facts(s.facts());
  const auto& t = s.table();
  return linearize_table(t.page_title, t.section_title, t.cells);
}

// Number of data slots a judge or aligner can cover: facts, or cells.
inline std::size_t slot_count(const Sample& s) {
  return s.has_facts() ? s.facts().size() : s.table().cells.size();
}

}  // namespace xcurric
