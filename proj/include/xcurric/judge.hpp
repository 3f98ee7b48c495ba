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

// LLM-as-judge: prompt rendering, response parsing and batch aggregation.
//
// Grades map to numbers as
//   fluent / faithful                 1.0
//   mostly fluent / mostly faithful   0.5
//   not fluent / not faithful         0.0
// and coverage is the first integer in the COVERAGE section.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xcurric/corpus.hpp"
#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/prompt_templates.hpp"
#include "xcurric/text.hpp"

namespace xcurric {

struct PromptTemplates {
  std::string alignment{templates::kAlignmentPrompt};
  std::string evaluation{templates::kEvalPrompt};

  // Loads alignment_prompt.txt and eval_prompt.txt from a directory.
  static PromptTemplates from_directory(const std::filesystem::path& dir) {
    auto slurp = [](const std::filesystem::path& p) {
      auto in = open_input(p);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    return {slurp(dir / "alignment_prompt.txt"), slurp(dir / "eval_prompt.txt")};
  }
};

namespace detail {

// Single-pass {{KEY}} / #lang# substitution; substituted values are never
// rescanned.
inline std::string render_template(std::string_view tpl,
                                   const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tpl.size() + 256);
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    bool replaced = false;
    for (const auto& [key, value] : values) {
      if (tpl.compare(pos, key.size(), key) == 0) {
        out += value;
        pos += key.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out += tpl[pos++];
  }
  // Template files end with a newline; prompts do not.
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

inline std::string default_dataset_name(const Sample& s) {
  return s.has_facts() ? "XAlign" : "xToTTo";
}

}  // namespace detail

struct PromptOptions {
  // Dataset named in the alignment prompt; defaults by content type.
  std::optional<std::string> dataset;
  PromptTemplates templates;
};

inline std::string render_alignment_prompt(const Sample& sample, const PromptOptions& opt = {}) {
  if (sample.lang.empty()) fail("sample \"", sample.id, "\" has no language");
  return detail::render_template(
      opt.templates.alignment,
      {{"{{DATASET}}", opt.dataset.value_or(detail::default_dataset_name(sample))},
       {"#lang#", language_name(sample.lang)},
       {"{{DATA}}", linearize(sample)},
       {"{{TEXT}}", sample.text}});
}

inline std::string render_eval_prompt(const Sample& sample, std::string_view generated,
                                      const PromptOptions& opt = {}) {
  if (trim(generated).empty()) fail("generated text for \"", sample.id, "\" is empty");
  return detail::render_template(opt.templates.evaluation,
                                 {{"{{DATA}}", linearize(sample)},
                                  {"{{OUTPUT}}", std::string(generated)},
                                  {"#lang#", language_name(sample.lang)}});
}

struct Judgement {
  bool parseable = false;
  double fluency = 0.0;
  double faithfulness = 0.0;
  int coverage = 0;
  std::vector<std::string> unsupported_phrases;
  std::string error;  // why the response was unparseable
};

enum class AlignmentClass { partial, complete };

struct AlignmentLabel {
  AlignmentClass label = AlignmentClass::partial;
  std::optional<double> confidence;
};

namespace detail {

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// First occurrence of `word` in `haystack` (already case-folded) that is not
// part of a longer word.
inline std::size_t find_word(std::string_view haystack, std::string_view word, std::size_t from = 0) {
  for (auto pos = haystack.find(word, from); pos != std::string_view::npos;
       pos = haystack.find(word, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(haystack[pos - 1]);
    const bool right = pos + word.size() >= haystack.size() || !is_word_char(haystack[pos + word.size()]);
    if (left && right) return pos;
  }
  return std::string_view::npos;
}

// The word before position `pos`, skipping spaces, hyphens and quotes.
inline std::string_view previous_word(std::string_view s, std::size_t pos) {
  std::size_t end = pos;
  while (end > 0 && !is_word_char(s[end - 1]) && s[end - 1] != '\n') --end;
  std::size_t begin = end;
  while (begin > 0 && is_word_char(s[begin - 1])) --begin;
  return s.substr(begin, end - begin);
}

// Grade of the first mention of `word` in a section.
inline std::optional<double> parse_grade(std::string_view section, std::string_view word) {
  const auto pos = find_word(section, word);
  if (pos == std::string_view::npos) return std::nullopt;
  const auto prev = previous_word(section, pos);
  if (prev == "not") return 0.0;
  if (prev == "mostly") return 0.5;
  return 1.0;
}

inline std::string strip_quotes(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '"' || s.front() == '\'' || s.front() == '`')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == '`' || s.back() == ',')) {
    s.remove_suffix(1);
  }
  return std::string(trim(s));
}

// Bulleted or numbered list items of a section, minus grade lines and
// placeholders such as "none".
inline std::vector<std::string> list_items(std::string_view section) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= section.size()) {
    auto end = section.find('\n', start);
    if (end == std::string_view::npos) end = section.size();
    auto line = trim(section.substr(start, end - start));
    start = end + 1;
    std::string_view item;
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
      item = line.substr(1);
    } else if (line.starts_with("\xE2\x80\xA2")) {  // bullet
      item = line.substr(3);
    } else {
      std::size_t d = 0;
      while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
      if (d > 0 && d < line.size() && (line[d] == '.' || line[d] == ')')) item = line.substr(d + 1);
    }
    const auto phrase = strip_quotes(item);
    if (phrase.empty()) continue;
    const auto folded = fold_case(phrase);
    if (folded == "none" || folded == "n/a" || folded == "faithful" || folded == "mostly faithful" ||
        folded == "not faithful") {
      continue;
    }
    out.push_back(phrase);
  }
  return out;
}

}  // namespace detail

inline Judgement parse_judgement(std::string_view response) {
  Judgement j;
  const std::string folded = fold_case(response);

  struct Header {
    std::string_view name;
    std::size_t pos;
  };
  std::vector<Header> headers;
  for (std::string_view name : {"fluency", "faithfulness", "coverage"}) {
    const auto pos = detail::find_word(folded, name);
    if (pos == std::string::npos) {
      j.error = detail::concat("missing ", name, " section");
      return j;
    }
    headers.push_back({name, pos});
  }
  std::sort(headers.begin(), headers.end(), [](const Header& a, const Header& b) { return a.pos < b.pos; });

  auto section = [&](std::string_view name, std::string_view text) {
    for (std::size_t i = 0; i < headers.size(); ++i) {
      if (headers[i].name != name) continue;
      const auto begin = headers[i].pos + name.size();
      const auto end = i + 1 < headers.size() ? headers[i + 1].pos : text.size();
      return text.substr(begin, end - begin);
    }
    return std::string_view{};
  };

  auto fluency = detail::parse_grade(section("fluency", folded), "fluent");
  if (!fluency) {
    j.error = "no fluency grade";
    return j;
  }
  auto faithfulness = detail::parse_grade(section("faithfulness", folded), "faithful");
  if (!faithfulness) {
    j.error = "no faithfulness grade";
    return j;
  }
  const auto coverage_text = section("coverage", folded);
  const auto digit = coverage_text.find_first_of("0123456789");
  if (digit == std::string_view::npos) {
    j.error = "no coverage count";
    return j;
  }
  std::size_t digit_end = digit;
  while (digit_end < coverage_text.size() && std::isdigit(static_cast<unsigned char>(coverage_text[digit_end]))) {
    ++digit_end;
  }
  const auto digits = coverage_text.substr(digit, digit_end - digit);
  if (digits.size() > 9) {
    j.error = "coverage count out of range";
    return j;
  }

  j.fluency = *fluency;
  j.faithfulness = *faithfulness;
  j.coverage = std::stoi(std::string(digits));
  // Phrases keep their original casing; fold_case preserves byte offsets.
  j.unsupported_phrases = detail::list_items(section("faithfulness", response));
  j.parseable = true;
  return j;
}

// Whichever of COMPLETE / PARTIAL appears first; an optional
// "confidence: <number>" is picked up when present.
inline std::optional<AlignmentLabel> parse_alignment_label(std::string_view response) {
  const std::string folded = fold_case(response);
  const auto complete = detail::find_word(folded, "complete");
  const auto partial = detail::find_word(folded, "partial");
  if (complete == std::string::npos && partial == std::string::npos) return std::nullopt;
  AlignmentLabel label;
  label.label = complete < partial ? AlignmentClass::complete : AlignmentClass::partial;
  if (auto c = detail::find_word(folded, "confidence"); c != std::string::npos) {
    const auto start = folded.find_first_of("0123456789.", c);
    if (start != std::string::npos) {
      try {
        const double v = std::stod(folded.substr(start));
        if (v >= 0.0 && v <= 1.0) label.confidence = v;
      } catch (const std::exception&) {
      }
    }
  }
  return label;
}

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  // Returns the model's reply to `prompt`. Throws on failure.
  virtual std::string complete(const std::string& id, const std::string& prompt) const = 0;
};

// Canned responses keyed by sample id, from JSONL {"id", "response"}.
class MockJudgeBackend final : public JudgeBackend {
 public:
  MockJudgeBackend() = default;
  explicit MockJudgeBackend(std::unordered_map<std::string, std::string> responses)
      : responses_(std::move(responses)) {}

  static MockJudgeBackend from_file(const std::filesystem::path& path) {
    std::unordered_map<std::string, std::string> responses;
    for_each_json_line(path, [&](const Json& r, std::size_t line_no) {
      const auto where = detail::concat(path.string(), ": line ", line_no);
      responses[required_field<std::string>(r, "id", where)] = required_field<std::string>(r, "response", where);
    });
    return MockJudgeBackend(std::move(responses));
  }

  std::string complete(const std::string& id, const std::string&) const override {
    auto it = responses_.find(id);
    if (it == responses_.end()) fail("no fixture response for id \"", id, "\"");
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::string> responses_;
};

struct JudgeRecord {
  std::string id;
  std::string lang;
  bool failed = false;
  std::string error;
  Judgement judgement;
  bool coverage_exceeds_slots = false;
};

struct LanguageSummary {
  std::size_t count = 0;
  std::size_t parsed = 0;
  std::size_t unparseable = 0;
  std::size_t failed = 0;
  double fluency = 0.0;       // means over parsed records
  double faithfulness = 0.0;
  double coverage = 0.0;
};

struct JudgeReport {
  std::map<std::string, LanguageSummary> by_lang;
  std::vector<JudgeRecord> records;
  std::vector<std::string> warnings;

  Json to_json() const {
    Json j = Json::object();
    for (const auto& [lang, s] : by_lang) {
      Json l;
      l["count"] = s.count;
      l["parsed"] = s.parsed;
      l["unparseable"] = s.unparseable;
      l["failed"] = s.failed;
      if (s.parsed > 0) {
        l["fluency"] = s.fluency;
        l["faithfulness"] = s.faithfulness;
        l["coverage"] = s.coverage;
      } else {
        l["fluency"] = nullptr;
        l["faithfulness"] = nullptr;
        l["coverage"] = nullptr;
      }
      j[lang] = std::move(l);
    }
    return j;
  }
};

// Judges outputs[i] against samples[i] and aggregates per language.
inline JudgeReport judge_batch(std::span<const Sample> samples, std::span<const std::string> outputs,
                               const JudgeBackend& backend, const PromptOptions& opt = {}) {
  if (samples.size() != outputs.size()) {
    fail("judge: ", samples.size(), " samples but ", outputs.size(), " outputs");
  }
  if (samples.empty()) fail("judge: empty batch");
  JudgeReport report;
  std::map<std::string, std::array<double, 3>> sums;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    JudgeRecord rec;
    rec.id = s.id;
    rec.lang = s.lang;
    auto& summary = report.by_lang[s.lang];
    ++summary.count;
    try {
      const auto response = backend.complete(s.id, render_eval_prompt(s, outputs[i], opt));
      rec.judgement = parse_judgement(response);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    if (rec.failed) {
      ++summary.failed;
    } else if (!rec.judgement.parseable) {
      ++summary.unparseable;
    } else {
      ++summary.parsed;
      auto& acc = sums[s.lang];
      acc[0] += rec.judgement.fluency;
      acc[1] += rec.judgement.faithfulness;
      acc[2] += rec.judgement.coverage;
      if (static_cast<std::size_t>(rec.judgement.coverage) > slot_count(s)) {
        rec.coverage_exceeds_slots = true;
        report.warnings.push_back(detail::concat("\"", s.id, "\": coverage ", rec.judgement.coverage,
                                                 " exceeds the ", slot_count(s), " input slots"));
      }
    }
    report.records.push_back(std::move(rec));
  }
  for (auto& [lang, summary] : report.by_lang) {
    if (summary.parsed == 0) continue;
    const auto& acc = sums[lang];
    const auto n = static_cast<double>(summary.parsed);
    summary.fluency = acc[0] / n;
    summary.faithfulness = acc[1] / n;
    summary.coverage = acc[2] / n;
  }
  return report;
}

}  // namespace xcurric
