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

// Per-sample ordering criteria.
//
//   length     number of tokens N
//   rarity     -sum_k ln p(w_k) under a unigram model of the corpus
//   alignment  confidence in [0, 1] that text and data are fully aligned,
//              read from an external scores file or estimated heuristically

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xcurric/corpus.hpp"
#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/text.hpp"

namespace xcurric {

enum class Criterion { length, rarity, alignment };

inline std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::length: return "length";
    case Criterion::rarity: return "rarity";
    case Criterion::alignment: return "alignment";
  }
  return "?";
}

inline Criterion parse_criterion(std::string_view s) {
  if (s == "length") return Criterion::length;
  if (s == "rarity") return Criterion::rarity;
  if (s == "alignment") return Criterion::alignment;
  usage_fail("unknown criterion \"", s, "\" (expected length, rarity or alignment)");
}

struct ScoredSample {
  std::string id;
  Criterion criterion = Criterion::length;
  double value = 0.0;

  bool operator==(const ScoredSample&) const = default;
};

// Which side of a sample the token-based criteria look at.
enum class Side { text, input };

inline Side parse_side(std::string_view s) {
  if (s == "text") return Side::text;
  if (s == "input") return Side::input;
  usage_fail("unknown side \"", s, "\" (expected text or input)");
}

// Input-side tokens are the tokens of the data fields themselves, without the
// linearization tags.
inline TokenSeq sample_tokens(const Sample& s, Side side) {
  if (side == Side::text) return tokenize(s.text);
  TokenSeq out;
  auto add = [&out](std::string_view field) {
    for (auto& t : tokenize(field)) out.push_back(std::move(t));
  };
  if (s.has_facts()) {
    for (const auto& f : s.facts()) {
      add(f.head);
      add(f.relation);
      add(f.tail);
    }
  } else {
    const auto& t = s.table();
    add(t.page_title);
    add(t.section_title);
    for (const auto& c : t.cells) {
      add(c.column_header);
      add(c.value);
    }
  }
  return out;
}

// Unigram counts with optional add-one smoothing. Smoothing reserves a single
// bucket for every unseen token:
//   p(w)      = (count(w) + 1) / (total + V + 1)
//   p(unseen) = 1 / (total + V + 1)
// so the seen vocabulary plus the bucket sums to one.
class UnigramModel {
 public:
  explicit UnigramModel(bool smoothing = true) : smoothing_(smoothing) {}

  void add(std::string_view token, std::uint64_t count = 1) {
    if (count == 0) return;
    auto it = counts_.find(token);
    if (it == counts_.end()) {
      counts_.emplace(std::string(token), count);
    } else {
      it->second += count;
    }
    total_ += count;
  }

  void add(const TokenSeq& tokens) {
    for (const auto& t : tokens) add(t);
  }

  bool smoothing() const { return smoothing_; }
  std::uint64_t total() const { return total_; }
  std::size_t vocab_size() const { return counts_.size(); }
  const std::map<std::string, std::uint64_t, std::less<>>& counts() const { return counts_; }

  std::uint64_t count(std::string_view token) const {
    auto it = counts_.find(token);
    return it == counts_.end() ? 0 : it->second;
  }

  double denominator() const {
    return smoothing_ ? static_cast<double>(total_ + counts_.size() + 1)
                      : static_cast<double>(total_);
  }

  double unseen_prob() const { return smoothing_ ? 1.0 / denominator() : 0.0; }

  double prob(std::string_view token) const {
    const auto c = count(token);
    if (c == 0) return unseen_prob();
    return (static_cast<double>(c) + (smoothing_ ? 1.0 : 0.0)) / denominator();
  }

  // JSONL: a header {"total", "vocab_size", "smoothing"} then {"token", "count"}
  // in byte order of the token.
  void save(std::ostream& out) const {
    Json header;
    header["total"] = total_;
    header["vocab_size"] = counts_.size();
    header["smoothing"] = smoothing_;
    out << header.dump() << '\n';
    for (const auto& [token, c] : counts_) {
      out << Json{{"token", token}, {"count", c}}.dump() << '\n';
    }
  }

  static UnigramModel load(std::istream& in, const std::string& source = "unigram model") {
    std::optional<UnigramModel> model;
    std::uint64_t expected_total = 0;
    std::size_t expected_vocab = 0;
    for_each_json_line(in, source, [&](const Json& r, std::size_t line_no) {
      const auto where = detail::concat(source, ": line ", line_no);
      if (!model) {
        model.emplace(required_field<bool>(r, "smoothing", where));
        expected_total = required_field<std::uint64_t>(r, "total", where);
        expected_vocab = required_field<std::size_t>(r, "vocab_size", where);
        return;
      }
      model->add(required_field<std::string>(r, "token", where),
                 required_field<std::uint64_t>(r, "count", where));
    });
    if (!model) fail(source, ": missing header record");
    if (model->total() != expected_total || model->vocab_size() != expected_vocab) {
      fail(source, ": header totals do not match the token records");
    }
    return *std::move(model);
  }

 private:
  bool smoothing_;
  std::uint64_t total_ = 0;
  std::map<std::string, std::uint64_t, std::less<>> counts_;
};

// Aggregates the chosen side of every sample, optionally restricted to one
// language.
inline UnigramModel build_unigram(const SampleSet& corpus, Side side, bool smoothing = true,
                                  std::optional<std::string_view> lang = std::nullopt) {
  if (corpus.empty()) fail("cannot build a unigram model from an empty corpus");
  UnigramModel model(smoothing);
  for (const auto& s : corpus) {
    if (lang && s.lang != *lang) continue;
    model.add(sample_tokens(s, side));
  }
  if (model.total() == 0) fail("unigram model has no tokens");
  return model;
}

inline double score_length(const TokenSeq& seq) {
  if (seq.empty()) fail("unscoreable: empty token sequence");
  return static_cast<double>(seq.size());
}

inline double score_rarity(const TokenSeq& seq, const UnigramModel& model) {
  if (seq.empty()) fail("unscoreable: empty token sequence");
  double sum = 0.0;
  for (const auto& token : seq) {
    const double p = model.prob(token);
    if (!(p > 0.0)) fail("token \"", token, "\" has zero probability under an unsmoothed model");
    sum -= std::log(p);
  }
  // -log(1) is -0.0; report a clean zero.
  return sum == 0.0 ? 0.0 : sum;
}

// External alignment scores: JSONL {"id", "score"} with score in [0, 1].
inline std::vector<ScoredSample> alignment_from_stream(std::istream& in, const std::string& source) {
  std::vector<ScoredSample> out;
  for_each_json_line(in, source, [&](const Json& r, std::size_t line_no) {
    const auto where = detail::concat(source, ": line ", line_no);
    auto id = required_field<std::string>(r, "id", where);
    auto score = required_field<double>(r, "score", where);
    if (!(score >= 0.0 && score <= 1.0)) {
      fail(where, ": alignment score ", score, " for id \"", id, "\" is outside [0, 1]");
    }
    out.push_back({std::move(id), Criterion::alignment, score});
  });
  return out;
}

inline std::vector<ScoredSample> alignment_from_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return alignment_from_stream(in, path.string());
}

// Reorders externally supplied scores to follow the sample set. Every sample
// must be scored exactly once and every score must name a known sample.
inline std::vector<ScoredSample> join_scores(const SampleSet& samples,
                                             const std::vector<ScoredSample>& scores) {
  std::unordered_map<std::string, const ScoredSample*> by_id;
  for (const auto& s : scores) {
    if (!samples.find(s.id)) fail("scored id \"", s.id, "\" is not in the sample set");
    if (!by_id.emplace(s.id, &s).second) fail("id \"", s.id, "\" is scored more than once");
  }
  std::vector<ScoredSample> out;
  out.reserve(samples.size());
  for (const auto& sample : samples) {
    auto it = by_id.find(sample.id);
    if (it == by_id.end()) fail("sample \"", sample.id, "\" has no score");
    out.push_back(*it->second);
  }
  return out;
}

namespace detail {

// Case-folded tokens in which every digit run is rewritten in ASCII digits,
// with commas between digits dropped and leading zeros removed
// ("Year 01,999" and "year ١٩٩٩" both give ["year", "1999"]).
inline TokenSeq normalize_for_alignment(std::string_view text) {
  TokenSeq out;
  for (const auto& token : tokenize(text)) {
    std::string norm;
    std::string digits;
    bool in_number = false;
    auto flush_digits = [&] {
      if (!in_number) return;
      auto first = digits.find_first_not_of('0');
      norm += first == std::string::npos ? "0" : digits.substr(first);
      digits.clear();
      in_number = false;
    };
    const std::string folded = fold_case(token);
    for (std::size_t pos = 0; pos < folded.size();) {
      auto cp = utf8::decode(folded, pos);
      const int d = digit_value(cp.value);
      if (d >= 0) {
        digits.push_back(static_cast<char>('0' + d));
        in_number = true;
      } else if (in_number && cp.value == U',' && pos + 1 < folded.size() &&
                 digit_value(utf8::decode(folded, pos + 1).value) >= 0) {
        // thousands separator inside a number
      } else {
        flush_digits();
        norm.append(folded, pos, cp.length);
      }
      pos += cp.length;
    }
    flush_digits();
    out.push_back(std::move(norm));
  }
  return out;
}

inline bool contains_run(const TokenSeq& haystack, const TokenSeq& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size() && match; ++j) {
      match = haystack[i + j] == needle[j];
    }
    if (match) return true;
  }
  return false;
}

}  // namespace detail

// Fraction of data slots (fact heads and tails, or cell values) that occur as
// a contiguous run of normalized tokens in the normalized reference text.
// Relations and column headers are not slots.
inline double heuristic_alignment(const Sample& sample) {
  std::vector<std::string_view> slots;
  if (sample.has_facts()) {
    for (const auto& f : sample.facts()) {
      slots.push_back(f.head);
      slots.push_back(f.tail);
    }
  } else {
    for (const auto& c : sample.table().cells) slots.push_back(c.value);
  }
  if (slots.empty()) fail("sample \"", sample.id, "\" has no alignment slots");
  const TokenSeq text = detail::normalize_for_alignment(sample.text);
  std::size_t matched = 0;
  for (auto slot : slots) {
    if (detail::contains_run(text, detail::normalize_for_alignment(slot))) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(slots.size());
}

struct ScoreOptions {
  Side side = Side::text;
  // One unigram model per language unless joint_model is set.
  bool joint_model = false;
  bool smoothing = true;
  // External alignment scores; when absent the heuristic is used.
  std::optional<std::filesystem::path> alignment_file;
};

inline std::vector<ScoredSample> score_samples(const SampleSet& samples, Criterion criterion,
                                               const ScoreOptions& options = {}) {
  std::vector<ScoredSample> out;
  out.reserve(samples.size());
  switch (criterion) {
    case Criterion::length:
      for (const auto& s : samples) {
        out.push_back({s.id, criterion, score_length(sample_tokens(s, options.side))});
      }
      break;
    case Criterion::rarity: {
      std::map<std::string, UnigramModel, std::less<>> models;
      for (const auto& s : samples) {
        const std::string key = options.joint_model ? std::string() : s.lang;
        auto it = models.find(key);
        if (it == models.end()) {
          auto lang = options.joint_model ? std::nullopt : std::optional<std::string_view>(s.lang);
          it = models.emplace(key, build_unigram(samples, options.side, options.smoothing, lang))
                   .first;
        }
        out.push_back({s.id, criterion, score_rarity(sample_tokens(s, options.side), it->second)});
      }
      break;
    }
    case Criterion::alignment:
      if (options.alignment_file) {
        out = join_scores(samples, alignment_from_file(*options.alignment_file));
      } else {
        for (const auto& s : samples) out.push_back({s.id, criterion, heuristic_alignment(s)});
      }
      break;
  }
  return out;
}

// Scores file: JSONL {"id", "criterion", "value"}.
inline Json to_json(const ScoredSample& s) {
  Json j;
  j["id"] = s.id;
  j["criterion"] = to_string(s.criterion);
  j["value"] = s.value;
  return j;
}

inline void write_scores(const std::filesystem::path& path, const std::vector<ScoredSample>& scores) {
  std::vector<Json> records;
  records.reserve(scores.size());
  for (const auto& s : scores) records.push_back(to_json(s));
  write_json_lines(path, records);
}

inline std::vector<ScoredSample> read_scores(const std::filesystem::path& path) {
  std::vector<ScoredSample> out;
  for_each_json_line(path, [&](const Json& r, std::size_t line_no) {
    const auto where = detail::concat(path.string(), ": line ", line_no);
    ScoredSample s{required_field<std::string>(r, "id", where),
                   parse_criterion(required_field<std::string>(r, "criterion", where)),
                   required_field<double>(r, "value", where)};
    if (!std::isfinite(s.value)) fail(where, ": non-finite criterion value");
    out.push_back(std::move(s));
  });
  return out;
}

}  // namespace xcurric
