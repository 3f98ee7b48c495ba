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

// Cross-lingual corpus construction by round-trip translation.
//
// For an English pair (D, T): translate T into L, translate that back into
// English to get T', and keep (D, translation) when both
//   ROUGE-1 F1(T, T') > R1   and   ROUGE-2 F1(T, T') > R2
// on case-folded tokens.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xcurric/corpus.hpp"
#include "xcurric/error.hpp"
#include "xcurric/metrics.hpp"
#include "xcurric/text.hpp"

namespace xcurric {

struct TranslationItem {
  std::string id;
  std::string text;
};

// Backends must be safe to call from several threads at once.
class Translator {
 public:
  virtual ~Translator() = default;
  // One translation per item, in item order. Throws on failure.
  virtual std::vector<std::string> translate_batch(std::span<const TranslationItem> items,
                                                   std::string_view src,
                                                   std::string_view tgt) const = 0;
};

class IdentityTranslator final : public Translator {
 public:
  std::vector<std::string> translate_batch(std::span<const TranslationItem> items, std::string_view,
                                           std::string_view) const override {
    if (items.empty()) fail("empty translation batch");
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.text);
    return out;
  }
};

// Offline lookup table. TSV columns: id, direction ("en-hi"), text,
// translation. Rows are matched on (direction, id); rows with an empty id are
// matched on (direction, text).
class TsvTranslator final : public Translator {
 public:
  static TsvTranslator from_stream(std::istream& in, const std::string& source) {
    TsvTranslator t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::size_t start = 0;
      for (;;) {
        auto tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (cols.size() != 4) fail(source, ": line ", line_no, ": expected 4 tab-separated columns");
      if (line_no == 1 && cols[0] == "id" && cols[1] == "direction") continue;  // header
      if (cols[0].empty()) {
        t.by_text_[{cols[1], cols[2]}] = cols[3];
      } else {
        t.by_id_[{cols[1], cols[0]}] = cols[3];
      }
    }
    return t;
  }

  static TsvTranslator from_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return from_stream(in, path.string());
  }

  std::vector<std::string> translate_batch(std::span<const TranslationItem> items, std::string_view src,
                                           std::string_view tgt) const override {
    if (items.empty()) fail("empty translation batch");
    const std::string direction = detail::concat(src, "-", tgt);
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& item : items) {
      if (auto it = by_id_.find({direction, item.id}); it != by_id_.end()) {
        out.push_back(it->second);
      } else if (auto jt = by_text_.find({direction, item.text}); jt != by_text_.end()) {
        out.push_back(jt->second);
      } else {
        fail("no ", direction, " translation for text id \"", item.id, "\"");
      }
    }
    return out;
  }

 private:
  std::map<std::pair<std::string, std::string>, std::string> by_id_;
  std::map<std::pair<std::string, std::string>, std::string> by_text_;
};

struct RoundTripPair {
  std::string id;
  Content data;
  std::string text;         // original English text
  std::string target_text;  // translation into `lang`
  std::string back_text;    // translation of target_text back into English
  std::string lang;
  Json meta = Json::object();
};

struct RoundTripOptions {
  std::string source_lang = "en";
  std::size_t batch_size = 32;
  // Maximum number of batches in flight.
  std::size_t jobs = 1;
};

struct RoundTripResult {
  std::vector<RoundTripPair> pairs;
  std::vector<std::string> failed_ids;
};

namespace detail {

// Translates a batch; if the whole batch fails, retries item by item so that
// only the failing samples are lost. Failed positions come back empty.
inline std::vector<std::optional<std::string>> translate_salvaging(const Translator& translator,
                                                                   std::span<const TranslationItem> items,
                                                                   std::string_view src,
                                                                   std::string_view tgt) {
  std::vector<std::optional<std::string>> out(items.size());
  try {
    auto got = translator.translate_batch(items, src, tgt);
    if (got.size() != items.size()) {
      fail("translator returned ", got.size(), " translations for ", items.size(), " texts");
    }
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = std::move(got[i]);
    return out;
  } catch (const std::exception&) {
    if (items.size() == 1) return out;
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    try {
      auto got = translator.translate_batch(items.subspan(i, 1), src, tgt);
      if (got.size() == 1) out[i] = std::move(got[0]);
    } catch (const std::exception&) {
    }
  }
  return out;
}

}  // namespace detail

inline RoundTripResult round_trip(const SampleSet& samples, const Translator& translator,
                                  std::string_view lang, const RoundTripOptions& options = {}) {
  if (lang == options.source_lang) fail("target language must differ from ", options.source_lang);
  if (options.batch_size < 1) fail("batch size must be at least 1");
  RoundTripResult result;
  if (samples.empty()) return result;

  const std::size_t n = samples.size();
  std::vector<TranslationItem> forward;
  forward.reserve(n);
  for (const auto& s : samples) forward.push_back({s.id, s.text});

  std::vector<std::optional<std::string>> target(n);
  std::vector<std::optional<std::string>> back(n);

  // One task per batch runs both legs for that batch.
  auto run_batch = [&](std::size_t begin) {
    const std::size_t end = std::min(n, begin + options.batch_size);
    std::span<const TranslationItem> batch(forward.data() + begin, end - begin);
    auto fwd = detail::translate_salvaging(translator, batch, options.source_lang, lang);
    std::vector<TranslationItem> back_items;
    std::vector<std::size_t> back_pos;
    for (std::size_t i = 0; i < fwd.size(); ++i) {
      target[begin + i] = fwd[i];
      if (fwd[i]) {
        back_items.push_back({batch[i].id, *fwd[i]});
        back_pos.push_back(begin + i);
      }
    }
    if (back_items.empty()) return;
    auto bwd = detail::translate_salvaging(translator, back_items, lang, options.source_lang);
    for (std::size_t i = 0; i < bwd.size(); ++i) back[back_pos[i]] = std::move(bwd[i]);
  };

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  std::vector<std::future<void>> in_flight;
  for (std::size_t begin = 0; begin < n; begin += options.batch_size) {
    if (jobs == 1) {
      run_batch(begin);
      continue;
    }
    if (in_flight.size() == jobs) {
      in_flight.front().get();
      in_flight.erase(in_flight.begin());
    }
    in_flight.push_back(std::async(std::launch::async, run_batch, begin));
  }
  for (auto& f : in_flight) f.get();

  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = samples[i];
    if (!target[i] || !back[i]) {
      result.failed_ids.push_back(s.id);
      continue;
    }
    result.pairs.push_back({s.id, s.content, s.text, *std::move(target[i]), *std::move(back[i]),
                            std::string(lang), s.meta});
  }
  if (result.pairs.empty()) fail("round-trip translation failed for all ", n, " samples");
  return result;
}

struct FilterConfig {
  double r1 = 0.70;
  double r2 = 0.35;
};

struct FilterReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t rejected = 0;
  std::size_t rejected_r1 = 0;  // failed the ROUGE-1 test (possibly also ROUGE-2)
  std::size_t rejected_r2 = 0;  // failed the ROUGE-2 test (possibly also ROUGE-1)
  std::size_t failed_translations = 0;
  double mean_rouge1 = 0.0;
  double mean_rouge2 = 0.0;
  std::vector<std::string> warnings;

  Json to_json() const {
    Json j;
    j["total"] = total;
    j["kept"] = kept;
    j["rejected"] = rejected;
    j["rejected_r1"] = rejected_r1;
    j["rejected_r2"] = rejected_r2;
    j["failed_translations"] = failed_translations;
    j["mean_rouge1"] = mean_rouge1;
    j["mean_rouge2"] = mean_rouge2;
    j["warnings"] = warnings;
    return j;
  }
};

struct FilterResult {
  SampleSet kept;
  FilterReport report;
};

struct RoundTripScores {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
};

inline RoundTripScores round_trip_scores(std::string_view original, std::string_view back) {
  const auto t = fold_case(tokenize(original));
  const auto t_hat = fold_case(tokenize(back));
  return {rouge_n(t, t_hat, 1).f, rouge_n(t, t_hat, 2).f};
}

// Keeps a pair iff both ROUGE F1 scores strictly exceed their thresholds. Kept
// samples pair the original data with the target-language text.
inline FilterResult filter_pairs(std::span<const RoundTripPair> pairs, const FilterConfig& cfg) {
  FilterReport report;
  if (cfg.r2 > cfg.r1) {
    report.warnings.push_back(detail::concat("R2 (", cfg.r2, ") exceeds R1 (", cfg.r1, ")"));
  }
  if (cfg.r1 < 0.0 || cfg.r1 > 1.0 || cfg.r2 < 0.0 || cfg.r2 > 1.0) {
    report.warnings.push_back("thresholds outside [0, 1]");
  }
  std::vector<Sample> kept;
  double sum1 = 0.0;
  double sum2 = 0.0;
  for (const auto& p : pairs) {
    ++report.total;
    const auto scores = round_trip_scores(p.text, p.back_text);
    sum1 += scores.rouge1;
    sum2 += scores.rouge2;
    const bool pass1 = scores.rouge1 > cfg.r1;
    const bool pass2 = scores.rouge2 > cfg.r2;
    report.rejected_r1 += pass1 ? 0 : 1;
    report.rejected_r2 += pass2 ? 0 : 1;
    if (!(pass1 && pass2)) {
      ++report.rejected;
      continue;
    }
    Sample s;
    s.id = p.id;
    s.lang = p.lang;
    s.content = p.data;
    s.text = p.target_text;
    s.meta = p.meta;
    s.meta["rtt_rouge1"] = scores.rouge1;
    s.meta["rtt_rouge2"] = scores.rouge2;
    kept.push_back(std::move(s));
  }
  report.kept = kept.size();
  if (report.total > 0) {
    report.mean_rouge1 = sum1 / static_cast<double>(report.total);
    report.mean_rouge2 = sum2 / static_cast<double>(report.total);
  }
  return {SampleSet(std::move(kept), "round-trip filter"), std::move(report)};
}

}  // namespace xcurric
