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

// ROUGE-N, corpus BLEU and chrF++.
//
// All three reduce to clipped n-gram overlap: for hypothesis counts h(g) and
// reference counts r(g), matches = sum_g min(h(g), r(g)). Corpus scores are
// computed from per-pair statistics summed over the corpus, so aggregation is
// associative and order-independent.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/text.hpp"

namespace xcurric {

struct NGramCounts {
  std::size_t n = 0;
  std::unordered_map<std::string, std::size_t> counts;
  std::size_t total = 0;  // max(0, len - n + 1)
};

namespace detail {

// Units are joined with a separator that cannot occur inside a token, so
// distinct n-grams always map to distinct keys.
inline constexpr char kUnitSeparator = '\x1f';

template <typename Unit>
NGramCounts count_ngrams(std::span<const Unit> units, std::size_t n, bool join_with_separator) {
  NGramCounts out;
  out.n = n;
  if (n == 0 || units.size() < n) return out;
  out.total = units.size() - n + 1;
  std::string key;
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    key.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j && join_with_separator) key += kUnitSeparator;
      key += units[i + j];
    }
    ++out.counts[key];
  }
  return out;
}

}  // namespace detail

inline NGramCounts ngram_counts(const TokenSeq& tokens, std::size_t n) {
  return detail::count_ngrams(std::span<const std::string>(tokens), n, true);
}

// Character n-grams over code points.
inline NGramCounts char_ngram_counts(const std::vector<std::string_view>& chars, std::size_t n) {
  return detail::count_ngrams(std::span<const std::string_view>(chars), n, false);
}

inline std::size_t clipped_overlap(const NGramCounts& hyp, const NGramCounts& ref) {
  const auto& small = hyp.counts.size() <= ref.counts.size() ? hyp.counts : ref.counts;
  const auto& large = &small == &hyp.counts ? ref.counts : hyp.counts;
  std::size_t matches = 0;
  for (const auto& [gram, c] : small) {
    auto it = large.find(gram);
    if (it != large.end()) matches += std::min(c, it->second);
  }
  return matches;
}

// Matches and totals for one n-gram order.
struct OverlapStats {
  std::size_t matches = 0;
  std::size_t hyp_total = 0;
  std::size_t ref_total = 0;

  OverlapStats& operator+=(const OverlapStats& o) {
    matches += o.matches;
    hyp_total += o.hyp_total;
    ref_total += o.ref_total;
    return *this;
  }
  bool operator==(const OverlapStats&) const = default;
};

inline OverlapStats overlap_stats(const NGramCounts& hyp, const NGramCounts& ref) {
  return {clipped_overlap(hyp, ref), hyp.total, ref.total};
}

struct MetricReport {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  std::map<std::string, double> details;

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["precision"] = precision;
    j["recall"] = recall;
    j["f"] = f;
    Json d = Json::object();
    for (const auto& [k, v] : details) d[k] = v;
    j["details"] = std::move(d);
    return j;
  }
};

// ROUGE-N F1. With no n-grams on one side every component is 0; with no
// n-grams on either side the texts agree trivially and every component is 1.
inline MetricReport rouge_n(const TokenSeq& candidate, const TokenSeq& reference, std::size_t n) {
  if (n < 1) fail("ROUGE order must be at least 1");
  const auto s = overlap_stats(ngram_counts(candidate, n), ngram_counts(reference, n));
  MetricReport r;
  r.name = "rouge" + std::to_string(n);
  r.details["matches"] = static_cast<double>(s.matches);
  r.details["candidate_ngrams"] = static_cast<double>(s.hyp_total);
  r.details["reference_ngrams"] = static_cast<double>(s.ref_total);
  if (s.hyp_total == 0 && s.ref_total == 0) {
    r.precision = r.recall = r.f = 1.0;
    return r;
  }
  r.precision = s.hyp_total ? static_cast<double>(s.matches) / static_cast<double>(s.hyp_total) : 0.0;
  r.recall = s.ref_total ? static_cast<double>(s.matches) / static_cast<double>(s.ref_total) : 0.0;
  r.f = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

struct BleuOptions {
  std::size_t max_order = 4;
  // A zero match count at some order is replaced by this many matches.
  double epsilon = 0.1;
};

struct BleuStats {
  std::vector<OverlapStats> orders;  // orders[n-1]
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& o) {
    if (orders.size() < o.orders.size()) orders.resize(o.orders.size());
    for (std::size_t i = 0; i < o.orders.size(); ++i) orders[i] += o.orders[i];
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    return *this;
  }
};

inline BleuStats bleu_stats(const TokenSeq& hyp, const TokenSeq& ref, std::size_t max_order = 4) {
  BleuStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (std::size_t n = 1; n <= max_order; ++n) {
    s.orders.push_back(overlap_stats(ngram_counts(hyp, n), ngram_counts(ref, n)));
  }
  return s;
}

// BLEU on a 0-100 scale from summed statistics:
//   p_n  = m_n / t_n, with m_n = 0 replaced by epsilon
//   BP   = exp(1 - r/c) if c < r else 1
//   BLEU = 100 * BP * exp(mean_n ln p_n)
// The mean runs over orders that have at least one hypothesis n-gram in the
// corpus, so corpora of very short segments still score. `precision` carries
// the geometric mean of p_n and `recall` the length ratio c/r capped at 1.
inline MetricReport bleu_from_stats(const BleuStats& s, const BleuOptions& opt = {}) {
  MetricReport r;
  r.name = "bleu";
  r.details["hyp_len"] = static_cast<double>(s.hyp_len);
  r.details["ref_len"] = static_cast<double>(s.ref_len);
  if (s.hyp_len == 0) {
    r.details["bp"] = 0.0;
    return r;
  }
  double log_sum = 0.0;
  std::size_t effective = 0;
  for (std::size_t n = 1; n <= s.orders.size(); ++n) {
    const auto& o = s.orders[n - 1];
    if (o.hyp_total == 0) continue;
    const double m = o.matches > 0 ? static_cast<double>(o.matches) : opt.epsilon;
    const double p = m / static_cast<double>(o.hyp_total);
    r.details["p" + std::to_string(n)] = p;
    log_sum += std::log(p);
    ++effective;
  }
  const double c = static_cast<double>(s.hyp_len);
  const double ref = static_cast<double>(s.ref_len);
  const double bp = c < ref ? std::exp(1.0 - ref / c) : 1.0;
  const double geo = std::exp(log_sum / static_cast<double>(effective));
  r.details["bp"] = bp;
  r.details["effective_order"] = static_cast<double>(effective);
  r.precision = geo;
  r.recall = ref > 0.0 ? std::min(1.0, c / ref) : 1.0;
  r.f = 100.0 * bp * geo;
  return r;
}

inline MetricReport corpus_bleu(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references,
                                const BleuOptions& opt = {}) {
  if (hypotheses.size() != references.size()) {
    fail("BLEU: ", hypotheses.size(), " hypotheses but ", references.size(), " references");
  }
  if (hypotheses.empty()) fail("BLEU: empty corpus");
  if (opt.max_order < 1) fail("BLEU: max order must be at least 1");
  if (!(opt.epsilon > 0.0 && opt.epsilon <= 1.0)) fail("BLEU: epsilon must be in (0, 1]");
  BleuStats total;
  total.orders.resize(opt.max_order);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    total += bleu_stats(hypotheses[i], references[i], opt.max_order);
  }
  return bleu_from_stats(total, opt);
}

struct ChrfOptions {
  std::size_t char_order = 6;
  std::size_t word_order = 2;
  double beta = 2.0;
};

struct ChrfStats {
  std::vector<OverlapStats> char_orders;
  std::vector<OverlapStats> word_orders;

  ChrfStats& operator+=(const ChrfStats& o) {
    if (char_orders.size() < o.char_orders.size()) char_orders.resize(o.char_orders.size());
    if (word_orders.size() < o.word_orders.size()) word_orders.resize(o.word_orders.size());
    for (std::size_t i = 0; i < o.char_orders.size(); ++i) char_orders[i] += o.char_orders[i];
    for (std::size_t i = 0; i < o.word_orders.size(); ++i) word_orders[i] += o.word_orders[i];
    return *this;
  }
};

// Code points of `text` with all whitespace removed.
inline std::vector<std::string_view> chrf_chars(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::size_t pos = 0; pos < text.size();) {
    auto cp = utf8::decode(text, pos);
    if (!is_space(cp.value)) out.push_back(text.substr(pos, cp.length));
    pos += cp.length;
  }
  return out;
}

inline ChrfStats chrf_stats(std::string_view hyp, std::string_view ref, const ChrfOptions& opt = {}) {
  ChrfStats s;
  const auto hc = chrf_chars(hyp);
  const auto rc = chrf_chars(ref);
  for (std::size_t n = 1; n <= opt.char_order; ++n) {
    s.char_orders.push_back(overlap_stats(char_ngram_counts(hc, n), char_ngram_counts(rc, n)));
  }
  const auto hw = tokenize(hyp);
  const auto rw = tokenize(ref);
  for (std::size_t n = 1; n <= opt.word_order; ++n) {
    s.word_orders.push_back(overlap_stats(ngram_counts(hw, n), ngram_counts(rw, n)));
  }
  return s;
}

// chrF++ on a 0-100 scale. Per-order precision and recall are averaged
// uniformly over the character and word orders that have n-grams on both
// sides, then combined as F_beta = (1 + b^2) P R / (b^2 P + R).
inline MetricReport chrf_from_stats(const ChrfStats& s, const ChrfOptions& opt = {}) {
  MetricReport r;
  r.name = "chrf++";
  double p_sum = 0.0;
  double r_sum = 0.0;
  std::size_t effective = 0;
  auto visit = [&](const std::vector<OverlapStats>& orders, const char* prefix) {
    for (std::size_t i = 0; i < orders.size(); ++i) {
      const auto& o = orders[i];
      if (o.hyp_total == 0 || o.ref_total == 0) continue;
      const double p = static_cast<double>(o.matches) / static_cast<double>(o.hyp_total);
      const double rc = static_cast<double>(o.matches) / static_cast<double>(o.ref_total);
      r.details[std::string(prefix) + std::to_string(i + 1) + "_p"] = p;
      r.details[std::string(prefix) + std::to_string(i + 1) + "_r"] = rc;
      p_sum += p;
      r_sum += rc;
      ++effective;
    }
  };
  visit(s.char_orders, "char");
  visit(s.word_orders, "word");
  r.details["effective_order"] = static_cast<double>(effective);
  if (effective == 0) return r;
  r.precision = p_sum / static_cast<double>(effective);
  r.recall = r_sum / static_cast<double>(effective);
  const double b2 = opt.beta * opt.beta;
  const double denom = b2 * r.precision + r.recall;
  r.f = denom > 0.0 ? 100.0 * (1.0 + b2) * r.precision * r.recall / denom : 0.0;
  return r;
}

inline MetricReport chrf_pp(std::span<const std::string> hypotheses, std::span<const std::string> references,
                            const ChrfOptions& opt = {}) {
  if (hypotheses.size() != references.size()) {
    fail("chrF++: ", hypotheses.size(), " hypotheses but ", references.size(), " references");
  }
  ChrfStats total;
  total.char_orders.resize(opt.char_order);
  total.word_orders.resize(opt.word_order);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    total += chrf_stats(hypotheses[i], references[i], opt);
  }
  return chrf_from_stats(total, opt);
}

}  // namespace xcurric
