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

#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <sstream>

#include "test_util.hpp"
#include "xcurric/rtt_filter.hpp"

namespace xcurric {
namespace {

SampleSet english(std::size_t n) {
  std::vector<Sample> v;
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(testutil::fact_sample("en-" + std::to_string(i), "en",
                                      "Sample number " + std::to_string(i) + " was born in Pune in 1931.",
                                      {{"S", "born in", "Pune"}}));
  }
  return SampleSet(std::move(v), "mem");
}

class UppercaseTranslator final : public Translator {
 public:
  std::vector<std::string> translate_batch(std::span<const TranslationItem> items, std::string_view,
                                           std::string_view) const override {
    std::vector<std::string> out;
    for (const auto& i : items) {
      std::string s = i.text;
      for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      out.push_back(s);
    }
    return out;
  }
};

// Fails any batch that contains a listed id.
class FlakyTranslator final : public Translator {
 public:
  explicit FlakyTranslator(std::set<std::string> bad) : bad_(std::move(bad)) {}
  std::vector<std::string> translate_batch(std::span<const TranslationItem> items, std::string_view,
                                           std::string_view) const override {
    ++calls;
    std::vector<std::string> out;
    for (const auto& i : items) {
      if (bad_.contains(i.id)) fail("backend error");
      out.push_back(i.text);
    }
    return out;
  }
  mutable std::atomic<int> calls{0};

 private:
  std::set<std::string> bad_;
};

TEST(RoundTrip, IdentityKeepsText) {
  const auto set = english(5);
  const auto r = round_trip(set, IdentityTranslator{}, "hi");
  ASSERT_EQ(r.pairs.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.pairs[i].target_text, set[i].text);
    EXPECT_EQ(r.pairs[i].back_text, set[i].text);
    EXPECT_EQ(r.pairs[i].lang, "hi");
  }
  EXPECT_TRUE(r.failed_ids.empty());
  EXPECT_TRUE(round_trip(SampleSet{}, IdentityTranslator{}, "hi").pairs.empty());
  EXPECT_THROW(round_trip(set, IdentityTranslator{}, "en"), Error);
}

TEST(RoundTrip, CaseFoldedScoresIgnoreUppercasing) {
  const auto r = round_trip(english(2), UppercaseTranslator{}, "ta");
  EXPECT_NE(r.pairs[0].back_text, r.pairs[0].text);
  const auto s = round_trip_scores(r.pairs[0].text, r.pairs[0].back_text);
  EXPECT_EQ(s.rouge1, 1.0);
  EXPECT_EQ(s.rouge2, 1.0);
}

TEST(RoundTrip, BatchFailureIsSalvagedPerItem) {
  FlakyTranslator t({"en-3"});
  RoundTripOptions opt;
  opt.batch_size = 4;
  const auto r = round_trip(english(8), t, "bn", opt);
  EXPECT_EQ(r.pairs.size(), 7u);
  EXPECT_EQ(r.failed_ids, std::vector<std::string>{"en-3"});

  FlakyTranslator all({"en-0", "en-1"});
  EXPECT_THROW(round_trip(english(2), all, "bn"), Error);
}

TEST(RoundTrip, ConcurrentBatchesGiveTheSameResult) {
  RoundTripOptions opt;
  opt.batch_size = 3;
  opt.jobs = 4;
  const auto a = round_trip(english(20), IdentityTranslator{}, "mr", opt);
  const auto b = round_trip(english(20), IdentityTranslator{}, "mr");
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) EXPECT_EQ(a.pairs[i].id, b.pairs[i].id);
}

TEST(Filter, IdentityPairsAreKept) {
  const auto r = round_trip(english(4), IdentityTranslator{}, "hi");
  const auto f = filter_pairs(r.pairs, FilterConfig{});
  EXPECT_EQ(f.kept.size(), 4u);
  EXPECT_EQ(f.report.rejected, 0u);
  EXPECT_EQ(f.kept[0].lang, "hi");
  EXPECT_EQ(f.kept[0].meta["rtt_rouge1"], 1.0);
  const auto strict = filter_pairs(r.pairs, FilterConfig{0.99, 0.99});
  EXPECT_EQ(strict.kept.size(), 4u);
}

TEST(Filter, LowRouge1IsRejected) {
  RoundTripPair p;
  p.id = "x";
  p.lang = "hi";
  p.data = FactList{{"h", "r", "t"}};
  p.text = "a b c d";
  p.back_text = "a b x y";  // ROUGE-1 F1 = 0.5
  const auto f = filter_pairs(std::vector<RoundTripPair>{p}, FilterConfig{});
  EXPECT_EQ(f.kept.size(), 0u);
  EXPECT_EQ(f.report.rejected_r1, 1u);
  EXPECT_EQ(f.report.mean_rouge1, 0.5);
}

TEST(Filter, ThresholdsAreStrictAndOrderingIsWarned) {
  RoundTripPair p;
  p.id = "x";
  p.lang = "hi";
  p.data = FactList{{"h", "r", "t"}};
  p.text = "a b c d";
  p.back_text = "a b c d";
  EXPECT_EQ(filter_pairs(std::vector<RoundTripPair>{p}, FilterConfig{1.0, 0.35}).kept.size(), 0u);
  const auto w = filter_pairs(std::vector<RoundTripPair>{p}, FilterConfig{0.3, 0.6});
  EXPECT_FALSE(w.report.warnings.empty());
}

TEST(TsvTranslator, LooksUpByIdThenText) {
  std::istringstream in(
      "id\tdirection\ttext\ttranslation\n"
      "a\ten-hi\tHello\tनमस्ते\n"
      "\thi-en\tनमस्ते\tHello there\n");
  const auto t = TsvTranslator::from_stream(in, "mem");
  const std::vector<TranslationItem> fwd{{"a", "ignored"}};
  EXPECT_EQ(t.translate_batch(fwd, "en", "hi"), std::vector<std::string>{"नमस्ते"});
  const std::vector<TranslationItem> back{{"zz", "नमस्ते"}};
  EXPECT_EQ(t.translate_batch(back, "hi", "en"), std::vector<std::string>{"Hello there"});
  const std::vector<TranslationItem> miss{{"q", "nothing"}};
  try {
    t.translate_batch(miss, "en", "hi");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("\"q\""), std::string::npos);
  }
  std::istringstream bad("a\tb\n");
  EXPECT_THROW(TsvTranslator::from_stream(bad, "mem"), Error);
}

TEST(IdentityTranslator, Basic) {
  const std::vector<TranslationItem> items{{"i", "x"}};
  EXPECT_EQ(IdentityTranslator{}.translate_batch(items, "en", "hi"), std::vector<std::string>{"x"});
}

}  // namespace
}  // namespace xcurric
