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

#include <set>

#include "test_util.hpp"
#include "xcurric/pipeline.hpp"

namespace xcurric {
namespace {

const std::filesystem::path kFixtures = XCURRIC_FIXTURE_DIR;

TEST(Pipeline, ProducesAllArtifacts) {
  testutil::TempDir dir;
  PipelineConfig cfg;
  cfg.input = kFixtures / "e2e/samples.jsonl";
  cfg.criterion = Criterion::rarity;
  cfg.out_dir = dir.path();
  cfg.seed = 3;
  const auto a = pipeline_run(cfg);
  EXPECT_TRUE(std::filesystem::exists(a.scores));
  EXPECT_TRUE(std::filesystem::exists(a.sharding));
  EXPECT_TRUE(std::filesystem::exists(a.schedule));
  ASSERT_EQ(a.manifests.size(), 8u);
  const auto m = read_manifest(a.manifests[0]);
  EXPECT_EQ(m.order.size(), 100u);
  EXPECT_EQ(m.seed, derive_seed(3, kSampleStage));
  EXPECT_EQ(m.criterion, "rarity");
}

TEST(Pipeline, ErrorsNameTheStage) {
  testutil::TempDir dir;
  testutil::write_file(dir / "two.jsonl",
                       R"({"id":"a","lang":"en","facts":[{"head":"h","relation":"r","tail":"t"}],"text":"x"})"
                       "\n");
  PipelineConfig cfg;
  cfg.input = dir / "two.jsonl";
  cfg.out_dir = dir / "out";
  try {
    pipeline_run(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("stage shard"), std::string::npos) << e.what();
  }
  cfg.input = dir / "missing.jsonl";
  try {
    pipeline_run(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("stage score"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, AlignmentAnnealingEndsOnTopShard) {
  testutil::TempDir dir;
  PipelineConfig cfg;
  cfg.input = kFixtures / "e2e/samples.jsonl";
  cfg.criterion = Criterion::alignment;
  cfg.scoring.alignment_file = kFixtures / "e2e/alignment.jsonl";
  cfg.out_dir = dir.path();
  const auto a = pipeline_run(cfg);
  const auto sharding = sharding_from_json(read_json_file(a.sharding), "sharding");
  const auto last = read_manifest(a.manifests.back());
  EXPECT_EQ(std::set<std::string>(last.order.begin(), last.order.end()),
            std::set<std::string>(sharding.shards.back().begin(), sharding.shards.back().end()));
}

}  // namespace
}  // namespace xcurric
