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

// score -> shard -> schedule -> sample, end to end.
//
// Output layout under out_dir:
//   scores.jsonl, sharding.json, schedule.json, manifests/phase-<p>.jsonl
//
// Manifests are shuffled with derive_seed(seed, "sample"), the same seed the
// standalone `sample` subcommand uses.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xcurric/corpus.hpp"
#include "xcurric/criteria.hpp"
#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/random.hpp"
#include "xcurric/scheduler.hpp"

namespace xcurric {

inline constexpr std::string_view kSampleStage = "sample";

struct PipelineConfig {
  std::filesystem::path input;
  InputFormat format = InputFormat::detect;
  Criterion criterion = Criterion::length;
  ScoreOptions scoring;
  std::size_t shards = kDefaultShards;
  ScheduleMode mode = ScheduleMode::annealing;
  Direction direction = Direction::ascending;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::size_t jobs = 1;

  Json to_json() const {
    Json j;
    j["input"] = input.string();
    j["format"] = format == InputFormat::facts ? "facts" : format == InputFormat::table ? "table" : "auto";
    j["criterion"] = to_string(criterion);
    j["side"] = scoring.side == Side::text ? "text" : "input";
    j["joint_model"] = scoring.joint_model;
    j["alignment_file"] = scoring.alignment_file ? Json(scoring.alignment_file->string()) : Json(nullptr);
    j["shards"] = shards;
    j["mode"] = to_string(mode);
    j["direction"] = to_string(direction);
    j["seed"] = seed;
    j["out_dir"] = out_dir.string();
    j["jobs"] = jobs;
    return j;
  }
};

struct PipelineArtifacts {
  std::filesystem::path scores;
  std::filesystem::path sharding;
  std::filesystem::path schedule;
  std::vector<std::filesystem::path> manifests;
};

namespace detail {

template <typename Fn>
auto run_stage(std::string_view stage, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    fail("stage ", stage, ": ", e.what());
  }
}

}  // namespace detail

inline PipelineArtifacts pipeline_run(const PipelineConfig& cfg) {
  if (cfg.out_dir.empty()) usage_fail("pipeline needs an output directory");
  PipelineArtifacts out;
  out.scores = cfg.out_dir / "scores.jsonl";
  out.sharding = cfg.out_dir / "sharding.json";
  out.schedule = cfg.out_dir / "schedule.json";

  const auto scores = detail::run_stage("score", [&] {
    const auto samples = load_samples(cfg.input, cfg.format);
    auto s = score_samples(samples, cfg.criterion, cfg.scoring);
    write_scores(out.scores, s);
    return s;
  });
  const auto sharding = detail::run_stage("shard", [&] {
    auto s = make_shards(scores, cfg.shards, cfg.direction);
    write_json_file(out.sharding, to_json(s));
    return s;
  });
  const auto schedule = detail::run_stage("schedule", [&] {
    auto s = make_schedule(cfg.shards, cfg.mode);
    write_json_file(out.schedule, to_json(s));
    return s;
  });
  out.manifests = detail::run_stage("sample", [&] {
    return emit_manifests(sharding, schedule, derive_seed(cfg.seed, kSampleStage), cfg.out_dir / "manifests",
                          cfg.jobs);
  });
  return out;
}

}  // namespace xcurric
