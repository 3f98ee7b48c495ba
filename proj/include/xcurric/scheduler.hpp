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

// Shards, phase schedules and per-phase sampling manifests.
//
// Samples are sorted by criterion value and cut into K equal-size contiguous
// shards (shard 1 holds the lowest values). A schedule has K phases:
//
//   expanding   {1}, {1,2}, ..., {1..K}
//   annealing   {1..K}, {2..K}, ..., {K}
//
// A phase manifest is the union of the active shards, shuffled with a seeded
// Fisher-Yates pass over SplitMix64 (see random.hpp), so the same inputs always
// give the same bytes.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <future>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "xcurric/criteria.hpp"
#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/random.hpp"

namespace xcurric {

inline constexpr std::size_t kDefaultShards = 8;

enum class Direction { ascending, descending };

inline std::string_view to_string(Direction d) {
  return d == Direction::ascending ? "ascending" : "descending";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "ascending") return Direction::ascending;
  if (s == "descending") return Direction::descending;
  usage_fail("unknown direction \"", s, "\" (expected ascending or descending)");
}

enum class ScheduleMode { expanding, annealing };

inline std::string_view to_string(ScheduleMode m) {
  return m == ScheduleMode::expanding ? "expanding" : "annealing";
}

inline ScheduleMode parse_schedule_mode(std::string_view s) {
  if (s == "expanding") return ScheduleMode::expanding;
  if (s == "annealing") return ScheduleMode::annealing;
  usage_fail("unknown schedule mode \"", s, "\" (expected expanding or annealing)");
}

struct Sharding {
  std::string criterion;
  Direction direction = Direction::ascending;
  std::vector<std::vector<std::string>> shards;  // shards[0] is shard 1

  std::size_t k() const { return shards.size(); }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out;
    for (const auto& s : shards) out.push_back(s.size());
    return out;
  }

  bool operator==(const Sharding&) const = default;
};

// Sorts by (value, id) (value negated for descending) and cuts the order into
// K contiguous blocks; the first N mod K blocks take one extra sample.
inline Sharding make_shards(const std::vector<ScoredSample>& scores, std::size_t k,
                            Direction direction) {
  if (k < 1) fail("shard count must be at least 1");
  if (k > scores.size()) fail("cannot cut ", scores.size(), " samples into ", k, " shards");
  std::unordered_set<std::string_view> seen;
  for (const auto& s : scores) {
    if (!std::isfinite(s.value)) fail("criterion value for \"", s.id, "\" is not finite");
    if (!seen.insert(s.id).second) fail("duplicate id \"", s.id, "\" in scores");
  }

  std::vector<const ScoredSample*> order;
  order.reserve(scores.size());
  for (const auto& s : scores) order.push_back(&s);
  const double sign = direction == Direction::ascending ? 1.0 : -1.0;
  std::sort(order.begin(), order.end(), [sign](const ScoredSample* a, const ScoredSample* b) {
    const double va = sign * a->value;
    const double vb = sign * b->value;
    if (va != vb) return va < vb;
    return a->id < b->id;
  });

  Sharding out;
  out.criterion = scores.empty() ? "" : std::string(to_string(scores.front().criterion));
  out.direction = direction;
  out.shards.resize(k);
  const std::size_t n = order.size();
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    auto& shard = out.shards[i];
    shard.reserve(len);
    for (std::size_t j = 0; j < len; ++j) shard.push_back(order[pos + j]->id);
    pos += len;
  }
  return out;
}

struct Schedule {
  ScheduleMode mode = ScheduleMode::expanding;
  std::vector<std::vector<std::size_t>> phases;  // 1-based shard indices

  std::size_t k() const { return phases.size(); }

  bool operator==(const Schedule&) const = default;
};

inline Schedule make_schedule(std::size_t k, ScheduleMode mode) {
  if (k < 1) fail("shard count must be at least 1");
  Schedule s{mode, {}};
  s.phases.reserve(k);
  for (std::size_t p = 1; p <= k; ++p) {
    std::vector<std::size_t> active;
    const std::size_t first = mode == ScheduleMode::expanding ? 1 : p;
    const std::size_t last = mode == ScheduleMode::expanding ? p : k;
    for (std::size_t i = first; i <= last; ++i) active.push_back(i);
    s.phases.push_back(std::move(active));
  }
  return s;
}

struct PhaseManifest {
  std::size_t phase = 0;  // 1-based
  std::uint64_t seed = 0;
  std::string mode;
  std::string criterion;
  std::size_t k = 0;
  std::vector<std::size_t> active_shards;
  std::vector<std::size_t> shard_sizes;
  std::vector<std::string> order;

  bool operator==(const PhaseManifest&) const = default;
};

// The shuffle stream for phase p starts from seed + p * 0x9E3779B97F4A7C15.
inline std::uint64_t phase_stream_seed(std::uint64_t seed, std::size_t phase) {
  return seed + static_cast<std::uint64_t>(phase) * 0x9E3779B97F4A7C15ULL;
}

inline PhaseManifest sample_phase(const Sharding& sharding, const Schedule& schedule,
                                  std::size_t phase, std::uint64_t seed) {
  if (schedule.k() != sharding.k()) {
    fail("schedule has ", schedule.k(), " phases but the sharding has ", sharding.k(), " shards");
  }
  if (phase < 1 || phase > schedule.k()) {
    fail("phase ", phase, " is out of range 1..", schedule.k());
  }
  PhaseManifest m;
  m.phase = phase;
  m.seed = seed;
  m.mode = std::string(to_string(schedule.mode));
  m.criterion = sharding.criterion;
  m.k = sharding.k();
  m.active_shards = schedule.phases[phase - 1];
  m.shard_sizes = sharding.sizes();
  for (std::size_t shard : m.active_shards) {
    const auto& ids = sharding.shards.at(shard - 1);
    m.order.insert(m.order.end(), ids.begin(), ids.end());
  }
  SplitMix64 rng(phase_stream_seed(seed, phase));
  shuffle(m.order, rng);
  return m;
}

// Header record first, then one {"id"} per line.
inline std::string render_manifest(const PhaseManifest& m) {
  Json header;
  header["phase"] = m.phase;
  header["seed"] = m.seed;
  header["mode"] = m.mode;
  header["criterion"] = m.criterion;
  header["K"] = m.k;
  header["active_shards"] = m.active_shards;
  header["count"] = m.order.size();
  header["shard_sizes"] = m.shard_sizes;
  std::string out = header.dump();
  out += '\n';
  for (const auto& id : m.order) {
    out += Json{{"id", id}}.dump();
    out += '\n';
  }
  return out;
}

inline PhaseManifest read_manifest(const std::filesystem::path& path) {
  PhaseManifest m;
  bool have_header = false;
  std::size_t count = 0;
  for_each_json_line(path, [&](const Json& r, std::size_t line_no) {
    const auto where = detail::concat(path.string(), ": line ", line_no);
    if (!have_header) {
      m.phase = required_field<std::size_t>(r, "phase", where);
      m.seed = required_field<std::uint64_t>(r, "seed", where);
      m.mode = required_field<std::string>(r, "mode", where);
      m.criterion = required_field<std::string>(r, "criterion", where);
      m.k = required_field<std::size_t>(r, "K", where);
      m.active_shards = required_field<std::vector<std::size_t>>(r, "active_shards", where);
      count = required_field<std::size_t>(r, "count", where);
      if (r.contains("shard_sizes")) {
        m.shard_sizes = required_field<std::vector<std::size_t>>(r, "shard_sizes", where);
      }
      have_header = true;
      return;
    }
    m.order.push_back(required_field<std::string>(r, "id", where));
  });
  if (!have_header) fail(path.string(), ": missing manifest header");
  if (count != m.order.size()) {
    fail(path.string(), ": header count ", count, " but ", m.order.size(), " ids listed");
  }
  return m;
}

inline std::filesystem::path manifest_path(const std::filesystem::path& out_dir, std::size_t phase) {
  return out_dir / ("phase-" + std::to_string(phase) + ".jsonl");
}

// Writes phase-1.jsonl .. phase-K.jsonl. Phases are independent, so up to
// `jobs` of them are rendered and written concurrently.
inline std::vector<std::filesystem::path> emit_manifests(const Sharding& sharding,
                                                         const Schedule& schedule,
                                                         std::uint64_t seed,
                                                         const std::filesystem::path& out_dir,
                                                         std::size_t jobs = 1) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail("cannot create ", out_dir.string(), ": ", ec.message());

  auto write_phase = [&](std::size_t phase) {
    const auto path = manifest_path(out_dir, phase);
    const std::string body = render_manifest(sample_phase(sharding, schedule, phase, seed));
    auto out = open_output(path);
    out << body;
    out.close();
    if (!out) fail("write failed: ", path.string());
    return path;
  };

  std::vector<std::filesystem::path> paths(schedule.k());
  jobs = std::max<std::size_t>(1, jobs);
  for (std::size_t start = 1; start <= schedule.k(); start += jobs) {
    std::vector<std::future<std::filesystem::path>> batch;
    const std::size_t stop = std::min(schedule.k(), start + jobs - 1);
    for (std::size_t p = start; p <= stop; ++p) {
      batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                 write_phase, p));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) paths[start - 1 + i] = batch[i].get();
  }
  return paths;
}

inline Json to_json(const Sharding& s) {
  Json j;
  j["criterion"] = s.criterion;
  j["direction"] = to_string(s.direction);
  j["K"] = s.k();
  j["sizes"] = s.sizes();
  j["shards"] = s.shards;
  return j;
}

inline Sharding sharding_from_json(const Json& j, const std::string& where) {
  Sharding s;
  s.criterion = required_field<std::string>(j, "criterion", where);
  s.direction = parse_direction(required_field<std::string>(j, "direction", where));
  s.shards = required_field<std::vector<std::vector<std::string>>>(j, "shards", where);
  if (s.k() != required_field<std::size_t>(j, "K", where)) {
    fail(where, ": K does not match the number of shards");
  }
  if (s.k() < 1) fail(where, ": no shards");
  return s;
}

inline Json to_json(const Schedule& s) {
  Json j;
  j["mode"] = to_string(s.mode);
  j["K"] = s.k();
  j["phases"] = s.phases;
  return j;
}

inline Schedule schedule_from_json(const Json& j, const std::string& where) {
  Schedule s;
  s.mode = parse_schedule_mode(required_field<std::string>(j, "mode", where));
  s.phases = required_field<std::vector<std::vector<std::size_t>>>(j, "phases", where);
  if (s != make_schedule(s.k(), s.mode)) fail(where, ": phases do not form a ", to_string(s.mode), " schedule");
  return s;
}

}  // namespace xcurric
