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

// Loss truncation: drop training examples whose loss exceeds a running
// quantile of recent losses. The quantile is exact over a ring buffer of the
// last `window` observations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"

namespace xcurric {

struct TruncConfig {
  double drop_frac = 0.3;
  std::size_t window = 4096;
  std::size_t warmup = 500;

  void validate() const {
    if (!(drop_frac >= 0.0 && drop_frac < 1.0)) fail("drop fraction must be in [0, 1)");
    if (window < 1) fail("window capacity must be at least 1");
  }
};

class LossTruncator {
 public:
  explicit LossTruncator(TruncConfig config = {}) : config_(config) { config_.validate(); }

  void observe(double loss) {
    if (!std::isfinite(loss) || loss < 0.0) fail("loss must be finite and non-negative, got ", loss);
    window_.push_back(loss);
    if (window_.size() > config_.window) window_.pop_front();
    ++steps_seen_;
  }

  // Nearest-rank (1 - drop_frac) quantile: the ceil(q * m)-th smallest of the
  // m buffered losses.
  double threshold() const {
    if (window_.empty()) fail("loss window is empty");
    const double q = 1.0 - config_.drop_frac;
    const auto m = window_.size();
    // The small slack keeps products such as 0.8 * 10 on the intended rank.
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(m) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, m);
    std::vector<double> values(window_.begin(), window_.end());
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
  }

  bool should_drop(double loss) const {
    if (window_.empty()) fail("loss window is empty");
    if (steps_seen_ <= config_.warmup || config_.drop_frac == 0.0) return false;
    return loss > threshold();
  }

  const TruncConfig& config() const { return config_; }
  const std::deque<double>& window() const { return window_; }
  std::size_t steps_seen() const { return steps_seen_; }

 private:
  TruncConfig config_;
  std::deque<double> window_;
  std::size_t steps_seen_ = 0;
};

struct LossRecord {
  std::string id;
  double loss = 0.0;
};

struct TruncDecision {
  std::string id;
  double loss = 0.0;
  bool dropped = false;
};

// Decide, then observe, so no example shifts its own threshold. The first
// example is always kept.
inline std::vector<TruncDecision> truncate_stream(const std::vector<LossRecord>& losses,
                                                  const TruncConfig& config = {}) {
  LossTruncator state(config);
  std::vector<TruncDecision> out;
  out.reserve(losses.size());
  for (const auto& r : losses) {
    const bool drop = state.steps_seen() > 0 && state.should_drop(r.loss);
    state.observe(r.loss);
    out.push_back({r.id, r.loss, drop});
  }
  return out;
}

// JSONL {"id", "loss"} in, {"id", "loss", "dropped"} out, streaming.
inline std::size_t truncate_stream(std::istream& in, std::ostream& out, const std::string& source,
                                   const TruncConfig& config = {}) {
  LossTruncator state(config);
  std::size_t dropped = 0;
  for_each_json_line(in, source, [&](const Json& r, std::size_t line_no) {
    const auto where = detail::concat(source, ": line ", line_no);
    const auto id = required_field<std::string>(r, "id", where);
    const auto loss = required_field<double>(r, "loss", where);
    if (!std::isfinite(loss) || loss < 0.0) fail(where, ": loss must be finite and non-negative");
    const bool drop = state.steps_seen() > 0 && state.should_drop(loss);
    state.observe(loss);
    dropped += drop ? 1 : 0;
    Json d;
    d["id"] = id;
    d["loss"] = loss;
    d["dropped"] = drop;
    out << d.dump() << '\n';
  });
  return dropped;
}

}  // namespace xcurric
