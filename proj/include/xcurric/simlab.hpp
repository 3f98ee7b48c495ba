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

// A desk-scale curriculum experiment.
//
// Training samples carry an observable quality q ~ U[0, 1]; each label is
// replaced by a uniformly chosen wrong class with probability
// clamp(2 * noise_rate * (1 - q), 0, 1), whose expectation over q is
// noise_rate. Samples are sharded on quality and a multinomial logistic
// regression takes one SGD step per presented sample, in the order given by the
// scheduler's phase manifests. The test set is clean.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <iomanip>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xcurric/criteria.hpp"
#include "xcurric/error.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/loss_trunc.hpp"
#include "xcurric/random.hpp"
#include "xcurric/scheduler.hpp"

namespace xcurric {

enum class TrainingMode { baseline, expanding, annealing, loss_truncation };

inline std::string_view to_string(TrainingMode m) {
  switch (m) {
    case TrainingMode::baseline: return "baseline";
    case TrainingMode::expanding: return "expanding";
    case TrainingMode::annealing: return "annealing";
    case TrainingMode::loss_truncation: return "loss-truncation";
  }
  return "?";
}

inline TrainingMode parse_training_mode(std::string_view s) {
  if (s == "baseline" || s == "baseline-uniform" || s == "uniform") return TrainingMode::baseline;
  if (s == "expanding") return TrainingMode::expanding;
  if (s == "annealing") return TrainingMode::annealing;
  if (s == "loss-truncation" || s == "loss_truncation" || s == "lt") return TrainingMode::loss_truncation;
  usage_fail("unknown training mode \"", s, "\"");
}

struct ExperimentConfig {
  std::size_t n_train = 8000;
  std::size_t n_test = 2000;
  std::size_t dim = 8;
  std::size_t classes = 4;
  double noise_rate = 0.3;
  // Class means sit at pairwise distance 1; this is the per-feature std.
  double feature_std = 0.4;
  std::size_t shards = kDefaultShards;
  std::vector<TrainingMode> modes = {TrainingMode::baseline, TrainingMode::expanding,
                                     TrainingMode::annealing};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double step_size = 0.1;
  std::size_t epochs_per_phase = 1;
  TruncConfig truncation{0.3, 1024, 200};
  std::size_t jobs = 1;

  void validate() const {
    if (n_train < 1 || n_test < 1) fail("train and test sizes must be positive");
    if (classes < 2) fail("need at least 2 classes");
    if (dim < classes) fail("feature dimension must be at least the number of classes");
    if (!(noise_rate >= 0.0 && noise_rate < 1.0)) fail("noise rate must be in [0, 1)");
    if (!(feature_std > 0.0)) fail("feature std must be positive");
    if (shards < 1 || shards > n_train) fail("shard count must be in 1..n_train");
    if (!(step_size > 0.0)) fail("step size must be positive");
    if (modes.empty()) fail("no training modes");
    if (seeds.empty()) fail("no seeds");
    truncation.validate();
  }

  Json to_json() const {
    Json j;
    j["n_train"] = n_train;
    j["n_test"] = n_test;
    j["dim"] = dim;
    j["classes"] = classes;
    j["noise_rate"] = noise_rate;
    j["feature_std"] = feature_std;
    j["shards"] = shards;
    j["modes"] = Json::array();
    for (auto m : modes) j["modes"].push_back(to_string(m));
    j["seeds"] = seeds;
    j["step_size"] = step_size;
    j["epochs_per_phase"] = epochs_per_phase;
    j["truncation"] = {{"drop_frac", truncation.drop_frac},
                       {"window", truncation.window},
                       {"warmup", truncation.warmup}};
    return j;
  }
};

struct SynthSample {
  std::vector<double> features;
  std::size_t label = 0;        // observed, possibly corrupted
  std::size_t clean_label = 0;
  double quality = 1.0;
  bool corrupted = false;       // hidden ground truth, for reporting only
};

struct SynthDataset {
  std::vector<SynthSample> train;
  std::vector<SynthSample> test;

  double corrupted_fraction() const {
    if (train.empty()) return 0.0;
    const auto n = std::count_if(train.begin(), train.end(), [](const SynthSample& s) { return s.corrupted; });
    return static_cast<double>(n) / static_cast<double>(train.size());
  }
};

inline double corruption_probability(double noise_rate, double quality) {
  return std::clamp(2.0 * noise_rate * (1.0 - quality), 0.0, 1.0);
}

namespace detail {

inline SynthSample draw_sample(const ExperimentConfig& cfg, SplitMix64& rng, bool noisy) {
  SynthSample s;
  s.clean_label = static_cast<std::size_t>(rng.below(cfg.classes));
  s.features.resize(cfg.dim);
  const double mean = 1.0 / std::sqrt(2.0);  // e_c / sqrt(2): unit pairwise distance
  for (std::size_t d = 0; d < cfg.dim; ++d) {
    s.features[d] = (d == s.clean_label ? mean : 0.0) + cfg.feature_std * rng.normal();
  }
  s.label = s.clean_label;
  if (noisy) {
    s.quality = rng.uniform();
    const double u = rng.uniform();
    const auto offset = static_cast<std::size_t>(rng.below(cfg.classes - 1)) + 1;
    if (u < corruption_probability(cfg.noise_rate, s.quality)) {
      s.corrupted = true;
      s.label = (s.clean_label + offset) % cfg.classes;
    }
  }
  return s;
}

}  // namespace detail

inline SynthDataset gen_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SynthDataset data;
  SplitMix64 train_rng(derive_seed(seed, "simlab/train"));
  SplitMix64 test_rng(derive_seed(seed, "simlab/test"));
  data.train.reserve(cfg.n_train);
  for (std::size_t i = 0; i < cfg.n_train; ++i) data.train.push_back(detail::draw_sample(cfg, train_rng, true));
  data.test.reserve(cfg.n_test);
  for (std::size_t i = 0; i < cfg.n_test; ++i) data.test.push_back(detail::draw_sample(cfg, test_rng, false));
  return data;
}

// Multinomial logistic regression with a bias per class, zero-initialised.
class SoftmaxRegression {
 public:
  SoftmaxRegression(std::size_t classes, std::size_t dim)
      : classes_(classes), dim_(dim), weights_(classes * (dim + 1), 0.0) {}

  std::size_t classes() const { return classes_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& weights() const { return weights_; }

  std::vector<double> probabilities(std::span<const double> x) const {
    std::vector<double> z(classes_);
    for (std::size_t c = 0; c < classes_; ++c) {
      const double* w = &weights_[c * (dim_ + 1)];
      double acc = w[dim_];
      for (std::size_t d = 0; d < dim_; ++d) acc += w[d] * x[d];
      z[c] = acc;
    }
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
      v = std::exp(v - top);
      sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
  }

  double loss(std::span<const double> x, std::size_t label) const {
    return -std::log(std::max(probabilities(x)[label], 1e-300));
  }

  // One SGD step on the cross-entropy of (x, label).
  void step(std::span<const double> x, std::size_t label, double step_size) {
    auto p = probabilities(x);
    p[label] -= 1.0;
    for (std::size_t c = 0; c < classes_; ++c) {
      double* w = &weights_[c * (dim_ + 1)];
      const double g = step_size * p[c];
      for (std::size_t d = 0; d < dim_; ++d) w[d] -= g * x[d];
      w[dim_] -= g;
    }
  }

  // Ties go to the lowest class index, so an untrained model predicts class 0.
  std::size_t predict(std::span<const double> x) const {
    const auto p = probabilities(x);
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  }

  double accuracy(std::span<const SynthSample> samples) const {
    if (samples.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& s : samples) hits += predict(s.features) == s.clean_label ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(samples.size());
  }

 private:
  std::size_t classes_;
  std::size_t dim_;
  std::vector<double> weights_;
};

// One gradient step per entry of `order` (indices into `train`).
inline void train_learner(SoftmaxRegression& model, std::span<const SynthSample> train,
                          std::span<const std::size_t> order, double step_size) {
  if (order.empty()) fail("empty training order");
  for (std::size_t i : order) model.step(train[i].features, train[i].label, step_size);
}

struct RunResult {
  TrainingMode mode = TrainingMode::baseline;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double corrupted_fraction = 0.0;
  std::size_t steps = 0;
  std::size_t dropped = 0;
  std::size_t final_phase_size = 0;
  double final_phase_min_quality = 0.0;
  double final_phase_corrupted_fraction = 0.0;
  std::vector<double> weights;

  Json to_json() const {
    Json j;
    j["mode"] = to_string(mode);
    j["seed"] = seed;
    j["accuracy"] = accuracy;
    j["corrupted_fraction"] = corrupted_fraction;
    j["steps"] = steps;
    j["dropped"] = dropped;
    j["final_phase_size"] = final_phase_size;
    j["final_phase_min_quality"] = final_phase_min_quality;
    j["final_phase_corrupted_fraction"] = final_phase_corrupted_fraction;
    return j;
  }
};

inline std::string synth_id(std::size_t i) { return "s" + std::to_string(i); }

// Quality scores for the training set, as the scheduler consumes them.
inline std::vector<ScoredSample> quality_scores(std::span<const SynthSample> train) {
  std::vector<ScoredSample> out;
  out.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    out.push_back({synth_id(i), Criterion::alignment, train[i].quality});
  }
  return out;
}

inline RunResult run_single(const ExperimentConfig& cfg, TrainingMode mode, std::uint64_t seed) {
  const SynthDataset data = gen_dataset(cfg, seed);
  const Sharding sharding = make_shards(quality_scores(data.train), cfg.shards, Direction::ascending);
  const bool curriculum = mode == TrainingMode::expanding || mode == TrainingMode::annealing;
  const Schedule schedule = make_schedule(
      cfg.shards, mode == TrainingMode::expanding ? ScheduleMode::expanding : ScheduleMode::annealing);

  std::unordered_map<std::string, std::size_t> index;
  index.reserve(data.train.size());
  for (std::size_t i = 0; i < data.train.size(); ++i) index.emplace(synth_id(i), i);

  SoftmaxRegression model(cfg.classes, cfg.dim);
  LossTruncator truncator(cfg.truncation);
  RunResult result;
  result.mode = mode;
  result.seed = seed;
  result.corrupted_fraction = data.corrupted_fraction();

  std::vector<std::size_t> order;
  for (std::size_t phase = 1; phase <= cfg.shards; ++phase) {
    for (std::size_t epoch = 0; epoch < cfg.epochs_per_phase; ++epoch) {
      const auto epoch_seed = derive_seed(seed, "simlab/epoch-" + std::to_string(epoch));
      // Uniform modes see every shard in every phase, reshuffled per phase.
      const PhaseManifest manifest =
          curriculum ? sample_phase(sharding, schedule, phase, epoch_seed)
                     : sample_phase(sharding, make_schedule(cfg.shards, ScheduleMode::annealing), 1,
                                    derive_seed(epoch_seed, "phase-" + std::to_string(phase)));
      order.clear();
      for (const auto& id : manifest.order) order.push_back(index.at(id));

      if (mode == TrainingMode::loss_truncation) {
        for (std::size_t i : order) {
          const auto& s = data.train[i];
          const double loss = model.loss(s.features, s.label);
          const bool drop = truncator.steps_seen() > 0 && truncator.should_drop(loss);
          truncator.observe(loss);
          if (drop) {
            ++result.dropped;
            continue;
          }
          model.step(s.features, s.label, cfg.step_size);
          ++result.steps;
        }
      } else if (!order.empty()) {
        train_learner(model, data.train, order, cfg.step_size);
        result.steps += order.size();
      }

      if (phase == cfg.shards && epoch + 1 == cfg.epochs_per_phase) {
        result.final_phase_size = order.size();
        double min_q = 1.0;
        std::size_t corrupted = 0;
        for (std::size_t i : order) {
          min_q = std::min(min_q, data.train[i].quality);
          corrupted += data.train[i].corrupted ? 1 : 0;
        }
        result.final_phase_min_quality = min_q;
        result.final_phase_corrupted_fraction =
            order.empty() ? 0.0 : static_cast<double>(corrupted) / static_cast<double>(order.size());
      }
    }
  }
  result.accuracy = model.accuracy(data.test);
  result.weights = model.weights();
  return result;
}

struct ModeSummary {
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double min = 0.0;
  double max = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RunResult> runs;
  std::map<std::string, ModeSummary> summary;
  std::map<std::string, double> deltas;  // "a-b" -> mean(a) - mean(b)

  double mean(TrainingMode m) const {
    auto it = summary.find(std::string(to_string(m)));
    if (it == summary.end()) fail("mode ", to_string(m), " was not run");
    return it->second.mean;
  }

  Json to_json() const {
    Json j;
    j["config"] = config.to_json();
    j["runs"] = Json::array();
    for (const auto& r : runs) j["runs"].push_back(r.to_json());
    Json s = Json::object();
    for (const auto& [mode, m] : summary) {
      s[mode] = {{"runs", m.runs}, {"mean", m.mean}, {"stddev", m.stddev}, {"min", m.min}, {"max", m.max}};
    }
    j["summary"] = std::move(s);
    Json d = Json::object();
    for (const auto& [k, v] : deltas) d[k] = v;
    j["deltas"] = std::move(d);
    return j;
  }

  std::string summary_table() const {
    std::ostringstream out;
    out << std::left << std::setw(18) << "mode" << std::right << std::setw(6) << "runs" << std::setw(10)
        << "mean" << std::setw(10) << "std" << std::setw(10) << "min" << std::setw(10) << "max" << '\n';
    out << std::fixed << std::setprecision(4);
    for (auto mode : config.modes) {
      const auto& m = summary.at(std::string(to_string(mode)));
      out << std::left << std::setw(18) << to_string(mode) << std::right << std::setw(6) << m.runs
          << std::setw(10) << m.mean << std::setw(10) << m.stddev << std::setw(10) << m.min << std::setw(10)
          << m.max << '\n';
    }
    for (const auto& [k, v] : deltas) out << "delta " << k << ": " << std::showpos << v << std::noshowpos << '\n';
    return out.str();
  }
};

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;

  struct Task {
    TrainingMode mode;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (auto mode : cfg.modes) {
    for (auto seed : cfg.seeds) tasks.push_back({mode, seed});
  }
  report.runs.resize(tasks.size());
  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) report.runs[i] = run_single(cfg, tasks[i].mode, tasks[i].seed);
  } else {
    for (std::size_t start = 0; start < tasks.size(); start += jobs) {
      std::vector<std::future<RunResult>> batch;
      for (std::size_t i = start; i < std::min(tasks.size(), start + jobs); ++i) {
        batch.push_back(std::async(std::launch::async, run_single, std::cref(cfg), tasks[i].mode, tasks[i].seed));
      }
      for (std::size_t i = 0; i < batch.size(); ++i) report.runs[start + i] = batch[i].get();
    }
  }

  for (auto mode : cfg.modes) {
    std::vector<double> acc;
    for (const auto& r : report.runs) {
      if (r.mode == mode) acc.push_back(r.accuracy);
    }
    ModeSummary m;
    m.runs = acc.size();
    m.mean = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
    double ss = 0.0;
    for (double a : acc) ss += (a - m.mean) * (a - m.mean);
    m.stddev = acc.size() > 1 ? std::sqrt(ss / static_cast<double>(acc.size() - 1)) : 0.0;
    m.min = *std::min_element(acc.begin(), acc.end());
    m.max = *std::max_element(acc.begin(), acc.end());
    report.summary[std::string(to_string(mode))] = m;
  }
  for (std::size_t i = 0; i < cfg.modes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto a = cfg.modes[i];
      const auto b = cfg.modes[j];
      report.deltas[std::string(to_string(a)) + "-" + std::string(to_string(b))] = report.mean(a) - report.mean(b);
    }
  }
  return report;
}

}  // namespace xcurric
