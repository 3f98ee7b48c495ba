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

// The `xcurric` command line. Exit status: 0 success, 1 domain error,
// 2 usage error.
//
// Every subcommand accepts --config FILE with `key = value` lines; keys are
// long option names. Flags given on the command line win over the file, and
// the file wins over built-in defaults.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xcurric/corpus.hpp"
#include "xcurric/criteria.hpp"
#include "xcurric/error.hpp"
#include "xcurric/http_backends.hpp"
#include "xcurric/judge.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/loss_trunc.hpp"
#include "xcurric/metrics.hpp"
#include "xcurric/pipeline.hpp"
#include "xcurric/rtt_filter.hpp"
#include "xcurric/scheduler.hpp"
#include "xcurric/simlab.hpp"

namespace xcurric::cli {

enum ExitCode : int { kSuccess = 0, kDomainError = 1, kUsageError = 2 };

// Reads `key = value` lines. Blank lines, `#`/`;` comments and `[section]`
// headers are ignored.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto s = trim(line);
    if (s.empty() || s.front() == '#' || s.front() == ';' || s.front() == '[') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) usage_fail(path.string(), ": line ", line_no, ": expected key = value");
    std::string key(trim(s.substr(0, eq)));
    std::string value(trim(s.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.starts_with("--")) key = key.substr(2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) usage_fail(path.string(), ": line ", line_no, ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

// Splices `--config FILE` into explicit flags for every key the command line
// does not already set.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) usage_fail("--config needs a file argument");
      config_path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config_path) return rest;

  auto given = [&rest](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(rest.begin(), rest.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
  };
  for (const auto& [key, value] : read_config_file(*config_path)) {
    if (given(key)) continue;
    if (value == "true") {
      rest.push_back("--" + key);
    } else if (value != "false") {
      rest.push_back("--" + key);
      rest.push_back(value);
    }
  }
  return rest;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline void print_resolved(std::ostream& err, std::string_view subcommand, Json resolved) {
  Json j;
  j["subcommand"] = subcommand;
  j["config"] = std::move(resolved);
  err << "resolved config: " << j.dump() << '\n';
}

inline HttpOptions http_options(const std::string& url, double timeout_s, std::size_t retries) {
  HttpOptions opt;
  opt.base_url = url;
  opt.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0));
  opt.retries = retries;
  return opt;
}

inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curriculum data pipeline for noisy data-to-text corpora", "xcurric"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.footer(
      "Subcommands: score, shard, schedule, sample, filter-rtt, truncate, eval, judge, simulate, pipeline.\n"
      "Every subcommand accepts --config FILE (key = value lines); command-line flags take precedence.");

  // Declared options per subcommand; --config is consumed before parsing but
  // still listed in help.
  auto add_config_flag = [](CLI::App* sub) {
    sub->add_option("--config", "Read option values from a key = value file");
  };

  std::function<void()> action;

  // score
  std::string score_input, score_output, score_format = "auto", score_criterion = "length", score_side = "text";
  std::string score_alignment_file, score_model_out;
  bool score_joint = false, score_no_smoothing = false;
  auto* score = app.add_subcommand("score", "Score samples by length, rarity or alignment");
  score->add_option("--input", score_input, "Sample JSONL")->required();
  score->add_option("--output", score_output, "Scores JSONL to write")->required();
  score->add_option("--format", score_format, "facts, table or auto")->capture_default_str();
  score->add_option("--criterion", score_criterion, "length, rarity or alignment")->capture_default_str();
  score->add_option("--side", score_side, "text or input")->capture_default_str();
  score->add_option("--alignment-file", score_alignment_file, "External alignment scores {id, score}");
  score->add_flag("--joint-model", score_joint, "One unigram model for all languages");
  score->add_flag("--no-smoothing", score_no_smoothing, "Disable add-one smoothing");
  score->add_option("--model-out", score_model_out, "Directory for the unigram model(s) (rarity only)");
  add_config_flag(score);
  score->callback([&] {
    action = [&] {
      ScoreOptions opt;
      opt.side = parse_side(score_side);
      opt.joint_model = score_joint;
      opt.smoothing = !score_no_smoothing;
      if (!score_alignment_file.empty()) opt.alignment_file = score_alignment_file;
      const auto criterion = parse_criterion(score_criterion);
      const auto format = parse_input_format(score_format);
      print_resolved(err, "score",
                     {{"input", score_input}, {"output", score_output}, {"format", score_format},
                      {"criterion", score_criterion}, {"side", score_side}, {"joint_model", score_joint},
                      {"smoothing", opt.smoothing}, {"alignment_file", score_alignment_file}});
      const auto samples = load_samples(score_input, format);
      const auto scores = score_samples(samples, criterion, opt);
      write_scores(score_output, scores);
      if (!score_model_out.empty() && criterion == Criterion::rarity) {
        std::map<std::string, UnigramModel> models;
        if (opt.joint_model) {
          models.emplace("all", build_unigram(samples, opt.side, opt.smoothing));
        } else {
          for (const auto& s : samples) {
            if (!models.contains(s.lang)) {
              models.emplace(s.lang, build_unigram(samples, opt.side, opt.smoothing, s.lang));
            }
          }
        }
        for (const auto& [lang, model] : models) {
          auto f = open_output(std::filesystem::path(score_model_out) / ("unigram-" + lang + ".jsonl"));
          model.save(f);
        }
      }
      out << "scored " << scores.size() << " samples by " << score_criterion << '\n';
    };
  });

  // shard
  std::string shard_scores, shard_output, shard_direction = "ascending";
  std::size_t shard_k = kDefaultShards;
  auto* shard = app.add_subcommand("shard", "Cut scored samples into K criterion-ordered shards");
  shard->add_option("--scores", shard_scores, "Scores JSONL")->required();
  shard->add_option("--output", shard_output, "Sharding JSON to write")->required();
  shard->add_option("--shards", shard_k, "Number of shards K")->capture_default_str();
  shard->add_option("--direction", shard_direction, "ascending or descending")->capture_default_str();
  add_config_flag(shard);
  shard->callback([&] {
    action = [&] {
      const auto direction = parse_direction(shard_direction);
      print_resolved(err, "shard",
                     {{"scores", shard_scores}, {"output", shard_output}, {"shards", shard_k},
                      {"direction", shard_direction}});
      const auto sharding = make_shards(read_scores(shard_scores), shard_k, direction);
      write_json_file(shard_output, to_json(sharding));
      out << "wrote " << sharding.k() << " shards\n";
    };
  });

  // schedule
  std::string schedule_output, schedule_mode = "annealing", schedule_sharding;
  std::size_t schedule_k = kDefaultShards;
  auto* schedule = app.add_subcommand("schedule", "Generate an expanding or annealing phase schedule");
  schedule->add_option("--output", schedule_output, "Schedule JSON to write")->required();
  schedule->add_option("--mode", schedule_mode, "expanding or annealing")->capture_default_str();
  auto* schedule_k_opt = schedule->add_option("--shards", schedule_k, "Number of shards K")->capture_default_str();
  schedule->add_option("--sharding", schedule_sharding, "Take K from this sharding file")->excludes(schedule_k_opt);
  add_config_flag(schedule);
  schedule->callback([&] {
    action = [&] {
      const auto mode = parse_schedule_mode(schedule_mode);
      std::size_t k = schedule_k;
      if (!schedule_sharding.empty()) k = sharding_from_json(read_json_file(schedule_sharding), schedule_sharding).k();
      print_resolved(err, "schedule", {{"output", schedule_output}, {"mode", schedule_mode}, {"shards", k}});
      const auto s = make_schedule(k, mode);
      write_json_file(schedule_output, to_json(s));
      out << "wrote " << to_string(mode) << " schedule with " << s.k() << " phases\n";
    };
  });

  // sample
  std::string sample_sharding, sample_schedule, sample_mode = "annealing", sample_out_dir;
  std::uint64_t sample_seed = 0;
  std::size_t sample_phase_only = 0, sample_jobs = 1;
  auto* sample = app.add_subcommand("sample", "Emit seeded per-phase sampling manifests");
  sample->add_option("--sharding", sample_sharding, "Sharding JSON")->required();
  sample->add_option("--out-dir", sample_out_dir, "Directory for phase-<p>.jsonl")->required();
  auto* sample_mode_opt = sample->add_option("--mode", sample_mode, "expanding or annealing")->capture_default_str();
  sample->add_option("--schedule", sample_schedule, "Schedule JSON (instead of --mode)")->excludes(sample_mode_opt);
  sample->add_option("--seed", sample_seed, "Base seed")->capture_default_str();
  sample->add_option("--phase", sample_phase_only, "Emit only this phase (1-based)");
  sample->add_option("--jobs", sample_jobs, "Phases written concurrently")->capture_default_str();
  add_config_flag(sample);
  sample->callback([&] {
    action = [&] {
      const auto sharding = sharding_from_json(read_json_file(sample_sharding), sample_sharding);
      const auto sched = sample_schedule.empty() ? make_schedule(sharding.k(), parse_schedule_mode(sample_mode))
                                                 : schedule_from_json(read_json_file(sample_schedule), sample_schedule);
      const auto seed = derive_seed(sample_seed, kSampleStage);
      print_resolved(err, "sample",
                     {{"sharding", sample_sharding}, {"out_dir", sample_out_dir}, {"mode", to_string(sched.mode)},
                      {"seed", sample_seed}, {"manifest_seed", seed}, {"phase", sample_phase_only},
                      {"jobs", sample_jobs}});
      if (sample_phase_only > 0) {
        const auto m = sample_phase(sharding, sched, sample_phase_only, seed);
        std::filesystem::create_directories(sample_out_dir);
        auto f = open_output(manifest_path(sample_out_dir, sample_phase_only));
        f << render_manifest(m);
        out << "wrote phase " << sample_phase_only << " (" << m.order.size() << " ids)\n";
      } else {
        const auto paths = emit_manifests(sharding, sched, seed, sample_out_dir, sample_jobs);
        out << "wrote " << paths.size() << " manifests to " << sample_out_dir << '\n';
      }
    };
  });

  // filter-rtt
  std::string rtt_input, rtt_format = "auto", rtt_lang, rtt_translator = "identity", rtt_tsv,
                         rtt_url = "http://127.0.0.1:8080", rtt_output, rtt_report;
  double rtt_r1 = 0.70, rtt_r2 = 0.35, rtt_timeout = 30.0;
  std::size_t rtt_retries = 3, rtt_batch = 32, rtt_jobs = 1;
  auto* rtt = app.add_subcommand("filter-rtt", "Build a target-language corpus by round-trip translation filtering");
  rtt->add_option("--input", rtt_input, "English sample JSONL")->required();
  rtt->add_option("--lang", rtt_lang, "Target language code")->required();
  rtt->add_option("--output", rtt_output, "Kept sample JSONL to write")->required();
  rtt->add_option("--format", rtt_format, "facts, table or auto")->capture_default_str();
  rtt->add_option("--translator", rtt_translator, "identity, tsv or http")->capture_default_str();
  rtt->add_option("--tsv", rtt_tsv, "TSV lookup file (id, direction, text, translation)");
  rtt->add_option("--url", rtt_url, "Translation service base URL")->capture_default_str();
  rtt->add_option("--timeout", rtt_timeout, "HTTP timeout in seconds")->capture_default_str();
  rtt->add_option("--retries", rtt_retries, "HTTP retries")->capture_default_str();
  rtt->add_option("--batch-size", rtt_batch, "Texts per translation request")->capture_default_str();
  rtt->add_option("--jobs", rtt_jobs, "Batches in flight")->capture_default_str();
  rtt->add_option("--r1", rtt_r1, "ROUGE-1 threshold (strict)")->capture_default_str();
  rtt->add_option("--r2", rtt_r2, "ROUGE-2 threshold (strict)")->capture_default_str();
  rtt->add_option("--report", rtt_report, "Filter report JSON (default: stdout)");
  add_config_flag(rtt);
  rtt->callback([&] {
    action = [&] {
      std::unique_ptr<Translator> translator;
      if (rtt_translator == "identity") {
        translator = std::make_unique<IdentityTranslator>();
      } else if (rtt_translator == "tsv") {
        if (rtt_tsv.empty()) usage_fail("--translator tsv needs --tsv");
        translator = std::make_unique<TsvTranslator>(TsvTranslator::from_file(rtt_tsv));
      } else if (rtt_translator == "http") {
        translator = std::make_unique<HttpTranslator>(http_options(rtt_url, rtt_timeout, rtt_retries));
      } else {
        usage_fail("unknown translator \"", rtt_translator, "\" (expected identity, tsv or http)");
      }
      print_resolved(err, "filter-rtt",
                     {{"input", rtt_input}, {"lang", rtt_lang}, {"output", rtt_output},
                      {"translator", rtt_translator}, {"tsv", rtt_tsv}, {"url", rtt_url}, {"r1", rtt_r1},
                      {"r2", rtt_r2}, {"batch_size", rtt_batch}, {"jobs", rtt_jobs}, {"retries", rtt_retries},
                      {"timeout", rtt_timeout}});
      const auto samples = load_samples(rtt_input, parse_input_format(rtt_format));
      RoundTripOptions rt_opt;
      rt_opt.batch_size = rtt_batch;
      rt_opt.jobs = rtt_jobs;
      RoundTripResult trip;
      if (!samples.empty()) trip = round_trip(samples, *translator, rtt_lang, rt_opt);
      auto filtered = filter_pairs(trip.pairs, FilterConfig{rtt_r1, rtt_r2});
      filtered.report.failed_translations = trip.failed_ids.size();
      for (const auto& w : filtered.report.warnings) err << "warning: " << w << '\n';
      save_samples(filtered.kept, rtt_output);
      if (rtt_report.empty()) {
        out << filtered.report.to_json().dump(2) << '\n';
      } else {
        write_json_file(rtt_report, filtered.report.to_json());
      }
    };
  });

  // truncate
  std::string trunc_input, trunc_output;
  TruncConfig trunc_cfg;
  auto* trunc = app.add_subcommand("truncate", "Loss truncation over a loss stream");
  trunc->add_option("--input", trunc_input, "Loss JSONL {id, loss}")->required();
  trunc->add_option("--output", trunc_output, "Decision JSONL to write")->required();
  trunc->add_option("--drop-frac", trunc_cfg.drop_frac, "Fraction of losses to drop")->capture_default_str();
  trunc->add_option("--window", trunc_cfg.window, "Ring buffer capacity")->capture_default_str();
  trunc->add_option("--warmup", trunc_cfg.warmup, "Steps before any drop")->capture_default_str();
  add_config_flag(trunc);
  trunc->callback([&] {
    action = [&] {
      print_resolved(err, "truncate",
                     {{"input", trunc_input}, {"output", trunc_output}, {"drop_frac", trunc_cfg.drop_frac},
                      {"window", trunc_cfg.window}, {"warmup", trunc_cfg.warmup}});
      auto in = open_input(trunc_input);
      auto o = open_output(trunc_output);
      const auto dropped = truncate_stream(in, o, trunc_input, trunc_cfg);
      out << "dropped " << dropped << " examples\n";
    };
  });

  // eval
  std::string eval_hyp, eval_ref, eval_metrics = "rouge1,rouge2,bleu,chrf++", eval_output;
  double eval_epsilon = 0.1;
  auto* eval = app.add_subcommand("eval", "ROUGE-1/2, BLEU and chrF++ over parallel text files");
  eval->add_option("--hyp", eval_hyp, "Hypotheses, one per line")->required();
  eval->add_option("--ref", eval_ref, "References, one per line")->required();
  eval->add_option("--metrics", eval_metrics, "Comma-separated metrics")->capture_default_str();
  eval->add_option("--epsilon", eval_epsilon, "BLEU zero-match smoothing")->capture_default_str();
  eval->add_option("--output", eval_output, "Report JSON (default: stdout)");
  add_config_flag(eval);
  eval->callback([&] {
    action = [&] {
      print_resolved(err, "eval",
                     {{"hyp", eval_hyp}, {"ref", eval_ref}, {"metrics", eval_metrics}, {"epsilon", eval_epsilon}});
      const auto hyps = read_lines(eval_hyp);
      const auto refs = read_lines(eval_ref);
      if (hyps.size() != refs.size()) fail("eval: ", hyps.size(), " hypotheses but ", refs.size(), " references");
      if (hyps.empty()) fail("eval: empty input");
      std::vector<TokenSeq> ht, rt;
      for (const auto& h : hyps) ht.push_back(tokenize(h));
      for (const auto& r : refs) rt.push_back(tokenize(r));
      Json report = Json::object();
      for (const auto& m : split_list(eval_metrics)) {
        if (m == "rouge1" || m == "rouge2") {
          const std::size_t n = m == "rouge1" ? 1 : 2;
          MetricReport mean;
          mean.name = m;
          for (std::size_t i = 0; i < ht.size(); ++i) {
            const auto r = rouge_n(ht[i], rt[i], n);
            mean.precision += r.precision;
            mean.recall += r.recall;
            mean.f += r.f;
          }
          const auto count = static_cast<double>(ht.size());
          mean.precision /= count;
          mean.recall /= count;
          mean.f /= count;
          mean.details["segments"] = count;
          report[m] = mean.to_json();
        } else if (m == "bleu") {
          BleuOptions opt;
          opt.epsilon = eval_epsilon;
          report[m] = corpus_bleu(ht, rt, opt).to_json();
        } else if (m == "chrf++" || m == "chrf") {
          report["chrf++"] = chrf_pp(hyps, refs).to_json();
        } else {
          usage_fail("unknown metric \"", m, "\"");
        }
      }
      if (eval_output.empty()) {
        out << report.dump(2) << '\n';
      } else {
        write_json_file(eval_output, report);
      }
    };
  });

  // judge
  std::string judge_samples, judge_format = "auto", judge_outputs, judge_backend = "mock", judge_fixtures,
                             judge_url = "http://127.0.0.1:8080", judge_output, judge_template_dir;
  double judge_timeout = 30.0;
  std::size_t judge_retries = 3;
  auto* judge = app.add_subcommand("judge", "LLM-based fluency/faithfulness/coverage evaluation");
  judge->add_option("--samples", judge_samples, "Sample JSONL")->required();
  judge->add_option("--outputs", judge_outputs, "Generated outputs JSONL {id, output}")->required();
  judge->add_option("--format", judge_format, "facts, table or auto")->capture_default_str();
  judge->add_option("--backend", judge_backend, "mock or http")->capture_default_str();
  judge->add_option("--fixtures", judge_fixtures, "Mock responses JSONL {id, response}");
  judge->add_option("--url", judge_url, "Completion service base URL")->capture_default_str();
  judge->add_option("--timeout", judge_timeout, "HTTP timeout in seconds")->capture_default_str();
  judge->add_option("--retries", judge_retries, "HTTP retries")->capture_default_str();
  judge->add_option("--template-dir", judge_template_dir, "Directory with prompt templates");
  judge->add_option("--output", judge_output, "Report JSON (default: stdout)");
  add_config_flag(judge);
  judge->callback([&] {
    action = [&] {
      std::unique_ptr<JudgeBackend> backend;
      if (judge_backend == "mock") {
        if (judge_fixtures.empty()) usage_fail("--backend mock needs --fixtures");
        backend = std::make_unique<MockJudgeBackend>(MockJudgeBackend::from_file(judge_fixtures));
      } else if (judge_backend == "http") {
        backend = std::make_unique<HttpJudgeBackend>(http_options(judge_url, judge_timeout, judge_retries));
      } else {
        usage_fail("unknown judge backend \"", judge_backend, "\" (expected mock or http)");
      }
      print_resolved(err, "judge",
                     {{"samples", judge_samples}, {"outputs", judge_outputs}, {"backend", judge_backend},
                      {"fixtures", judge_fixtures}, {"url", judge_url}, {"template_dir", judge_template_dir}});
      PromptOptions popt;
      if (!judge_template_dir.empty()) popt.templates = PromptTemplates::from_directory(judge_template_dir);
      const auto set = load_samples(judge_samples, parse_input_format(judge_format));
      std::vector<Sample> samples;
      std::vector<std::string> outputs;
      for_each_json_line(std::filesystem::path(judge_outputs), [&](const Json& r, std::size_t line_no) {
        const auto where = detail::concat(judge_outputs, ": line ", line_no);
        const auto id = required_field<std::string>(r, "id", where);
        const Sample* s = set.find(id);
        if (!s) fail(where, ": id \"", id, "\" is not in the sample set");
        samples.push_back(*s);
        outputs.push_back(required_field<std::string>(r, "output", where));
      });
      const auto report = judge_batch(samples, outputs, *backend, popt);
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      if (judge_output.empty()) {
        out << report.to_json().dump(2) << '\n';
      } else {
        write_json_file(judge_output, report.to_json());
      }
    };
  });

  // simulate
  ExperimentConfig sim_cfg;
  std::string sim_modes = "baseline,expanding,annealing", sim_output;
  std::size_t sim_seed_count = 10;
  std::uint64_t sim_base_seed = 0;
  auto* sim = app.add_subcommand("simulate", "Synthetic curriculum experiment under label noise");
  sim->add_option("--noise", sim_cfg.noise_rate, "Mean label-corruption rate")->capture_default_str();
  sim->add_option("--shards", sim_cfg.shards, "Number of quality shards")->capture_default_str();
  sim->add_option("--modes", sim_modes, "baseline, expanding, annealing, loss-truncation")->capture_default_str();
  sim->add_option("--seeds", sim_seed_count, "Number of seeds (seed+1 .. seed+n)")->capture_default_str();
  sim->add_option("--seed", sim_base_seed, "Base seed")->capture_default_str();
  sim->add_option("--n-train", sim_cfg.n_train)->capture_default_str();
  sim->add_option("--n-test", sim_cfg.n_test)->capture_default_str();
  sim->add_option("--dim", sim_cfg.dim)->capture_default_str();
  sim->add_option("--classes", sim_cfg.classes)->capture_default_str();
  sim->add_option("--feature-std", sim_cfg.feature_std)->capture_default_str();
  sim->add_option("--step-size", sim_cfg.step_size)->capture_default_str();
  sim->add_option("--epochs-per-phase", sim_cfg.epochs_per_phase)->capture_default_str();
  sim->add_option("--jobs", sim_cfg.jobs, "Runs executed concurrently")->capture_default_str();
  sim->add_option("--output", sim_output, "Report JSON to write");
  add_config_flag(sim);
  sim->callback([&] {
    action = [&] {
      sim_cfg.modes.clear();
      for (const auto& m : split_list(sim_modes)) sim_cfg.modes.push_back(parse_training_mode(m));
      sim_cfg.seeds.clear();
      for (std::size_t i = 1; i <= sim_seed_count; ++i) sim_cfg.seeds.push_back(sim_base_seed + i);
      print_resolved(err, "simulate", sim_cfg.to_json());
      const auto report = run_experiment(sim_cfg);
      if (!sim_output.empty()) write_json_file(sim_output, report.to_json());
      out << report.summary_table();
    };
  });

  // pipeline
  std::string pipe_input, pipe_format = "auto", pipe_criterion = "length", pipe_side = "text",
                          pipe_alignment_file, pipe_mode = "annealing", pipe_direction = "ascending", pipe_out_dir;
  std::size_t pipe_k = kDefaultShards, pipe_jobs = 1;
  std::uint64_t pipe_seed = 0;
  bool pipe_joint = false;
  auto* pipe = app.add_subcommand("pipeline", "Run score -> shard -> schedule -> sample end to end");
  pipe->add_option("--input", pipe_input, "Sample JSONL")->required();
  pipe->add_option("--out-dir", pipe_out_dir, "Directory for all artifacts")->required();
  pipe->add_option("--format", pipe_format, "facts, table or auto")->capture_default_str();
  pipe->add_option("--criterion", pipe_criterion, "length, rarity or alignment")->capture_default_str();
  pipe->add_option("--side", pipe_side, "text or input")->capture_default_str();
  pipe->add_flag("--joint-model", pipe_joint, "One unigram model for all languages");
  pipe->add_option("--alignment-file", pipe_alignment_file, "External alignment scores {id, score}");
  pipe->add_option("--shards", pipe_k, "Number of shards K")->capture_default_str();
  pipe->add_option("--mode", pipe_mode, "expanding or annealing")->capture_default_str();
  pipe->add_option("--direction", pipe_direction, "ascending or descending")->capture_default_str();
  pipe->add_option("--seed", pipe_seed, "Base seed")->capture_default_str();
  pipe->add_option("--jobs", pipe_jobs, "Manifests written concurrently")->capture_default_str();
  add_config_flag(pipe);
  pipe->callback([&] {
    action = [&] {
      PipelineConfig cfg;
      cfg.input = pipe_input;
      cfg.format = parse_input_format(pipe_format);
      cfg.criterion = parse_criterion(pipe_criterion);
      cfg.scoring.side = parse_side(pipe_side);
      cfg.scoring.joint_model = pipe_joint;
      if (!pipe_alignment_file.empty()) cfg.scoring.alignment_file = pipe_alignment_file;
      cfg.shards = pipe_k;
      cfg.mode = parse_schedule_mode(pipe_mode);
      cfg.direction = parse_direction(pipe_direction);
      cfg.seed = pipe_seed;
      cfg.out_dir = pipe_out_dir;
      cfg.jobs = pipe_jobs;
      print_resolved(err, "pipeline", cfg.to_json());
      const auto artifacts = pipeline_run(cfg);
      out << "wrote " << artifacts.manifests.size() << " manifests to " << (cfg.out_dir / "manifests").string()
          << '\n';
    };
  });

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  } catch (const UsageError& e) {
    err << "xcurric: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "xcurric: " << e.what() << '\n';
    return kDomainError;
  }

  try {
    if (action) action();
  } catch (const UsageError& e) {
    err << "xcurric: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "xcurric: " << e.what() << '\n';
    return kDomainError;
  }
  return kSuccess;
}

inline int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace xcurric::cli
