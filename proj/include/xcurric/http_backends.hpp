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

// JSON-over-HTTP backends for translation and judging.
//
//   POST /translate  {"texts": [...], "src": "en", "tgt": "hi"}
//                 -> {"translations": [...]}
//   POST /complete   {"prompt": "..."} -> {"text": "..."}
//
// Non-2xx answers and transport errors are retried with exponential backoff
// (backoff, 2*backoff, 4*backoff, ...) up to `retries` extra attempts.

#include <chrono>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "httplib.h"
#include "xcurric/error.hpp"
#include "xcurric/judge.hpp"
#include "xcurric/jsonl.hpp"
#include "xcurric/rtt_filter.hpp"

namespace xcurric {

struct HttpOptions {
  std::string base_url = "http://127.0.0.1:8080";  // scheme://host:port
  std::chrono::milliseconds timeout{30000};
  std::size_t retries = 3;
  std::chrono::milliseconds backoff{250};
};

namespace detail {

inline Json post_json_with_retry(const HttpOptions& opt, const std::string& path, const Json& body) {
  std::string last_error;
  auto delay = opt.backoff;
  for (std::size_t attempt = 0; attempt <= opt.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(opt.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opt.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opt.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = detail::concat("HTTP ", res->status);
      continue;
    }
    try {
      return Json::parse(res->body);
    } catch (const Json::exception& e) {
      fail(opt.base_url, path, ": malformed JSON response (", e.what(), ")");
    }
  }
  fail(opt.base_url, path, ": giving up after ", opt.retries + 1, " attempts (", last_error, ")");
}

}  // namespace detail

class HttpTranslator final : public Translator {
 public:
  explicit HttpTranslator(HttpOptions options) : options_(std::move(options)) {}

  std::vector<std::string> translate_batch(std::span<const TranslationItem> items, std::string_view src,
                                           std::string_view tgt) const override {
    if (items.empty()) fail("empty translation batch");
    Json body;
    body["texts"] = Json::array();
    for (const auto& item : items) body["texts"].push_back(item.text);
    body["src"] = src;
    body["tgt"] = tgt;
    const Json reply = detail::post_json_with_retry(options_, "/translate", body);
    auto it = reply.find("translations");
    if (it == reply.end() || !it->is_array()) fail("translation service reply has no \"translations\" array");
    if (it->size() != items.size()) {
      fail("translation service returned ", it->size(), " translations for ", items.size(), " texts");
    }
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& t : *it) {
      if (!t.is_string()) fail("translation service returned a non-string translation");
      out.push_back(t.get<std::string>());
    }
    return out;
  }

 private:
  HttpOptions options_;
};

class HttpJudgeBackend final : public JudgeBackend {
 public:
  explicit HttpJudgeBackend(HttpOptions options) : options_(std::move(options)) {}

  std::string complete(const std::string&, const std::string& prompt) const override {
    const Json reply = detail::post_json_with_retry(options_, "/complete", Json{{"prompt", prompt}});
    auto it = reply.find("text");
    if (it == reply.end() || !it->is_string()) fail("completion service reply has no \"text\" string");
    return it->get<std::string>();
  }

 private:
  HttpOptions options_;
};

}  // namespace xcurric
