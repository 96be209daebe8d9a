// Copyright 2026 The Analogy Toolkit Authors.
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

#include "analogy/remote.h"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include "analogy/error.h"

namespace analogy {

std::string ApiKeyFromEnv(const std::string& variable) {
  const char* v = std::getenv(variable.c_str());
  return v == nullptr ? std::string() : std::string(v);
}

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path_prefix;
};

Endpoint SplitEndpoint(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  Endpoint e{url.substr(0, path), path == std::string::npos ? "" : url.substr(path)};
  while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
  return e;
}

// POSTs JSON and returns the parsed body, retrying transport errors and 5xx /
// 429 responses with exponential backoff.
Json PostJson(const std::string& url, const std::string& path, const std::string& api_key,
              const Json& body, int max_attempts) {
  const Endpoint ep = SplitEndpoint(url);
  httplib::Client client(ep.base);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key}};
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < std::max(1, max_attempts); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
    auto res = client.Post(ep.path_prefix + path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kUnavailable,
                  "HTTP " + std::to_string(res->status) + " from " + url + path + ": " + res->body);
    }
    Json parsed = Json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      throw Error(ErrorCode::kUnavailable, "non-JSON response from " + url + path);
    }
    return parsed;
  }
  throw Error(ErrorCode::kUnavailable, url + path + " failed after " +
                                           std::to_string(max_attempts) + " attempts: " +
                                           last_error);
}

}  // namespace

RemoteCompletionBackend::RemoteCompletionBackend(LlmBackendSpec spec, std::string api_key)
    : spec_(std::move(spec)), api_key_(std::move(api_key)) {
  if (!spec_.transcript.empty()) {
    transcript_ = std::make_unique<TranscriptWriter>(spec_.transcript);
  }
}

std::string RemoteCompletionBackend::Complete(const std::string& prompt) {
  const Json body{{"model", spec_.model},
                  {"prompt", prompt},
                  {"temperature", spec_.temperature},
                  {"max_tokens", spec_.max_output_tokens}};
  const Json res = PostJson(spec_.endpoint, "/v1/completions", api_key_, body, spec_.max_attempts);
  std::string text;
  try {
    text = res.at("choices").at(0).at("text").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kUnavailable, std::string("unexpected completion payload: ") + e.what());
  }
  if (transcript_) {
    transcript_->Append(TranscriptEntry{Sha256Hex(prompt), prompt, text, spec_.model,
                                        UtcTimestamp()});
  }
  return text;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderSpec spec, std::string api_key)
    : spec_(std::move(spec)), api_key_(std::move(api_key)) {}

std::vector<EmbeddingVector> RemoteEmbedder::Embed(std::span<const std::string> texts) {
  const Json body{{"model", spec_.model},
                  {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const Json res = PostJson(spec_.endpoint, "/v1/embeddings", api_key_, body, 1);
  std::vector<EmbeddingVector> out(texts.size());
  try {
    const Json& data = res.at("data");
    if (data.size() != texts.size()) {
      throw Error(ErrorCode::kUnavailable, "embedding response has " +
                                               std::to_string(data.size()) + " rows for " +
                                               std::to_string(texts.size()) + " inputs");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t index = data[i].value("index", i);
      if (index >= out.size()) throw Error(ErrorCode::kUnavailable, "embedding index out of range");
      const auto values = data[i].at("embedding").get<std::vector<double>>();
      out[index] = Eigen::Map<const EmbeddingVector>(values.data(),
                                                     static_cast<Eigen::Index>(values.size()));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kUnavailable, std::string("unexpected embedding payload: ") + e.what());
  }
  return out;
}

}  // namespace analogy
