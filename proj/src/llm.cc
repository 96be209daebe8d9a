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

#include "analogy/llm.h"

#include <fstream>

#include "analogy/error.h"
#include "analogy/remote.h"

namespace analogy {

Json BackendSpecToJson(const LlmBackendSpec& s) {
  return Json{{"kind", s.kind == BackendKind::kRemote ? "remote" : "replay"},
              {"model", s.model},
              {"temperature", s.temperature},
              {"max_output_tokens", s.max_output_tokens},
              {"transcript", s.transcript.string()},
              {"endpoint", s.endpoint},
              {"api_key_env", s.api_key_env},
              {"max_attempts", s.max_attempts}};
}

LlmBackendSpec BackendSpecFromJson(const Json& j) {
  if (j.contains("api_key")) {
    throw Error(ErrorCode::kInvalidArgument,
                "backend config must not contain an API key; set api_key_env instead");
  }
  LlmBackendSpec s;
  const std::string kind = j.value("kind", "replay");
  if (kind == "remote") {
    s.kind = BackendKind::kRemote;
  } else if (kind == "replay") {
    s.kind = BackendKind::kReplay;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown backend kind '" + kind + "'");
  }
  s.model = j.value("model", s.model);
  s.temperature = j.value("temperature", s.temperature);
  s.max_output_tokens = j.value("max_output_tokens", s.max_output_tokens);
  s.transcript = j.value("transcript", std::string());
  s.endpoint = j.value("endpoint", s.endpoint);
  s.api_key_env = j.value("api_key_env", s.api_key_env);
  s.max_attempts = j.value("max_attempts", s.max_attempts);
  return s;
}

Json TranscriptEntryToJson(const TranscriptEntry& e) {
  return Json{{"prompt_sha256", e.prompt_sha256},
              {"prompt", e.prompt},
              {"response", e.response},
              {"model", e.model},
              {"timestamp", e.timestamp}};
}

TranscriptEntry TranscriptEntryFromJson(const Json& j) {
  TranscriptEntry e;
  e.prompt = j.value("prompt", "");
  e.prompt_sha256 = j.value("prompt_sha256", "");
  if (e.prompt_sha256.empty()) e.prompt_sha256 = Sha256Hex(e.prompt);
  e.response = j.at("response").get<std::string>();
  e.model = j.value("model", "");
  e.timestamp = j.value("timestamp", "");
  return e;
}

std::map<std::string, TranscriptEntry> ReadTranscript(const std::filesystem::path& path) {
  std::map<std::string, TranscriptEntry> entries;
  for (const Json& row : ReadJsonLines(path)) {
    try {
      TranscriptEntry e = TranscriptEntryFromJson(row);
      entries.insert_or_assign(e.prompt_sha256, std::move(e));
    } catch (const Json::exception& ex) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": bad transcript entry: " + ex.what());
    }
  }
  return entries;
}

TranscriptWriter::TranscriptWriter(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

void TranscriptWriter::Append(const TranscriptEntry& entry) {
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kUnavailable, "cannot append to " + path_.string());
  out << TranscriptEntryToJson(entry).dump() << '\n';
}

ReplayBackend::ReplayBackend(std::map<std::string, TranscriptEntry> entries, std::string model)
    : entries_(std::move(entries)), model_(std::move(model)) {}

std::unique_ptr<ReplayBackend> ReplayBackend::FromFile(const std::filesystem::path& path) {
  return std::make_unique<ReplayBackend>(ReadTranscript(path), "replay:" + path.filename().string());
}

std::string ReplayBackend::Complete(const std::string& prompt) {
  const std::string key = Sha256Hex(prompt);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    std::string head = prompt.substr(prompt.rfind("\n\n") == std::string::npos
                                         ? 0
                                         : prompt.rfind("\n\n") + 2);
    throw Error(ErrorCode::kFailedPrecondition,
                "transcript incomplete: no response recorded for prompt " + key + " (" + head +
                    ")");
  }
  return it->second.response;
}

std::unique_ptr<LlmBackend> MakeBackend(const LlmBackendSpec& spec) {
  if (spec.kind == BackendKind::kReplay) {
    if (spec.transcript.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "replay backend needs a transcript path");
    }
    return ReplayBackend::FromFile(spec.transcript);
  }
  const std::string key = ApiKeyFromEnv(spec.api_key_env);
  if (key.empty()) {
    throw Error(ErrorCode::kFailedPrecondition,
                "remote backend: environment variable " + spec.api_key_env + " is not set");
  }
  return std::make_unique<RemoteCompletionBackend>(spec, key);
}

}  // namespace analogy
