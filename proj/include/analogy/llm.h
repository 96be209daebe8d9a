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

#ifndef ANALOGY_LLM_H_
#define ANALOGY_LLM_H_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "analogy/util.h"

namespace analogy {

enum class BackendKind { kRemote, kReplay };

struct LlmBackendSpec {
  BackendKind kind = BackendKind::kReplay;
  std::string model = "gpt-3.5-turbo-instruct";
  double temperature = 0.0;
  int max_output_tokens = 64;
  std::filesystem::path transcript;
  // Remote only. The API key is read from the environment variable named by
  // api_key_env and is never stored in config files.
  std::string endpoint = "https://api.openai.com";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 3;
};

Json BackendSpecToJson(const LlmBackendSpec& spec);
LlmBackendSpec BackendSpecFromJson(const Json& j);

struct TranscriptEntry {
  std::string prompt_sha256;
  std::string prompt;
  std::string response;
  std::string model;
  std::string timestamp;
};

Json TranscriptEntryToJson(const TranscriptEntry& entry);
TranscriptEntry TranscriptEntryFromJson(const Json& j);

// prompt_sha256 -> entry. Later lines win.
std::map<std::string, TranscriptEntry> ReadTranscript(const std::filesystem::path& path);

// Append-only JSONL writer; appends from several threads are serialised.
class TranscriptWriter {
 public:
  explicit TranscriptWriter(std::filesystem::path path);
  void Append(const TranscriptEntry& entry);

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

// Single-completion text model.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string Complete(const std::string& prompt) = 0;
  virtual std::string model() const = 0;
};

// Answers from a recorded transcript only. A prompt that was never recorded
// throws kFailedPrecondition ("transcript incomplete").
class ReplayBackend : public LlmBackend {
 public:
  explicit ReplayBackend(std::map<std::string, TranscriptEntry> entries,
                         std::string model = "replay");
  static std::unique_ptr<ReplayBackend> FromFile(const std::filesystem::path& path);

  std::string Complete(const std::string& prompt) override;
  std::string model() const override { return model_; }

 private:
  std::map<std::string, TranscriptEntry> entries_;
  std::string model_;
};

// Builds the backend described by `spec`. Remote backends record every
// response to spec.transcript.
std::unique_ptr<LlmBackend> MakeBackend(const LlmBackendSpec& spec);

}  // namespace analogy

#endif  // ANALOGY_LLM_H_
