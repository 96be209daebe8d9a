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

#ifndef ANALOGY_REMOTE_H_
#define ANALOGY_REMOTE_H_

#include <memory>
#include <string>
#include <vector>

#include "analogy/embedding.h"
#include "analogy/llm.h"

namespace analogy {

// OpenAI-compatible completion endpoint (POST {endpoint}/v1/completions).
class RemoteCompletionBackend : public LlmBackend {
 public:
  RemoteCompletionBackend(LlmBackendSpec spec, std::string api_key);
  std::string Complete(const std::string& prompt) override;
  std::string model() const override { return spec_.model; }

 private:
  LlmBackendSpec spec_;
  std::string api_key_;
  std::unique_ptr<TranscriptWriter> transcript_;
};

struct RemoteEmbedderSpec {
  std::string endpoint = "https://api.openai.com";
  std::string model = "text-embedding-ada-002";
  std::string api_key_env = "OPENAI_API_KEY";
};

// OpenAI-compatible embedding endpoint (POST {endpoint}/v1/embeddings).
class RemoteEmbedder : public EmbeddingProvider {
 public:
  RemoteEmbedder(RemoteEmbedderSpec spec, std::string api_key);
  std::string id() const override { return "remote/" + spec_.model; }
  std::vector<EmbeddingVector> Embed(std::span<const std::string> texts) override;

 private:
  RemoteEmbedderSpec spec_;
  std::string api_key_;
};

// Reads the key from the environment; empty when the variable is unset.
std::string ApiKeyFromEnv(const std::string& variable);

}  // namespace analogy

#endif  // ANALOGY_REMOTE_H_
