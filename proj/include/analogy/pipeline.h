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

#ifndef ANALOGY_PIPELINE_H_
#define ANALOGY_PIPELINE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "analogy/embedding.h"
#include "analogy/kg_ingest.h"
#include "analogy/llm.h"
#include "analogy/remote.h"
#include "analogy/util.h"

namespace analogy {

struct EmbeddingConfig {
  std::string provider = "hashed-ngram";  // or "remote"
  int dim = 256;
  RemoteEmbedderSpec remote;
  std::filesystem::path cache_dir;  // empty: no cache
  bool with_aliases = false;
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
};

struct PipelineConfig {
  std::filesystem::path conceptnet;
  std::filesystem::path wikidata;
  std::filesystem::path aliases;
  std::string language = "en";
  PopularityField popularity = PopularityField::kSubject;
  double weight_threshold = 2.0;  // strict
  std::size_t candidate_k = 20;
  std::size_t retrieval_k = 8;
  std::size_t mrr_window = 10;
  EmbeddingConfig embedding;
  LlmBackendSpec backend;
  std::size_t max_in_flight = 4;
  std::uint64_t gen_seed = 0;
  std::uint64_t retrieve_seed = 0;
  std::size_t n_same = 5000;
  std::size_t n_analogous = 5000;
  std::size_t n_generation = 5000;
  std::size_t retrieval_pool = 10000;
  bool exclude_shared_concepts = false;
  std::filesystem::path out_dir = "out";
  std::filesystem::path annotators;
  std::filesystem::path prompts_dir = ANALOGY_DATA_DIR "/prompts";
};

// Relative paths resolve against `base_dir`. Unknown keys and any API key
// field throw kInvalidArgument.
PipelineConfig ConfigFromJson(const Json& j, const std::filesystem::path& base_dir,
                              PipelineConfig config = {});
PipelineConfig LoadConfig(const std::filesystem::path& path);
Json ConfigToJson(const PipelineConfig& config);

// Writes <out_dir>/<stage>.resolved_config.json.
void WriteResolvedConfig(const PipelineConfig& config, const std::string& stage);

// Throws kFailedPrecondition naming the stage and the producer of `path`.
void RequireArtifact(const std::string& stage, const std::string& producer,
                     const std::filesystem::path& path);

std::unique_ptr<EmbeddingProvider> MakeEmbedder(const EmbeddingConfig& config);

// Artifact names inside out_dir.
inline constexpr const char* kTriplesFile = "triples.jsonl";
inline constexpr const char* kIngestReportFile = "ingest_report.json";
inline constexpr const char* kCandidatesFile = "candidates.jsonl";
inline constexpr const char* kSelectionsFile = "selections.jsonl";
inline constexpr const char* kMetaFile = "meta.jsonl";
inline constexpr const char* kPendingFile = "pending_pairs.jsonl";
inline constexpr const char* kFunnelFile = "funnel.json";
inline constexpr const char* kDecisionsFile = "decisions.jsonl";
inline constexpr const char* kApprovedFile = "approved_pairs.jsonl";
inline constexpr const char* kKbDir = "kb";
inline constexpr const char* kRecognitionFile = "recognition.jsonl";
inline constexpr const char* kGenerationFile = "generation.jsonl";
inline constexpr const char* kRetrievalFile = "retrieval.jsonl";

// Each stage reads explicit inputs, writes into config.out_dir and returns a
// JSON summary.
Json RunIngest(const PipelineConfig& config);
Json RunLink(const PipelineConfig& config, const std::filesystem::path& triples);
Json RunLlmFilter(const PipelineConfig& config, const std::filesystem::path& candidates);

// Appends enqueue events for the pending pairs to `log`.
Json RunEnqueue(const PipelineConfig& config, const std::filesystem::path& pending,
                const std::filesystem::path& candidates, const std::filesystem::path& triples,
                const std::filesystem::path& log);

struct ApprovedSource {
  std::optional<std::filesystem::path> decisions;  // event log
  std::optional<std::filesystem::path> approved;   // pair JSONL
};
Json RunBuildKb(const PipelineConfig& config, const std::filesystem::path& triples,
                const ApprovedSource& approved);
Json RunStats(const PipelineConfig& config, const std::filesystem::path& kb_dir);
Json RunGenData(const PipelineConfig& config, const std::filesystem::path& kb_dir,
                const std::vector<std::filesystem::path>& exclude);

struct EvalInputs {
  std::string task;  // "recognition" or "generation"
  std::filesystem::path dataset;
  std::filesystem::path vectors;      // recognition
  std::string baseline = "offset";    // offset or sentence
  std::filesystem::path predictions;  // generation
};
Json RunEval(const PipelineConfig& config, const EvalInputs& inputs);

struct RetrieveInputs {
  std::filesystem::path kb_dir;
  std::vector<std::array<std::string, 3>> queries;
};
Json RunRetrieve(const PipelineConfig& config, const RetrieveInputs& inputs);

}  // namespace analogy

#endif  // ANALOGY_PIPELINE_H_
