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

#ifndef ANALOGY_EVAL_HARNESS_H_
#define ANALOGY_EVAL_HARNESS_H_

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "analogy/analogy_kb.h"
#include "analogy/dataset_gen.h"
#include "analogy/embedding.h"

namespace analogy {

// Word vectors in the plain text format "token v1 v2 ..." (a leading
// "count dim" header line is tolerated).
class WordVectors {
 public:
  WordVectors() = default;

  static WordVectors Load(const std::filesystem::path& path);
  static WordVectors Parse(std::string_view text);

  void Add(std::string token, EmbeddingVector vector);
  std::size_t size() const { return vectors_.size(); }
  Eigen::Index dim() const { return dim_; }

  // A concept's vector: the whole concept as one token (spaces or
  // underscores), else the unweighted mean of its words. Tries the exact
  // spelling, then lowercase. nullopt when any word is missing.
  std::optional<EmbeddingVector> Concept(std::string_view name) const;

  // Multiplies every vector by `factor`.
  WordVectors Scaled(double factor) const;

 private:
  const EmbeddingVector* Token(const std::string& token) const;

  std::unordered_map<std::string, EmbeddingVector> vectors_;
  Eigen::Index dim_ = 0;
};

struct Prediction {
  std::optional<std::size_t> index;  // empty: item skipped
  std::vector<std::string> missing;  // concepts or sentences without vectors
  // -inf marks a candidate that could not be scored.
  std::vector<double> scores;
};

// argmax over candidates of cos(B - A, D - C); ties go to the lowest index.
// A candidate whose difference vector is zero scores -inf.
Prediction OffsetPredict(const McqaItem& item, const WordVectors& vectors);

using SentenceEmbedder =
    std::function<std::optional<EmbeddingVector>(const std::string& sentence)>;

// argmax over candidates of cos(embed("A is to B"), embed("C is to D")).
Prediction SentencePredict(const McqaItem& item, const SentenceEmbedder& embed);

// Fraction of exact matches. kInvalidArgument on length mismatch.
double Accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> gold);

inline constexpr std::size_t kMrrWindow = 10;

struct RankedPrediction {
  std::string item_id;
  std::vector<std::string> ranked_outputs;
  std::vector<double> scores;  // optional, parallel to ranked_outputs

  // Throws kInvalidArgument on duplicate outputs, a length mismatch with
  // scores or scores out of descending order.
  void Validate() const;
};

// Case- and surrounding-whitespace-insensitive comparison used for gold
// matching.
std::string GoldKey(std::string_view s);

// 1-based rank of `gold` in the first `window` outputs, 0 when absent.
std::size_t GoldRank(const RankedPrediction& pred, const std::string& gold,
                     std::size_t window = kMrrWindow);

double Mrr(std::span<const RankedPrediction> preds, std::span<const std::string> gold,
           std::size_t window = kMrrWindow);
double HitAtK(std::span<const RankedPrediction> preds, std::span<const std::string> gold,
              std::size_t k);
// With one gold answer per item recall@k and hit@k coincide.
double RecallAtK(std::span<const RankedPrediction> preds, std::span<const std::string> gold,
                 std::size_t k);

std::vector<RankedPrediction> ReadPredictions(const std::filesystem::path& path);

struct GenerationReport {
  std::size_t items = 0;
  std::size_t missing_predictions = 0;
  double accuracy = 0.0;  // first output equals gold
  double mrr = 0.0;
  double hit_at_1 = 0.0;
  double hit_at_5 = 0.0;
  double hit_at_10 = 0.0;
  double recall_at_5 = 0.0;
};

// Items without a prediction count as misses.
GenerationReport EvaluateGeneration(const std::vector<GenItem>& items,
                                    const std::vector<RankedPrediction>& preds,
                                    std::size_t mrr_window = kMrrWindow);

struct RecognitionReport {
  std::string baseline;
  std::size_t items = 0;
  std::size_t skipped = 0;
  double accuracy = 0.0;  // over scored items
  double accuracy_all = 0.0;  // skipped items counted wrong
};

Json GenerationReportToJson(const GenerationReport& r);
Json RecognitionReportToJson(const RecognitionReport& r);
std::string FormatReportTable(const Json& report);

inline constexpr std::size_t kDefaultRetrievalK = 8;

struct AnalogyQuery {
  std::string a, b, c;
};

std::string RenderQuery(const AnalogyQuery& q);  // "a is to b as c is to"

struct FewShotPrompt {
  std::vector<Analogy> exemplars;  // most similar first
  AnalogyQuery query;
  std::string rendered;
};

// "Please make analogies." then one "input: ... / output: ..." pair per
// exemplar, then "input: <query>\noutput:".
std::string RenderFewShot(const std::vector<Analogy>& exemplars, const AnalogyQuery& query);

// Analogies embedded by their rendered "A is to B as C is to D" text.
class AnalogyPool {
 public:
  AnalogyPool(std::vector<Analogy> analogies, EmbeddingProvider& provider,
              const EmbeddingCache* cache, const EmbedOptions& options = {});
  AnalogyPool(std::vector<Analogy> analogies, std::vector<EmbeddingVector> vectors);

  const std::vector<Analogy>& analogies() const { return analogies_; }
  const EmbeddingIndex<double>& index() const { return index_; }

  // Exact top-k by cosine against `query_vector`. Ties by pool position.
  std::vector<std::size_t> TopK(const EmbeddingVector& query_vector, std::size_t k) const;

 private:
  std::vector<Analogy> analogies_;
  EmbeddingIndex<double> index_;
};

FewShotPrompt RetrieveTopKAnalogies(const AnalogyQuery& query, const AnalogyPool& pool,
                                    EmbeddingProvider& provider,
                                    std::size_t k = kDefaultRetrievalK);

}  // namespace analogy

#endif  // ANALOGY_EVAL_HARNESS_H_
