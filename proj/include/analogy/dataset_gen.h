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

#ifndef ANALOGY_DATASET_GEN_H_
#define ANALOGY_DATASET_GEN_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "analogy/analogy_kb.h"
#include "analogy/util.h"

namespace analogy {

inline constexpr std::size_t kMcqaCandidates = 4;

// Recognition item: which candidate completes the query pair's analogy?
struct McqaItem {
  std::string id;
  ConceptPair query;
  std::vector<ConceptPair> candidates;  // kMcqaCandidates
  std::size_t answer_index = 0;
  AnalogyKind kind = AnalogyKind::kSameRelation;
  std::string query_relation;
  std::string answer_relation;
  std::vector<std::string> candidate_relations;  // parallel to candidates
  bool shared_concept = false;  // query and answer share a concept

  bool operator==(const McqaItem&) const = default;
};

// Generation item: "A is to B as C is to" -> D.
struct GenItem {
  std::string id;
  std::string a, b, c;
  std::string target_d;
  AnalogyKind kind = AnalogyKind::kSameRelation;
  std::vector<std::string> relation_ids;

  bool operator==(const GenItem&) const = default;
};

std::string RenderGenPrompt(const GenItem& item);  // "A is to B as C is to"

struct RecognitionOptions {
  std::size_t n_same = 5000;
  std::size_t n_analogous = 5000;
  std::uint64_t seed = 0;
  bool exclude_shared_concepts = false;
  int max_distractor_attempts = 64;
};

struct RecognitionDataset {
  std::vector<McqaItem> items;
  std::size_t skipped_queries = 0;  // no 3 valid distractors found
  std::size_t excluded_shared_concept = 0;
  bool short_of_request = false;
};

// Queries come from SampleAnalogies; distractors are drawn from relations
// that are neither the query's relation, nor approved-analogous to it, nor
// share its label. Throws kFailedPrecondition for a KB with < 5 relations.
RecognitionDataset MakeRecognitionDataset(const KnowledgeBase& kb,
                                          const RecognitionOptions& options);

struct GenerationDataset {
  std::vector<GenItem> items;
  bool short_of_request = false;
};

// Orients an analogy so the more popular pair supplies C and D.
GenItem ToGenItem(const KnowledgeBase& kb, const Analogy& analogy);

GenerationDataset MakeGenerationDataset(const KnowledgeBase& kb, std::size_t n,
                                        std::uint64_t seed);

Json McqaToJson(const McqaItem& item);
McqaItem McqaFromJson(const Json& j);
Json GenToJson(const GenItem& item);
GenItem GenFromJson(const Json& j);

std::vector<McqaItem> ReadMcqa(const std::filesystem::path& path);
std::vector<GenItem> ReadGen(const std::filesystem::path& path);

// One benchmark analogy A:B::C:D (for multiple-choice files: the stem with
// its correct choice).
struct ExternalItem {
  std::string a, b, c, d;
};

struct ExternalSet {
  std::vector<ExternalItem> items;
  std::size_t malformed = 0;
};

// Accepts, one per line:
//   a:b::c:d
//   a:b::c1:d1|c2:d2|c3:d3|c4:d4<TAB><answer index>
//   {"stem": [a, b], "choice": [[c, d], ...], "answer": i}
// Blank lines and lines starting with '#' are ignored.
ExternalSet ParseExternal(std::string_view text);
ExternalSet LoadExternal(const std::filesystem::path& path);

struct OverlapResult {
  double rate = 0.0;
  std::vector<ExternalItem> overlapping;
  std::size_t skipped = 0;
};

// An item overlaps when (A, B) is in some relation R1 and (C, D) in some R2
// with R1 == R2 or R1, R2 approved-analogous. Throws kInvalidArgument for an
// empty set (rate undefined).
OverlapResult ComputeOverlap(const KnowledgeBase& kb, const ExternalSet& external);

// Removes training items whose two pairs coincide (case-insensitively, in
// either order) with the two pairs of any external test item.
std::vector<McqaItem> ExcludeOverlap(const std::vector<McqaItem>& train,
                                     const std::vector<ExternalSet>& tests);
std::vector<GenItem> ExcludeOverlap(const std::vector<GenItem>& train,
                                    const std::vector<ExternalSet>& tests);

}  // namespace analogy

#endif  // ANALOGY_DATASET_GEN_H_
