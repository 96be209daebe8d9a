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

#ifndef ANALOGY_LLM_FILTER_H_
#define ANALOGY_LLM_FILTER_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "analogy/analogy_kb.h"
#include "analogy/llm.h"
#include "analogy/relation_linker.h"

namespace analogy {

// Task sentences and few-shot blocks for the two prompt families. The
// exemplar blocks live in data files (selection_exemplars.txt,
// meta_exemplars.txt); an empty block gives a zero-shot prompt.
struct PromptTemplates {
  std::string selection_task =
      "Choose the relations from the relation candidates that can form an analogy "
      "with the given relation.";
  std::string selection_exemplars;
  std::string meta_task =
      "Induce two relations into a higher-level relation and explain why they can "
      "form an analogy.";
  std::string meta_exemplars;

  static PromptTemplates Load(const std::filesystem::path& dir);
};

// Task sentence, blank line, exemplars, blank line, then
//   Given relation: <query>
//   Relation candidates: [<c1>, <c2>, ...]
//   Answer:
// Throws kInvalidArgument on an empty candidate list.
std::string BuildSelectionPrompt(const std::string& query,
                                 const std::vector<std::string>& candidates,
                                 const PromptTemplates& templates);

// Ends with "... both of them can be induced into a relation:".
std::string BuildMetaPrompt(const std::string& relation_a, const std::string& relation_b,
                            const PromptTemplates& templates);

struct SelectionResult {
  std::string query;
  std::vector<std::string> candidates_shown;  // relation ids
  std::vector<std::string> selected;          // subset of candidates_shown
  std::vector<std::string> unmatched;         // response tokens that matched nothing
  std::string raw_response;

  bool operator==(const SelectionResult&) const = default;
};

// Splits a selection answer on commas/newlines and matches each token
// (trimmed, case-insensitive) against the shown candidates' labels. "None"
// selects nothing. Tokens that match no candidate are reported, never added.
SelectionResult ParseSelection(const std::string& query,
                               const std::vector<std::string>& candidates_shown,
                               const std::map<std::string, std::string>& labels,
                               const std::string& response);

SelectionResult SelectAnalogous(const CandidateSet& candidates,
                                const std::map<std::string, std::string>& labels,
                                LlmBackend& backend, const PromptTemplates& templates);

using RelationIdPair = std::pair<std::string, std::string>;  // first < second

// Unordered pairs selected in either direction, canonical and deduplicated.
std::vector<RelationIdPair> RawSelectedPairs(const std::vector<SelectionResult>& results);

// Keeps {R1, R2} iff R2 was selected for R1 and R1 for R2.
std::vector<RelationIdPair> ApplySymmetryRule(const std::vector<SelectionResult>& results);

struct MetaRelationResult {
  RelationIdPair pair;
  std::optional<std::string> meta;  // absent iff the model answered None
  std::string raw_response;

  bool operator==(const MetaRelationResult&) const = default;
};

// Reads the completion after the prompt's final colon: first line, brackets
// and trailing period stripped. "none" in any casing means no meta relation.
std::optional<std::string> ParseMetaCompletion(const std::string& response);

MetaRelationResult SummarizeMeta(const RelationIdPair& pair,
                                 const std::map<std::string, std::string>& labels,
                                 LlmBackend& backend, const PromptTemplates& templates);

// Pairs with a meta relation become pending, auto-provenance candidates.
std::vector<AnalogousRelationPair> ApplyMetaRule(const std::vector<MetaRelationResult>& results);

struct FilterOptions {
  std::size_t max_in_flight = 4;
};

struct FilterOutcome {
  std::vector<SelectionResult> selections;
  std::vector<RelationIdPair> raw_pairs;
  std::vector<RelationIdPair> rule1_pairs;
  std::vector<MetaRelationResult> meta_results;
  std::vector<AnalogousRelationPair> pending;
};

// Selection for every candidate set, Rule 1, meta prompts for the survivors,
// Rule 2. Results are ordered by input, independent of completion order.
FilterOutcome RunFilter(const std::vector<CandidateSet>& candidate_sets,
                        const std::map<std::string, std::string>& labels,
                        LlmBackend& backend, const PromptTemplates& templates,
                        const FilterOptions& options = {});

Json SelectionToJson(const SelectionResult& result);
Json MetaResultToJson(const MetaRelationResult& result);
Json FunnelToJson(const FilterOutcome& outcome);

}  // namespace analogy

#endif  // ANALOGY_LLM_FILTER_H_
