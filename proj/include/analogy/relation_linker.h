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

#ifndef ANALOGY_RELATION_LINKER_H_
#define ANALOGY_RELATION_LINKER_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "analogy/embedding.h"
#include "analogy/util.h"

namespace analogy {

inline constexpr std::size_t kDefaultCandidateK = 20;

// The k relations most similar to `query_relation`, best first.
struct CandidateSet {
  std::string query_relation;
  std::vector<ScoredId> candidates;

  bool operator==(const CandidateSet&) const = default;
};

struct RelationEntry {
  std::string id;
  std::string label;
  std::vector<std::string> aliases;
};

// Text sent to the embedder for a relation: the label, or
// "label (alias1, alias2)" when aliases are used.
std::string RelationText(const RelationEntry& entry, bool with_aliases);

using RelationIndex = EmbeddingIndex<double>;

// Embeds every relation (cached) and builds the exact search index.
RelationIndex EmbedRelations(const std::vector<RelationEntry>& relations,
                             EmbeddingProvider& provider, const EmbeddingCache* cache,
                             bool with_aliases = false, const EmbedOptions& options = {});

CandidateSet TopKCandidates(const std::string& query_relation, const RelationIndex& index,
                            std::size_t k = kDefaultCandidateK);

std::vector<CandidateSet> AllCandidates(const RelationIndex& index,
                                        std::size_t k = kDefaultCandidateK);

// candidates.jsonl rows carry labels so later stages need no other input:
// {"query", "query_label", "candidates": [{"id", "label", "score"}]}
std::string WriteCandidates(const std::vector<CandidateSet>& sets,
                            const std::map<std::string, std::string>& labels);
struct CandidateFile {
  std::vector<CandidateSet> sets;
  std::map<std::string, std::string> labels;  // id -> label
};
CandidateFile ReadCandidates(const std::filesystem::path& path);

// Alias TSV: "<relation id or label>\t<alias>" per line.
std::map<std::string, std::vector<std::string>> ReadAliases(
    const std::filesystem::path& path);

}  // namespace analogy

#endif  // ANALOGY_RELATION_LINKER_H_
