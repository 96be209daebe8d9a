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

#include "analogy/relation_linker.h"

#include "analogy/error.h"

namespace analogy {

std::string RelationText(const RelationEntry& entry, bool with_aliases) {
  if (!with_aliases || entry.aliases.empty()) return entry.label;
  std::string text = entry.label + " (";
  for (std::size_t i = 0; i < entry.aliases.size(); ++i) {
    if (i > 0) text += ", ";
    text += entry.aliases[i];
  }
  return text + ")";
}

RelationIndex EmbedRelations(const std::vector<RelationEntry>& relations,
                             EmbeddingProvider& provider, const EmbeddingCache* cache,
                             bool with_aliases, const EmbedOptions& options) {
  std::vector<std::string> texts;
  texts.reserve(relations.size());
  for (const auto& r : relations) texts.push_back(RelationText(r, with_aliases));
  const auto vectors = EmbedTexts(texts, provider, cache, options);

  std::vector<std::string> ids;
  std::vector<EmbeddingVector> rows;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    ids.push_back(relations[i].id);
    rows.push_back(vectors.at(texts[i]));
  }
  return RelationIndex(std::move(ids), rows);
}

CandidateSet TopKCandidates(const std::string& query_relation, const RelationIndex& index,
                            std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "candidate k must be >= 1");
  return CandidateSet{query_relation, index.TopKFor(query_relation, k)};
}

std::vector<CandidateSet> AllCandidates(const RelationIndex& index, std::size_t k) {
  std::vector<CandidateSet> sets;
  sets.reserve(index.size());
  for (const auto& id : index.ids()) sets.push_back(TopKCandidates(id, index, k));
  return sets;
}

std::string WriteCandidates(const std::vector<CandidateSet>& sets,
                            const std::map<std::string, std::string>& labels) {
  auto label_of = [&](const std::string& id) {
    auto it = labels.find(id);
    return it == labels.end() ? id : it->second;
  };
  std::string out;
  for (const auto& set : sets) {
    Json candidates = Json::array();
    for (const auto& c : set.candidates) {
      candidates.push_back({{"id", c.id}, {"label", label_of(c.id)}, {"score", c.score}});
    }
    out += Json{{"query", set.query_relation},
                {"query_label", label_of(set.query_relation)},
                {"candidates", candidates}}
               .dump();
    out += '\n';
  }
  return out;
}

CandidateFile ReadCandidates(const std::filesystem::path& path) {
  CandidateFile file;
  try {
    for (const Json& row : ReadJsonLines(path)) {
      CandidateSet set;
      set.query_relation = row.at("query").get<std::string>();
      file.labels[set.query_relation] = row.value("query_label", set.query_relation);
      for (const Json& c : row.at("candidates")) {
        const std::string id = c.at("id").get<std::string>();
        file.labels[id] = c.value("label", id);
        set.candidates.push_back({id, c.at("score").get<double>()});
      }
      file.sets.push_back(std::move(set));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kDataLoss, path.string() + ": bad candidate row: " + e.what());
  }
  return file;
}

std::map<std::string, std::vector<std::string>> ReadAliases(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::string>> aliases;
  const std::string text = ReadFile(path);
  for (std::string_view line : SplitLines(text)) {
    if (Trim(line).empty() || line.front() == '#') continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2 || Trim(fields[1]).empty()) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": expected '<relation>\\t<alias>'");
    }
    aliases[std::string(Trim(fields[0]))].emplace_back(Trim(fields[1]));
  }
  return aliases;
}

}  // namespace analogy
