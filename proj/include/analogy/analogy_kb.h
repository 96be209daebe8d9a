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

#ifndef ANALOGY_ANALOGY_KB_H_
#define ANALOGY_ANALOGY_KB_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "analogy/kg_ingest.h"
#include "analogy/util.h"

namespace analogy {

// A subject:object pair under some relation.
struct ConceptPair {
  std::string subject;
  std::string object;
  double popularity = 0.0;

  bool operator==(const ConceptPair&) const = default;
};

// Pairs are kept sorted by popularity (descending), ties by (subject, object).
struct Relation {
  std::string id;
  std::string label;
  Source source = Source::kConceptNet;
  std::vector<ConceptPair> pairs;

  bool operator==(const Relation&) const = default;
};

// "<source>:<label>", e.g. "wikidata:chief executive officer".
std::string RelationId(Source source, std::string_view label);

enum class Provenance { kAuto, kHumanAdded };
enum class PairStatus { kPending, kApproved, kRejected };

std::string_view ProvenanceName(Provenance p);
Provenance ParseProvenance(std::string_view name);
std::string_view PairStatusName(PairStatus s);
PairStatus ParsePairStatus(std::string_view name);

// Two relations whose concept pairs can form analogies. Stored once, with
// rel_a < rel_b.
struct AnalogousRelationPair {
  std::string rel_a;
  std::string rel_b;
  std::string meta_relation;
  Provenance provenance = Provenance::kAuto;
  PairStatus status = PairStatus::kPending;

  bool operator==(const AnalogousRelationPair&) const = default;
};

// Returns `pair` with rel_a < rel_b. Throws kInvalidArgument when the two
// relations are the same.
AnalogousRelationPair Canonical(AnalogousRelationPair pair);

Json PairToJson(const AnalogousRelationPair& pair);
AnalogousRelationPair PairFromJson(const Json& j);

enum class AnalogyKind { kSameRelation, kAnalogousRelations };

std::string_view AnalogyKindName(AnalogyKind kind);
AnalogyKind ParseAnalogyKind(std::string_view name);

// A:B::C:D. relation_ids holds one id for same-relation analogies and
// (rel of A:B, rel of C:D) otherwise.
struct Analogy {
  std::string a, b, c, d;
  AnalogyKind kind = AnalogyKind::kSameRelation;
  std::vector<std::string> relation_ids;

  bool operator==(const Analogy&) const = default;
};

Json AnalogyToJson(const Analogy& analogy);

// "A is to B as C is to D".
std::string RenderAnalogy(const Analogy& analogy);

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Groups triples by (source, relation), drops self pairs, keeps the highest
  // popularity seen for a repeated (subject, object) and sorts. Analogous
  // pairs must name relations by id or by an unambiguous label; unresolved
  // names throw kNotFound listing all of them.
  static KnowledgeBase Build(const std::vector<RawTriple>& triples,
                             const std::vector<AnalogousRelationPair>& analogous);

  const std::vector<Relation>& relations() const { return relations_; }
  const std::vector<AnalogousRelationPair>& analogous_pairs() const {
    return analogous_;
  }

  const Relation* FindRelation(std::string_view id) const;
  const Relation& GetRelation(std::string_view id) const;  // throws kNotFound

  // Id lookup by label; empty when unknown, several when the label exists in
  // both sources.
  std::vector<std::string> IdsForLabel(std::string_view label) const;

  const AnalogousRelationPair* FindAnalogousPair(std::string_view a,
                                                 std::string_view b) const;
  bool AreAnalogous(std::string_view a, std::string_view b) const;  // approved only
  // Approved partners of `id`.
  std::vector<std::string> AnalogousPartners(std::string_view id) const;

  // Popularity of (subject, object) in relation `id`, exact match.
  std::optional<double> PairPopularity(std::string_view id, std::string_view subject,
                                       std::string_view object) const;

  // Relations containing (subject, object), matched case-insensitively.
  std::vector<std::string> RelationsWithPair(std::string_view subject,
                                             std::string_view object) const;

  // Compares content only; the lookup tables are derived from it.
  bool operator==(const KnowledgeBase& other) const {
    return relations_ == other.relations_ && analogous_ == other.analogous_;
  }

  // Restores a KB from parts that are already canonical (LoadKb).
  static KnowledgeBase FromParts(std::vector<Relation> relations,
                                 std::vector<AnalogousRelationPair> analogous);

 private:
  void Index();

  std::vector<Relation> relations_;  // sorted by id
  std::vector<AnalogousRelationPair> analogous_;  // sorted by (rel_a, rel_b)
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::string>> by_label_;
  std::unordered_map<std::string, std::vector<std::string>> by_pair_key_;
  std::unordered_map<std::string, double> popularity_;
  std::map<std::pair<std::string, std::string>, std::size_t> analogous_index_;
};

// Same-relation analogies, most popular combinations first: the pair with
// rank j is combined with ranks 0..j-1 before rank j+1 is used. Each analogy
// is emitted in canonical orientation ((a,b) <= (c,d)).
std::vector<Analogy> EnumerateSameRelation(const KnowledgeBase& kb,
                                           std::string_view relation_id,
                                           std::size_t limit = kUnlimited);

// Cross product rel_a x rel_b in square shells of growing max rank.
// Throws kFailedPrecondition unless the pair is approved.
std::vector<Analogy> EnumerateAnalogous(const KnowledgeBase& kb,
                                        std::string_view rel_a,
                                        std::string_view rel_b,
                                        std::size_t limit = kUnlimited);

struct KbStats {
  std::map<std::string, std::uint64_t> pairs_by_source;
  std::map<std::string, std::uint64_t> relations_by_source;
  std::uint64_t relations = 0;
  std::uint64_t concept_pairs = 0;
  std::uint64_t analogous_relation_pairs = 0;  // approved
  std::uint64_t same_relation_analogies = 0;   // sum of C(n_R, 2)
  std::uint64_t analogous_analogies = 0;       // sum of n_a * n_b
  std::uint64_t total_analogies = 0;

  bool operator==(const KbStats&) const = default;
};

KbStats ComputeStats(const KnowledgeBase& kb);
Json StatsToJson(const KbStats& stats);

enum class SampleKind { kSameRelation, kAnalogousRelations, kAny };

struct SampleResult {
  std::vector<Analogy> analogies;
  // Fewer analogies were derivable than requested.
  bool short_of_request = false;
};

// Popularity-weighted sampling without replacement. Analogies are grouped into
// rank bands of `kSampleBandWidth` shells; earlier bands are taken whole and
// the band that overflows `n` is sampled uniformly.
inline constexpr std::size_t kSampleBandWidth = 8;
SampleResult SampleAnalogies(const KnowledgeBase& kb, SampleKind kind, std::size_t n,
                             std::uint64_t seed);

struct KbManifest {
  std::string built_at;
  std::map<std::string, std::string> source_hashes;  // file name -> sha256
};

// Directory layout: relations.jsonl, pairs.jsonl, analogous_pairs.jsonl,
// manifest.json.
void SaveKb(const KnowledgeBase& kb, const std::filesystem::path& dir,
            const KbManifest& manifest);
KnowledgeBase LoadKb(const std::filesystem::path& dir);

}  // namespace analogy

#endif  // ANALOGY_ANALOGY_KB_H_
