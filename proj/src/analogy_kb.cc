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

#include "analogy/analogy_kb.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "analogy/error.h"

namespace analogy {

std::string RelationId(Source source, std::string_view label) {
  std::string id(SourceName(source));
  id += ':';
  id += label;
  return id;
}

std::string_view ProvenanceName(Provenance p) {
  return p == Provenance::kAuto ? "auto" : "human_added";
}

Provenance ParseProvenance(std::string_view name) {
  if (name == "auto") return Provenance::kAuto;
  if (name == "human_added") return Provenance::kHumanAdded;
  throw Error(ErrorCode::kInvalidArgument, "unknown provenance '" + std::string(name) + "'");
}

std::string_view PairStatusName(PairStatus s) {
  switch (s) {
    case PairStatus::kPending: return "pending";
    case PairStatus::kApproved: return "approved";
    case PairStatus::kRejected: return "rejected";
  }
  return "pending";
}

PairStatus ParsePairStatus(std::string_view name) {
  if (name == "pending") return PairStatus::kPending;
  if (name == "approved") return PairStatus::kApproved;
  if (name == "rejected") return PairStatus::kRejected;
  throw Error(ErrorCode::kInvalidArgument, "unknown pair status '" + std::string(name) + "'");
}

AnalogousRelationPair Canonical(AnalogousRelationPair pair) {
  if (pair.rel_a == pair.rel_b) {
    throw Error(ErrorCode::kInvalidArgument,
                "analogous pair needs two distinct relations, got '" + pair.rel_a + "' twice");
  }
  if (pair.rel_b < pair.rel_a) std::swap(pair.rel_a, pair.rel_b);
  return pair;
}

Json PairToJson(const AnalogousRelationPair& p) {
  return Json{{"rel_a", p.rel_a},
              {"rel_b", p.rel_b},
              {"meta_relation", p.meta_relation},
              {"provenance", ProvenanceName(p.provenance)},
              {"status", PairStatusName(p.status)}};
}

AnalogousRelationPair PairFromJson(const Json& j) {
  AnalogousRelationPair p;
  p.rel_a = j.at("rel_a").get<std::string>();
  p.rel_b = j.at("rel_b").get<std::string>();
  p.meta_relation = j.value("meta_relation", "");
  p.provenance = ParseProvenance(j.value("provenance", "auto"));
  p.status = ParsePairStatus(j.value("status", "pending"));
  return p;
}

std::string_view AnalogyKindName(AnalogyKind kind) {
  return kind == AnalogyKind::kSameRelation ? "same_relation" : "analogous_relations";
}

AnalogyKind ParseAnalogyKind(std::string_view name) {
  if (name == "same_relation" || name == "same") return AnalogyKind::kSameRelation;
  if (name == "analogous_relations" || name == "analogous") {
    return AnalogyKind::kAnalogousRelations;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown analogy kind '" + std::string(name) + "'");
}

Json AnalogyToJson(const Analogy& x) {
  return Json{{"a", x.a},
              {"b", x.b},
              {"c", x.c},
              {"d", x.d},
              {"kind", AnalogyKindName(x.kind)},
              {"relations", x.relation_ids}};
}

std::string RenderAnalogy(const Analogy& x) {
  return x.a + " is to " + x.b + " as " + x.c + " is to " + x.d;
}

namespace {

bool PairOrder(const ConceptPair& x, const ConceptPair& y) {
  if (x.popularity != y.popularity) return x.popularity > y.popularity;
  return std::tie(x.subject, x.object) < std::tie(y.subject, y.object);
}

std::string PairKey(std::string_view subject, std::string_view object) {
  std::string key = FoldCase(subject);
  key += '\t';
  key += FoldCase(object);
  return key;
}

}  // namespace

KnowledgeBase KnowledgeBase::Build(const std::vector<RawTriple>& triples,
                                   const std::vector<AnalogousRelationPair>& analogous) {
  struct Group {
    std::string label;
    Source source;
    std::map<std::pair<std::string, std::string>, double> pairs;
  };
  std::map<std::string, Group> groups;
  for (const RawTriple& t : triples) {
    const std::string id = RelationId(t.source, t.relation);
    auto [it, inserted] = groups.try_emplace(id, Group{t.relation, t.source, {}});
    if (t.subject == t.object) continue;
    auto [pit, fresh] = it->second.pairs.try_emplace({t.subject, t.object}, t.score);
    if (!fresh) pit->second = std::max(pit->second, t.score);
  }

  std::vector<Relation> relations;
  relations.reserve(groups.size());
  for (auto& [id, g] : groups) {
    Relation r{id, g.label, g.source, {}};
    r.pairs.reserve(g.pairs.size());
    for (auto& [so, pop] : g.pairs) r.pairs.push_back(ConceptPair{so.first, so.second, pop});
    std::sort(r.pairs.begin(), r.pairs.end(), PairOrder);
    relations.push_back(std::move(r));
  }

  KnowledgeBase kb;
  kb.relations_ = std::move(relations);
  kb.Index();

  std::vector<std::string> unresolved;
  auto resolve = [&](const std::string& name) -> std::optional<std::string> {
    if (kb.FindRelation(name) != nullptr) return name;
    auto ids = kb.IdsForLabel(name);
    if (ids.size() == 1) return ids.front();
    unresolved.push_back(ids.empty() ? name : name + " (ambiguous)");
    return std::nullopt;
  };
  std::map<std::pair<std::string, std::string>, AnalogousRelationPair> resolved;
  for (const auto& pair : analogous) {
    auto a = resolve(pair.rel_a);
    auto b = resolve(pair.rel_b);
    if (!a || !b) continue;
    AnalogousRelationPair p = pair;
    p.rel_a = *a;
    p.rel_b = *b;
    p = Canonical(std::move(p));
    resolved.insert_or_assign({p.rel_a, p.rel_b}, std::move(p));
  }
  if (!unresolved.empty()) {
    std::string msg = "analogous pairs reference unresolved relation labels:";
    for (const auto& u : unresolved) msg += " '" + u + "'";
    throw Error(ErrorCode::kNotFound, msg);
  }
  for (auto& [key, p] : resolved) kb.analogous_.push_back(std::move(p));
  kb.Index();
  return kb;
}

KnowledgeBase KnowledgeBase::FromParts(std::vector<Relation> relations,
                                       std::vector<AnalogousRelationPair> analogous) {
  KnowledgeBase kb;
  kb.relations_ = std::move(relations);
  std::sort(kb.relations_.begin(), kb.relations_.end(),
            [](const Relation& x, const Relation& y) { return x.id < y.id; });
  for (auto& r : kb.relations_) std::sort(r.pairs.begin(), r.pairs.end(), PairOrder);
  for (auto& p : analogous) kb.analogous_.push_back(Canonical(std::move(p)));
  std::sort(kb.analogous_.begin(), kb.analogous_.end(),
            [](const auto& x, const auto& y) {
              return std::tie(x.rel_a, x.rel_b) < std::tie(y.rel_a, y.rel_b);
            });
  kb.Index();
  return kb;
}

void KnowledgeBase::Index() {
  by_id_.clear();
  by_label_.clear();
  by_pair_key_.clear();
  popularity_.clear();
  analogous_index_.clear();
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const Relation& r = relations_[i];
    by_id_[r.id] = i;
    by_label_[r.label].push_back(r.id);
    for (const auto& p : r.pairs) {
      popularity_[r.id + '\t' + p.subject + '\t' + p.object] = p.popularity;
      auto& ids = by_pair_key_[PairKey(p.subject, p.object)];
      if (ids.empty() || ids.back() != r.id) ids.push_back(r.id);
    }
  }
  for (std::size_t i = 0; i < analogous_.size(); ++i) {
    analogous_index_[{analogous_[i].rel_a, analogous_[i].rel_b}] = i;
  }
}

const Relation* KnowledgeBase::FindRelation(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &relations_[it->second];
}

const Relation& KnowledgeBase::GetRelation(std::string_view id) const {
  const Relation* r = FindRelation(id);
  if (r == nullptr) throw Error(ErrorCode::kNotFound, "unknown relation '" + std::string(id) + "'");
  return *r;
}

std::vector<std::string> KnowledgeBase::IdsForLabel(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  return it == by_label_.end() ? std::vector<std::string>{} : it->second;
}

const AnalogousRelationPair* KnowledgeBase::FindAnalogousPair(std::string_view a,
                                                              std::string_view b) const {
  std::pair<std::string, std::string> key{std::string(a), std::string(b)};
  if (key.second < key.first) std::swap(key.first, key.second);
  auto it = analogous_index_.find(key);
  return it == analogous_index_.end() ? nullptr : &analogous_[it->second];
}

bool KnowledgeBase::AreAnalogous(std::string_view a, std::string_view b) const {
  const auto* p = FindAnalogousPair(a, b);
  return p != nullptr && p->status == PairStatus::kApproved;
}

std::vector<std::string> KnowledgeBase::AnalogousPartners(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& p : analogous_) {
    if (p.status != PairStatus::kApproved) continue;
    if (p.rel_a == id) out.push_back(p.rel_b);
    if (p.rel_b == id) out.push_back(p.rel_a);
  }
  return out;
}

std::optional<double> KnowledgeBase::PairPopularity(std::string_view id,
                                                    std::string_view subject,
                                                    std::string_view object) const {
  std::string key(id);
  key += '\t';
  key += subject;
  key += '\t';
  key += object;
  auto it = popularity_.find(key);
  if (it == popularity_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> KnowledgeBase::RelationsWithPair(std::string_view subject,
                                                          std::string_view object) const {
  auto it = by_pair_key_.find(PairKey(subject, object));
  return it == by_pair_key_.end() ? std::vector<std::string>{} : it->second;
}

namespace {

Analogy SameAnalogy(const Relation& r, std::size_t i, std::size_t j) {
  const ConceptPair* x = &r.pairs[i];
  const ConceptPair* y = &r.pairs[j];
  if (std::tie(y->subject, y->object) < std::tie(x->subject, x->object)) std::swap(x, y);
  return Analogy{x->subject, x->object, y->subject, y->object, AnalogyKind::kSameRelation,
                 {r.id}};
}

Analogy CrossAnalogy(const Relation& ra, const Relation& rb, std::size_t i, std::size_t j) {
  return Analogy{ra.pairs[i].subject, ra.pairs[i].object, rb.pairs[j].subject,
                 rb.pairs[j].object, AnalogyKind::kAnalogousRelations, {ra.id, rb.id}};
}

// Shell m of a relation: rank m combined with every better-ranked pair.
std::size_t SameShellCount(const Relation& r) { return r.pairs.size(); }

template <typename Emit>
void VisitSameShell(const Relation& r, std::size_t m, Emit&& emit) {
  if (m >= r.pairs.size()) return;
  for (std::size_t i = 0; i < m; ++i) emit(SameAnalogy(r, i, m));
}

// Shell m of a cross product: every (i, j) with max(i, j) == m, ordered by
// i then j.
std::size_t CrossShellCount(const Relation& a, const Relation& b) {
  if (a.pairs.empty() || b.pairs.empty()) return 0;
  return std::max(a.pairs.size(), b.pairs.size());
}

template <typename Emit>
void VisitCrossShell(const Relation& a, const Relation& b, std::size_t m, Emit&& emit) {
  const std::size_t na = a.pairs.size(), nb = b.pairs.size();
  if (m < nb) {
    for (std::size_t i = 0; i < std::min(m, na); ++i) emit(CrossAnalogy(a, b, i, m));
  }
  if (m < na) {
    for (std::size_t j = 0; j <= std::min(m, nb - 1) && nb > 0; ++j) {
      emit(CrossAnalogy(a, b, m, j));
    }
  }
}

}  // namespace

std::vector<Analogy> EnumerateSameRelation(const KnowledgeBase& kb,
                                           std::string_view relation_id,
                                           std::size_t limit) {
  const Relation& r = kb.GetRelation(relation_id);
  std::vector<Analogy> out;
  for (std::size_t m = 1; m < SameShellCount(r) && out.size() < limit; ++m) {
    VisitSameShell(r, m, [&](Analogy&& x) {
      if (out.size() < limit) out.push_back(std::move(x));
    });
  }
  return out;
}

std::vector<Analogy> EnumerateAnalogous(const KnowledgeBase& kb, std::string_view rel_a,
                                        std::string_view rel_b, std::size_t limit) {
  const AnalogousRelationPair* p = kb.FindAnalogousPair(rel_a, rel_b);
  if (p == nullptr) {
    throw Error(ErrorCode::kNotFound, "no analogous pair ('" + std::string(rel_a) + "', '" +
                                          std::string(rel_b) + "')");
  }
  if (p->status != PairStatus::kApproved) {
    throw Error(ErrorCode::kFailedPrecondition,
                "analogous pair ('" + p->rel_a + "', '" + p->rel_b + "') is not approved (" +
                    std::string(PairStatusName(p->status)) + ")");
  }
  const Relation& a = kb.GetRelation(p->rel_a);
  const Relation& b = kb.GetRelation(p->rel_b);
  std::vector<Analogy> out;
  for (std::size_t m = 0; m < CrossShellCount(a, b) && out.size() < limit; ++m) {
    VisitCrossShell(a, b, m, [&](Analogy&& x) {
      if (out.size() < limit) out.push_back(std::move(x));
    });
  }
  return out;
}

KbStats ComputeStats(const KnowledgeBase& kb) {
  KbStats s;
  for (const Relation& r : kb.relations()) {
    const std::string src(SourceName(r.source));
    const std::uint64_t n = r.pairs.size();
    s.pairs_by_source[src] += n;
    s.relations_by_source[src] += 1;
    s.relations += 1;
    s.concept_pairs += n;
    s.same_relation_analogies += n * (n == 0 ? 0 : n - 1) / 2;
  }
  for (const auto& p : kb.analogous_pairs()) {
    if (p.status != PairStatus::kApproved) continue;
    s.analogous_relation_pairs += 1;
    s.analogous_analogies += static_cast<std::uint64_t>(kb.GetRelation(p.rel_a).pairs.size()) *
                             kb.GetRelation(p.rel_b).pairs.size();
  }
  s.total_analogies = s.same_relation_analogies + s.analogous_analogies;
  return s;
}

Json StatsToJson(const KbStats& s) {
  return Json{{"relations", s.relations},
              {"concept_pairs", s.concept_pairs},
              {"relations_by_source", s.relations_by_source},
              {"pairs_by_source", s.pairs_by_source},
              {"analogous_relation_pairs", s.analogous_relation_pairs},
              {"analogies",
               {{"same_relation", s.same_relation_analogies},
                {"analogous_relations", s.analogous_analogies},
                {"total", s.total_analogies}}}};
}

SampleResult SampleAnalogies(const KnowledgeBase& kb, SampleKind kind, std::size_t n,
                             std::uint64_t seed) {
  struct Cross {
    const Relation* a;
    const Relation* b;
  };
  std::vector<const Relation*> same;
  std::vector<Cross> cross;
  std::size_t max_shell = 0;
  std::uint64_t derivable = 0;
  if (kind != SampleKind::kAnalogousRelations) {
    for (const auto& r : kb.relations()) {
      if (r.pairs.size() < 2) continue;
      same.push_back(&r);
      max_shell = std::max(max_shell, SameShellCount(r));
      derivable += static_cast<std::uint64_t>(r.pairs.size()) * (r.pairs.size() - 1) / 2;
    }
  }
  if (kind != SampleKind::kSameRelation) {
    for (const auto& p : kb.analogous_pairs()) {
      if (p.status != PairStatus::kApproved) continue;
      Cross c{&kb.GetRelation(p.rel_a), &kb.GetRelation(p.rel_b)};
      if (CrossShellCount(*c.a, *c.b) == 0) continue;
      cross.push_back(c);
      max_shell = std::max(max_shell, CrossShellCount(*c.a, *c.b));
      derivable += static_cast<std::uint64_t>(c.a->pairs.size()) * c.b->pairs.size();
    }
  }

  SampleResult result;
  result.short_of_request = derivable < n;
  Rng rng(seed);
  for (std::size_t band_start = 0; band_start < max_shell && result.analogies.size() < n;
       band_start += kSampleBandWidth) {
    std::vector<Analogy> band;
    const std::size_t band_end = std::min(band_start + kSampleBandWidth, max_shell);
    auto emit = [&](Analogy&& x) { band.push_back(std::move(x)); };
    for (const Relation* r : same) {
      for (std::size_t m = band_start; m < band_end; ++m) VisitSameShell(*r, m, emit);
    }
    for (const Cross& c : cross) {
      for (std::size_t m = band_start; m < band_end; ++m) VisitCrossShell(*c.a, *c.b, m, emit);
    }
    const std::size_t need = n - result.analogies.size();
    if (band.size() <= need) {
      for (auto& x : band) result.analogies.push_back(std::move(x));
      continue;
    }
    // Partial Fisher-Yates picks `need` distinct positions; emitting them in
    // band order keeps the output independent of the draw order.
    std::vector<std::size_t> positions(band.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (std::size_t i = 0; i < need; ++i) {
      std::swap(positions[i], positions[i + rng.Uniform(positions.size() - i)]);
    }
    positions.resize(need);
    std::sort(positions.begin(), positions.end());
    for (std::size_t pos : positions) result.analogies.push_back(std::move(band[pos]));
  }
  return result;
}

void SaveKb(const KnowledgeBase& kb, const std::filesystem::path& dir,
            const KbManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::string relations, pairs, analogous;
  std::uint64_t n_pairs = 0, n_approved = 0;
  for (const Relation& r : kb.relations()) {
    relations += Json{{"id", r.id},
                      {"label", r.label},
                      {"source", SourceName(r.source)},
                      {"pair_count", r.pairs.size()}}
                     .dump();
    relations += '\n';
    for (const ConceptPair& p : r.pairs) {
      pairs += Json{{"relation_id", r.id},
                    {"subject", p.subject},
                    {"object", p.object},
                    {"popularity", p.popularity}}
                   .dump();
      pairs += '\n';
      ++n_pairs;
    }
  }
  for (const auto& p : kb.analogous_pairs()) {
    analogous += PairToJson(p).dump();
    analogous += '\n';
    if (p.status == PairStatus::kApproved) ++n_approved;
  }
  Json m{{"format", "analogy-kb/1"},
         {"built_at", manifest.built_at},
         {"counts",
          {{"relations", kb.relations().size()},
           {"concept_pairs", n_pairs},
           {"analogous_pairs", kb.analogous_pairs().size()},
           {"approved_analogous_pairs", n_approved}}},
         {"source_hashes", manifest.source_hashes}};
  WriteFile(dir / "relations.jsonl", relations);
  WriteFile(dir / "pairs.jsonl", pairs);
  WriteFile(dir / "analogous_pairs.jsonl", analogous);
  WriteFile(dir / "manifest.json", m.dump(2) + "\n");
}

KnowledgeBase LoadKb(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "manifest.json")) {
    throw Error(ErrorCode::kNotFound, "no KB at " + dir.string() + " (manifest.json missing)");
  }
  try {
    std::vector<Relation> relations;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::uint64_t> expected;
    for (const Json& row : ReadJsonLines(dir / "relations.jsonl")) {
      Relation r;
      r.id = row.at("id").get<std::string>();
      r.label = row.at("label").get<std::string>();
      r.source = ParseSource(row.at("source").get<std::string>());
      expected[r.id] = row.value("pair_count", std::uint64_t{0});
      index[r.id] = relations.size();
      relations.push_back(std::move(r));
    }
    for (const Json& row : ReadJsonLines(dir / "pairs.jsonl")) {
      const std::string id = row.at("relation_id").get<std::string>();
      auto it = index.find(id);
      if (it == index.end()) {
        throw Error(ErrorCode::kDataLoss, "pairs.jsonl references unknown relation '" + id + "'");
      }
      relations[it->second].pairs.push_back(ConceptPair{row.at("subject").get<std::string>(),
                                                        row.at("object").get<std::string>(),
                                                        row.at("popularity").get<double>()});
    }
    for (const auto& r : relations) {
      if (r.pairs.size() != expected[r.id]) {
        throw Error(ErrorCode::kDataLoss, "relation '" + r.id + "' declares " +
                                              std::to_string(expected[r.id]) + " pairs, found " +
                                              std::to_string(r.pairs.size()));
      }
    }
    std::vector<AnalogousRelationPair> analogous;
    for (const Json& row : ReadJsonLines(dir / "analogous_pairs.jsonl")) {
      analogous.push_back(PairFromJson(row));
    }
    return KnowledgeBase::FromParts(std::move(relations), std::move(analogous));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kDataLoss, "corrupt KB at " + dir.string() + ": " + e.what());
  }
}

}  // namespace analogy
