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

#include "analogy/dataset_gen.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <tuple>
#include <unordered_map>

#include "analogy/error.h"
#include "analogy/kg_ingest.h"

namespace analogy {

namespace {

std::string Numbered(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06zu", prefix, n);
  return buf;
}

std::string PairKey(std::string_view s, std::string_view o) {
  return FoldCase(s) + '\t' + FoldCase(o);
}

// Relations a distractor may come from, for one query relation.
std::vector<const Relation*> DistractorRelations(const KnowledgeBase& kb,
                                                 const std::string& query_relation) {
  const Relation& query = kb.GetRelation(query_relation);
  std::vector<const Relation*> out;
  for (const Relation& r : kb.relations()) {
    if (r.pairs.empty() || r.id == query.id || r.label == query.label) continue;
    if (kb.AreAnalogous(query.id, r.id)) continue;
    out.push_back(&r);
  }
  return out;
}

}  // namespace

std::string RenderGenPrompt(const GenItem& item) {
  return item.a + " is to " + item.b + " as " + item.c + " is to";
}

RecognitionDataset MakeRecognitionDataset(const KnowledgeBase& kb,
                                          const RecognitionOptions& options) {
  if (kb.relations().size() < 5) {
    throw Error(ErrorCode::kFailedPrecondition,
                "recognition data needs a KB with >= 5 relations to source distractors, got " +
                    std::to_string(kb.relations().size()));
  }
  const SampleResult same =
      SampleAnalogies(kb, SampleKind::kSameRelation, options.n_same, options.seed);
  const SampleResult cross = SampleAnalogies(kb, SampleKind::kAnalogousRelations,
                                             options.n_analogous, options.seed ^ 0x5eedULL);
  std::vector<const Analogy*> queries;
  for (const auto& x : same.analogies) queries.push_back(&x);
  for (const auto& x : cross.analogies) queries.push_back(&x);

  RecognitionDataset out;
  out.short_of_request = same.short_of_request || cross.short_of_request;
  std::unordered_map<std::string, std::vector<const Relation*>> eligible_cache;

  for (std::size_t q = 0; q < queries.size(); ++q) {
    const Analogy& analogy = *queries[q];
    Rng rng = Rng::ForItem(options.seed, q);

    McqaItem item;
    item.kind = analogy.kind;
    ConceptPair query{analogy.a, analogy.b,
                      kb.PairPopularity(analogy.relation_ids.front(), analogy.a, analogy.b).value_or(0)};
    ConceptPair answer{analogy.c, analogy.d,
                       kb.PairPopularity(analogy.relation_ids.back(), analogy.c, analogy.d).value_or(0)};
    std::string query_rel = analogy.relation_ids.front();
    std::string answer_rel = analogy.relation_ids.back();
    if (rng.Uniform(2) == 1) {
      std::swap(query, answer);
      std::swap(query_rel, answer_rel);
    }
    const std::set<std::string> query_concepts{FoldCase(query.subject), FoldCase(query.object)};
    item.shared_concept = query_concepts.count(FoldCase(answer.subject)) > 0 ||
                          query_concepts.count(FoldCase(answer.object)) > 0;
    if (item.shared_concept && options.exclude_shared_concepts) {
      ++out.excluded_shared_concept;
      continue;
    }

    auto [it, fresh] = eligible_cache.try_emplace(query_rel);
    if (fresh) it->second = DistractorRelations(kb, query_rel);
    const auto& eligible = it->second;

    // A distractor pair must not live in any relation holding the query pair
    // or in one of their analogous partners, otherwise it would be a second
    // answer.
    std::set<std::string> answer_relations{query_rel};
    for (auto& holder : kb.RelationsWithPair(query.subject, query.object)) answer_relations.insert(holder);
    for (const auto& r : std::set<std::string>(answer_relations)) {
      for (auto& partner : kb.AnalogousPartners(r)) answer_relations.insert(partner);
    }
    std::set<std::string> used{PairKey(query.subject, query.object),
                               PairKey(answer.subject, answer.object)};

    std::vector<std::pair<ConceptPair, std::string>> distractors;
    for (int attempt = 0; attempt < options.max_distractor_attempts && distractors.size() < 3 &&
                          !eligible.empty();
         ++attempt) {
      const Relation& r = *eligible[rng.Uniform(eligible.size())];
      const ConceptPair& p = r.pairs[rng.Uniform(r.pairs.size())];
      if (!used.insert(PairKey(p.subject, p.object)).second) continue;
      bool also_answer = false;
      for (const auto& holder : kb.RelationsWithPair(p.subject, p.object)) {
        also_answer = also_answer || answer_relations.count(holder) > 0;
      }
      if (also_answer) continue;
      distractors.emplace_back(p, r.id);
    }
    if (distractors.size() < 3) {
      ++out.skipped_queries;
      continue;
    }

    std::vector<std::pair<ConceptPair, std::string>> slots{{answer, answer_rel}};
    for (auto& d : distractors) slots.push_back(std::move(d));
    std::vector<std::size_t> order{0, 1, 2, 3};
    rng.Shuffle(order);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      if (order[pos] == 0) item.answer_index = pos;
      item.candidates.push_back(slots[order[pos]].first);
      item.candidate_relations.push_back(slots[order[pos]].second);
    }
    item.query = std::move(query);
    item.query_relation = query_rel;
    item.answer_relation = answer_rel;
    item.id = Numbered("mcqa", out.items.size());
    out.items.push_back(std::move(item));
  }
  return out;
}

GenItem ToGenItem(const KnowledgeBase& kb, const Analogy& analogy) {
  GenItem item{"", analogy.a, analogy.b, analogy.c, analogy.d, analogy.kind, analogy.relation_ids};
  const double first =
      kb.PairPopularity(analogy.relation_ids.front(), analogy.a, analogy.b).value_or(0);
  const double second =
      kb.PairPopularity(analogy.relation_ids.back(), analogy.c, analogy.d).value_or(0);
  if (first > second) {
    item = GenItem{"", analogy.c, analogy.d, analogy.a, analogy.b, analogy.kind,
                   {analogy.relation_ids.rbegin(), analogy.relation_ids.rend()}};
  }
  return item;
}

GenerationDataset MakeGenerationDataset(const KnowledgeBase& kb, std::size_t n,
                                        std::uint64_t seed) {
  const SampleResult sample = SampleAnalogies(kb, SampleKind::kAny, n, seed);
  GenerationDataset out;
  out.short_of_request = sample.short_of_request;
  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
  for (const auto& analogy : sample.analogies) {
    GenItem item = ToGenItem(kb, analogy);
    if (!seen.insert({item.a, item.b, item.c, item.target_d}).second) continue;
    item.id = Numbered("gen", out.items.size());
    out.items.push_back(std::move(item));
  }
  return out;
}

Json McqaToJson(const McqaItem& item) {
  Json candidates = Json::array(), texts = Json::array();
  for (const auto& c : item.candidates) {
    candidates.push_back({{"c", c.subject}, {"d", c.object}});
    texts.push_back(c.subject + " is to " + c.object);
  }
  return Json{{"id", item.id},
              {"query", {{"a", item.query.subject}, {"b", item.query.object}}},
              {"candidates", candidates},
              {"answer", item.answer_index},
              {"kind", AnalogyKindName(item.kind)},
              {"relations",
               {{"query", item.query_relation},
                {"answer", item.answer_relation},
                {"candidates", item.candidate_relations}}},
              {"shared_concept", item.shared_concept},
              {"text",
               {{"query", item.query.subject + " is to " + item.query.object},
                {"candidates", texts}}}};
}

McqaItem McqaFromJson(const Json& j) {
  McqaItem item;
  item.id = j.value("id", "");
  item.query = ConceptPair{j.at("query").at("a").get<std::string>(),
                           j.at("query").at("b").get<std::string>(), 0.0};
  for (const auto& c : j.at("candidates")) {
    item.candidates.push_back(ConceptPair{c.at("c").get<std::string>(), c.at("d").get<std::string>(), 0.0});
  }
  if (item.candidates.size() != kMcqaCandidates) {
    throw Error(ErrorCode::kDataLoss, "MCQA item " + item.id + " does not have 4 candidates");
  }
  item.answer_index = j.at("answer").get<std::size_t>();
  if (item.answer_index >= kMcqaCandidates) {
    throw Error(ErrorCode::kDataLoss, "MCQA item " + item.id + " has answer out of range");
  }
  item.kind = ParseAnalogyKind(j.value("kind", "same_relation"));
  if (j.contains("relations")) {
    const Json& r = j["relations"];
    item.query_relation = r.value("query", "");
    item.answer_relation = r.value("answer", "");
    if (r.contains("candidates")) {
      item.candidate_relations = r["candidates"].get<std::vector<std::string>>();
    }
  }
  item.shared_concept = j.value("shared_concept", false);
  return item;
}

Json GenToJson(const GenItem& item) {
  return Json{{"id", item.id},
              {"a", item.a},
              {"b", item.b},
              {"c", item.c},
              {"d", item.target_d},
              {"kind", AnalogyKindName(item.kind)},
              {"relations", item.relation_ids},
              {"text", RenderGenPrompt(item)}};
}

GenItem GenFromJson(const Json& j) {
  GenItem item;
  item.id = j.value("id", "");
  item.a = j.at("a").get<std::string>();
  item.b = j.at("b").get<std::string>();
  item.c = j.at("c").get<std::string>();
  item.target_d = j.at("d").get<std::string>();
  item.kind = ParseAnalogyKind(j.value("kind", "same_relation"));
  if (j.contains("relations")) item.relation_ids = j["relations"].get<std::vector<std::string>>();
  return item;
}

std::vector<McqaItem> ReadMcqa(const std::filesystem::path& path) {
  std::vector<McqaItem> out;
  for (const Json& row : ReadJsonLines(path)) {
    try {
      out.push_back(McqaFromJson(row));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": bad MCQA item: " + e.what());
    }
  }
  return out;
}

std::vector<GenItem> ReadGen(const std::filesystem::path& path) {
  std::vector<GenItem> out;
  for (const Json& row : ReadJsonLines(path)) {
    try {
      out.push_back(GenFromJson(row));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": bad generation item: " + e.what());
    }
  }
  return out;
}

namespace {

std::optional<std::pair<std::string, std::string>> SplitPair(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || text.find(':', colon + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  const auto x = Trim(text.substr(0, colon));
  const auto y = Trim(text.substr(colon + 1));
  if (x.empty() || y.empty()) return std::nullopt;
  return std::pair<std::string, std::string>{std::string(x), std::string(y)};
}

std::optional<ExternalItem> ParseExternalLine(std::string_view line) {
  if (line.front() == '{') {
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object() || !j.contains("stem") || !j.contains("choice") || !j.contains("answer")) {
      return std::nullopt;
    }
    try {
      const auto stem = j["stem"].get<std::vector<std::string>>();
      const auto choices = j["choice"].get<std::vector<std::vector<std::string>>>();
      const auto answer = j["answer"].get<std::size_t>();
      if (stem.size() != 2 || answer >= choices.size() || choices[answer].size() != 2) {
        return std::nullopt;
      }
      ExternalItem item{std::string(Trim(stem[0])), std::string(Trim(stem[1])),
                        std::string(Trim(choices[answer][0])), std::string(Trim(choices[answer][1]))};
      if (item.a.empty() || item.b.empty() || item.c.empty() || item.d.empty()) return std::nullopt;
      return item;
    } catch (const Json::exception&) {
      return std::nullopt;
    }
  }
  const auto sep = line.find("::");
  if (sep == std::string_view::npos) return std::nullopt;
  const auto stem = SplitPair(line.substr(0, sep));
  std::string_view rest = line.substr(sep + 2);
  if (!stem) return std::nullopt;

  const auto tab = rest.find('\t');
  if (tab == std::string_view::npos) {
    const auto target = SplitPair(rest);
    if (!target) return std::nullopt;
    return ExternalItem{stem->first, stem->second, target->first, target->second};
  }
  std::string_view choices_text = rest.substr(0, tab);
  const std::string_view answer_text = Trim(rest.substr(tab + 1));
  std::vector<std::pair<std::string, std::string>> choices;
  std::size_t start = 0;
  while (true) {
    const auto bar = choices_text.find('|', start);
    auto choice = SplitPair(choices_text.substr(start, bar == std::string_view::npos ? bar : bar - start));
    if (!choice) return std::nullopt;
    choices.push_back(std::move(*choice));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  std::size_t answer = 0;
  auto [ptr, ec] = std::from_chars(answer_text.data(), answer_text.data() + answer_text.size(), answer);
  if (answer_text.empty() || ec != std::errc() || ptr != answer_text.data() + answer_text.size() ||
      answer >= choices.size()) {
    return std::nullopt;
  }
  return ExternalItem{stem->first, stem->second, choices[answer].first, choices[answer].second};
}

}  // namespace

ExternalSet ParseExternal(std::string_view text) {
  ExternalSet set;
  for (std::string_view line : SplitLines(text)) {
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (auto item = ParseExternalLine(line)) {
      set.items.push_back(std::move(*item));
    } else {
      ++set.malformed;
    }
  }
  return set;
}

ExternalSet LoadExternal(const std::filesystem::path& path) { return ParseExternal(ReadFile(path)); }

OverlapResult ComputeOverlap(const KnowledgeBase& kb, const ExternalSet& external) {
  if (external.items.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "overlap rate undefined for an empty external set");
  }
  OverlapResult result;
  result.skipped = external.malformed;
  for (const auto& item : external.items) {
    const auto first = kb.RelationsWithPair(item.a, item.b);
    const auto second = kb.RelationsWithPair(item.c, item.d);
    bool overlaps = false;
    for (const auto& r1 : first) {
      for (const auto& r2 : second) overlaps = overlaps || r1 == r2 || kb.AreAnalogous(r1, r2);
    }
    if (overlaps) result.overlapping.push_back(item);
  }
  result.rate = static_cast<double>(result.overlapping.size()) /
                static_cast<double>(external.items.size());
  return result;
}

namespace {

// Order-free key of an analogy's two pairs.
std::string TupleKey(std::string_view a, std::string_view b, std::string_view c, std::string_view d) {
  std::string x = PairKey(a, b), y = PairKey(c, d);
  if (y < x) std::swap(x, y);
  return x + '\n' + y;
}

std::set<std::string> TestKeys(const std::vector<ExternalSet>& tests) {
  std::set<std::string> keys;
  for (const auto& set : tests) {
    for (const auto& item : set.items) keys.insert(TupleKey(item.a, item.b, item.c, item.d));
  }
  return keys;
}

}  // namespace

std::vector<McqaItem> ExcludeOverlap(const std::vector<McqaItem>& train,
                                     const std::vector<ExternalSet>& tests) {
  const auto keys = TestKeys(tests);
  std::vector<McqaItem> out;
  for (const auto& item : train) {
    const ConceptPair& answer = item.candidates.at(item.answer_index);
    if (!keys.count(TupleKey(item.query.subject, item.query.object, answer.subject, answer.object))) {
      out.push_back(item);
    }
  }
  return out;
}

std::vector<GenItem> ExcludeOverlap(const std::vector<GenItem>& train,
                                    const std::vector<ExternalSet>& tests) {
  const auto keys = TestKeys(tests);
  std::vector<GenItem> out;
  for (const auto& item : train) {
    if (!keys.count(TupleKey(item.a, item.b, item.c, item.target_d))) out.push_back(item);
  }
  return out;
}

}  // namespace analogy
