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

#include <set>

#include "analogy/dataset_gen.h"
#include "analogy/error.h"
#include "doctest.h"
#include "test_support.h"

using namespace analogy;

namespace {

// Relations r0..r{n-1} over a shared vocabulary so that some concept pairs
// sit in more than one relation. r0~r1 and r2~r3 are approved partners.
KnowledgeBase SyntheticKb(std::uint64_t seed, int relations = 12, int pairs = 15) {
  Rng rng(seed);
  std::vector<RawTriple> triples;
  for (int r = 0; r < relations; ++r) {
    for (int p = 0; p < pairs; ++p) {
      const auto s = "c" + std::to_string(rng.Uniform(60));
      const auto o = "c" + std::to_string(rng.Uniform(60));
      triples.push_back({s, "rel" + std::to_string(r), o, static_cast<double>(rng.Uniform(1000)),
                         Source::kWikidata});
    }
  }
  const auto id = [](int r) { return RelationId(Source::kWikidata, "rel" + std::to_string(r)); };
  std::vector<AnalogousRelationPair> analogous{
      {id(0), id(1), "m01", Provenance::kAuto, PairStatus::kApproved},
      {id(2), id(3), "m23", Provenance::kAuto, PairStatus::kApproved},
      {id(4), id(5), "m45", Provenance::kAuto, PairStatus::kRejected}};
  analogous.resize(std::min<std::size_t>(analogous.size(), relations / 2));
  return KnowledgeBase::Build(triples, analogous);
}

bool HoldsIn(const KnowledgeBase& kb, const ConceptPair& p, const std::set<std::string>& relations) {
  for (const auto& r : kb.RelationsWithPair(p.subject, p.object)) {
    if (relations.count(r)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("every MCQA item has exactly one valid answer") {
  std::array<std::size_t, kMcqaCandidates> positions{};
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const KnowledgeBase kb = SyntheticKb(seed);
    const auto data = MakeRecognitionDataset(kb, {200, 200, seed});
    for (const auto& item : data.items) {
      REQUIRE(item.candidates.size() == kMcqaCandidates);
      REQUIRE(item.candidate_relations.size() == kMcqaCandidates);
      std::set<std::string> answer_relations{item.query_relation};
      for (const auto& p : kb.AnalogousPartners(item.query_relation)) answer_relations.insert(p);
      CHECK(answer_relations.count(item.answer_relation) == 1);
      std::size_t valid = 0;
      for (std::size_t i = 0; i < kMcqaCandidates; ++i) {
        if (HoldsIn(kb, item.candidates[i], answer_relations)) {
          ++valid;
          CHECK(i == item.answer_index);
        }
      }
      CHECK(valid == 1);
      std::set<std::string> distinct;
      for (const auto& c : item.candidates) distinct.insert(FoldCase(c.subject) + "\t" + FoldCase(c.object));
      CHECK(distinct.size() == kMcqaCandidates);
      ++positions[item.answer_index];
      ++total;
    }
  }
  REQUIRE(total >= 1000);
  for (auto n : positions) {
    const double share = static_cast<double>(n) / static_cast<double>(total);
    CHECK(share >= 0.20);
    CHECK(share <= 0.30);
  }
}

TEST_CASE("recognition data is deterministic per seed") {
  const KnowledgeBase kb = SyntheticKb(9);
  const auto x = MakeRecognitionDataset(kb, {50, 50, 4});
  const auto y = MakeRecognitionDataset(kb, {50, 50, 4});
  const auto z = MakeRecognitionDataset(kb, {50, 50, 5});
  CHECK(x.items == y.items);
  CHECK_FALSE(x.items == z.items);
  CHECK(x.items.front().id == "mcqa-000000");
}

TEST_CASE("shared-concept queries can be excluded") {
  const KnowledgeBase kb = SyntheticKb(2, 12, 40);
  RecognitionOptions options{300, 300, 1};
  const auto all = MakeRecognitionDataset(kb, options);
  options.exclude_shared_concepts = true;
  const auto filtered = MakeRecognitionDataset(kb, options);
  std::size_t shared = 0;
  for (const auto& item : all.items) shared += item.shared_concept;
  CHECK(shared > 0);
  CHECK(filtered.excluded_shared_concept > 0);
  for (const auto& item : filtered.items) CHECK_FALSE(item.shared_concept);
}

TEST_CASE("recognition data needs enough relations") {
  const KnowledgeBase kb = SyntheticKb(1, 4);
  try {
    MakeRecognitionDataset(kb, {10, 10, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFailedPrecondition);
  }
}

TEST_CASE("requests beyond the KB are flagged") {
  const KnowledgeBase kb = SyntheticKb(3, 6, 3);
  const auto data = MakeRecognitionDataset(kb, {100000, 100000, 0});
  CHECK(data.short_of_request);
  const auto gen = MakeGenerationDataset(kb, 100000, 0);
  CHECK(gen.short_of_request);
}

TEST_CASE("generation items put the less popular pair last") {
  const KnowledgeBase kb = SyntheticKb(4);
  const auto data = MakeGenerationDataset(kb, 300, 11);
  CHECK(data.items.size() == 300);
  std::set<std::string> seen;
  for (const auto& item : data.items) {
    const double first = kb.PairPopularity(item.relation_ids.front(), item.a, item.b).value();
    const double second = kb.PairPopularity(item.relation_ids.back(), item.c, item.target_d).value();
    CHECK(first <= second);
    CHECK(seen.insert(item.a + "|" + item.b + "|" + item.c + "|" + item.target_d).second);
  }
  CHECK(data.items.front().id == "gen-000000");
  CHECK(RenderGenPrompt(data.items.front()) ==
        data.items.front().a + " is to " + data.items.front().b + " as " + data.items.front().c + " is to");
}

TEST_CASE("dataset json round trip") {
  const KnowledgeBase kb = SyntheticKb(5);
  testing::TempDir dir;
  const auto mcqa = MakeRecognitionDataset(kb, {20, 20, 0}).items;
  std::vector<Json> rows;
  for (const auto& item : mcqa) rows.push_back(McqaToJson(item));
  WriteFile(dir / "r.jsonl", ToJsonLines(rows));
  const auto back = ReadMcqa(dir / "r.jsonl");
  REQUIRE(back.size() == mcqa.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].answer_index == mcqa[i].answer_index);
    CHECK(back[i].candidates[back[i].answer_index].subject == mcqa[i].candidates[mcqa[i].answer_index].subject);
    CHECK(back[i].candidate_relations == mcqa[i].candidate_relations);
  }
  const auto gen = MakeGenerationDataset(kb, 10, 0).items;
  rows.clear();
  for (const auto& item : gen) rows.push_back(GenToJson(item));
  WriteFile(dir / "g.jsonl", ToJsonLines(rows));
  CHECK(ReadGen(dir / "g.jsonl") == gen);

  WriteFile(dir / "bad.jsonl", R"({"query":{"a":"x","b":"y"},"candidates":[],"answer":0})" "\n");
  CHECK_THROWS_AS(ReadMcqa(dir / "bad.jsonl"), Error);
}

TEST_CASE("external analogy formats") {
  const auto set = ParseExternal(
      "# comment\n"
      "hot:cold::big:small\n"
      "dog:puppy::cat:kitten|cow:calf|x:y\t1\n"
      R"({"stem": ["wheel", "car"], "choice": [["page", "book"], ["leaf", "tree"]], "answer": 0})" "\n"
      "broken line\n"
      "a:b::c:d|e:f\t7\n"
      "a:b:c::d:e\n");
  REQUIRE(set.items.size() == 3);
  CHECK(set.items[0].d == "small");
  CHECK(set.items[1].c == "cow");
  CHECK(set.items[2].c == "page");
  CHECK(set.malformed == 3);
}

TEST_CASE("overlap finds planted collisions") {
  std::vector<RawTriple> triples{
      {"hot", "Antonym", "cold", 3, Source::kConceptNet},   {"big", "Antonym", "small", 3, Source::kConceptNet},
      {"wheel", "PartOf", "car", 3, Source::kConceptNet},   {"page", "PartOf", "book", 3, Source::kConceptNet},
      {"x", "author", "y", 1, Source::kWikidata},           {"u", "composer", "v", 1, Source::kWikidata},
      {"dog", "IsA", "animal", 3, Source::kConceptNet},
  };
  const auto author = RelationId(Source::kWikidata, "author");
  const auto composer = RelationId(Source::kWikidata, "composer");
  const KnowledgeBase kb =
      KnowledgeBase::Build(triples, {{author, composer, "creator", Provenance::kAuto, PairStatus::kApproved}});
  const auto external = ParseExternal(
      "Hot:Cold::big:small\n"       // same relation, case folded
      "x:y::u:v\n"                  // approved analogous relations
      "wheel:car::dog:animal\n"     // unrelated relations
      "sun:moon::day:night\n"       // unknown concepts
      "cold:hot::small:big\n");     // reversed direction is not in the KB
  const auto result = ComputeOverlap(kb, external);
  REQUIRE(result.overlapping.size() == 2);
  CHECK(result.overlapping[0].a == "Hot");
  CHECK(result.overlapping[1].a == "x");
  CHECK(result.rate == doctest::Approx(0.4));
  CHECK_THROWS_AS(ComputeOverlap(kb, ExternalSet{}), Error);
}

TEST_CASE("exclude overlap drops train items seen in a test set") {
  const std::vector<GenItem> train{{"g0", "hot", "cold", "big", "small", AnalogyKind::kSameRelation, {}},
                                   {"g1", "wheel", "car", "page", "book", AnalogyKind::kSameRelation, {}}};
  const std::vector<ExternalSet> tests{ParseExternal("BIG:small::hot:cold\n")};
  const auto kept = ExcludeOverlap(train, tests);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "g1");

  McqaItem item;
  item.query = {"hot", "cold", 0};
  item.candidates = {{"a", "b", 0}, {"big", "small", 0}, {"c", "d", 0}, {"e", "f", 0}};
  item.answer_index = 1;
  CHECK(ExcludeOverlap(std::vector<McqaItem>{item}, tests).empty());
  item.answer_index = 0;
  CHECK(ExcludeOverlap(std::vector<McqaItem>{item}, tests).size() == 1);
}
