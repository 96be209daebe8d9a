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

// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "analogy/analogy_kb.h"
#include "analogy/curation.h"
#include "analogy/dataset_gen.h"
#include "analogy/error.h"
#include "analogy/eval_harness.h"
#include "analogy/kg_ingest.h"
#include "analogy/llm_filter.h"
#include "analogy/pipeline.h"
#include "analogy/relation_linker.h"
#include "test_support.h"

namespace fs = std::filesystem;
using namespace analogy;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few mismatches of one criterion.
class Check {
 public:
  void Expect(bool cond, const std::string& what) {
    if (cond) return;
    if (failures_++ < 3) detail_ += (detail_.empty() ? "" : "; ") + what;
  }
  Outcome Done(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " mismatches: " + detail_};
  }

 private:
  int failures_ = 0;
  std::string detail_;
};

std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = ReadFile(entry.path());
  }
  return files;
}

std::string Last(std::string_view text, std::string_view marker, char stop) {
  const auto pos = text.rfind(marker);
  if (pos == std::string_view::npos) return {};
  const auto start = pos + marker.size();
  return std::string(text.substr(start, text.find(stop, start) - start));
}

// ---------------------------------------------------------------------------

void RunFixturePipeline(const fs::path& out) {
  PipelineConfig c = LoadConfig(testing::Fixture("pipeline/config.json"));
  c.out_dir = out;
  RunIngest(c);
  RunLink(c, out / kTriplesFile);
  RunLlmFilter(c, out / kCandidatesFile);
  RunEnqueue(c, out / kPendingFile, out / kCandidatesFile, out / kTriplesFile, out / kDecisionsFile);
  {
    ReviewStore store(AnnotatorRegistry::Load(c.annotators), {}, out / kDecisionsFile);
    for (const Json& row : Json::parse(ReadFile(testing::Fixture("pipeline/review.json")))) {
      const auto id = ReviewItemId(row["rel_a"], row["rel_b"]);
      for (const auto& d : row["decisions"]) store.SubmitDecision(id, d[0], ParseVerdict(d[1].get<std::string>()));
    }
  }
  RunBuildKb(c, out / kTriplesFile, ApprovedSource{out / kDecisionsFile, std::nullopt});
}

Outcome EndToEnd() {
  ::setenv("SOURCE_DATE_EPOCH", "1767225600", 1);
  testing::TempDir dir;
  const fs::path out = dir / "run";
  const auto start = std::chrono::steady_clock::now();
  RunFixturePipeline(out);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Check check;
  check.Expect(ReadFile(out / kPendingFile) == ReadFile(testing::Fixture("pipeline/expected_candidates.jsonl")),
               "pending pairs differ from golden");
  check.Expect(ReadFile(out / kApprovedFile) == ReadFile(testing::Fixture("pipeline/expected_approved.jsonl")),
               "approved pairs differ from golden");
  const auto first = Snapshot(out);
  fs::remove_all(out);
  RunFixturePipeline(out);
  const auto second = Snapshot(out);
  check.Expect(first.size() == second.size(), "rerun wrote a different file set");
  for (const auto& [name, bytes] : first) {
    auto it = second.find(name);
    check.Expect(it != second.end() && it->second == bytes, "rerun changed " + name);
  }
  check.Expect(seconds < 10.0, "runtime " + std::to_string(seconds) + " s");
  std::ostringstream s;
  s << first.size() << " files byte-identical across reruns, " << seconds << " s";
  return check.Done(s.str());
}

// ---------------------------------------------------------------------------

std::string Term(std::string_view uri) {
  uri.remove_prefix(std::string_view("/c/en/").size());
  std::string t(uri.substr(0, uri.find('/')));
  std::replace(t.begin(), t.end(), '_', ' ');
  return t;
}

Outcome IngestionThreshold() {
  const fs::path path = testing::Fixture("pipeline/conceptnet.csv");
  std::set<std::tuple<std::string, std::string, std::string>> expected;
  std::size_t boundary = 0;
  for (std::string_view line : SplitLines(ReadFile(path))) {
    const auto cols = SplitTabs(line);
    if (cols.size() != 5) continue;
    const Json meta = Json::parse(cols[4], nullptr, false);
    if (!meta.is_object() || !meta.contains("weight")) continue;
    if (cols[1].rfind("/r/", 0) != 0 || cols[2].rfind("/c/en/", 0) != 0 || cols[3].rfind("/c/en/", 0) != 0) continue;
    if (Term(cols[2]).empty() || Term(cols[3]).empty()) continue;
    const double w = meta["weight"].get<double>();
    if (w == 2.0) ++boundary;
    if (w > 2.0) expected.insert({std::string(cols[1].substr(3)), Term(cols[2]), Term(cols[3])});
  }
  std::istringstream in(ReadFile(path));
  const auto result = ParseConceptNet(in, {});
  std::set<std::tuple<std::string, std::string, std::string>> kept;
  Check check;
  for (const auto& t : result.triples) {
    kept.insert({t.relation, t.subject, t.object});
    check.Expect(t.score > 2.0, t.subject + "/" + t.object + " kept at weight " + std::to_string(t.score));
  }
  check.Expect(kept == expected, "kept set differs from independent parse");
  check.Expect(boundary >= 1, "fixture lacks a weight = 2.0 boundary line");
  return check.Done(std::to_string(kept.size()) + " kept, " + std::to_string(boundary) +
                    " boundary lines at 2.0 dropped");
}

// ---------------------------------------------------------------------------

// Answers selection and meta prompts from a fixed script keyed by label.
class ScriptBackend : public LlmBackend {
 public:
  std::map<std::string, std::string> selection;  // query label -> reply
  std::map<std::pair<std::string, std::string>, std::string> meta;  // sorted labels -> reply

  std::string Complete(const std::string& prompt) override {
    if (prompt.rfind("Choose", 0) == 0) return selection.at(Last(prompt, "Given relation: ", '\n'));
    std::string a = Last(prompt, "The relation [", ']');
    std::string b = Last(prompt, "and the relation [", ']');
    if (b < a) std::swap(a, b);
    return meta.at({a, b});
  }
  std::string model() const override { return "script"; }
};

struct ScriptedRun {
  std::map<std::string, std::string> labels;
  std::vector<CandidateSet> sets;
  std::map<std::string, std::set<std::string>> chosen;  // id -> ids
  ScriptBackend backend;
  std::set<RelationIdPair> none_pairs;
  FilterOutcome outcome;
};

ScriptedRun MakeScriptedRun(std::uint64_t seed) {
  Rng rng(seed);
  ScriptedRun run;
  const int n = 10 + static_cast<int>(rng.Uniform(31));
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) {
    ids.push_back("kg:r" + std::to_string(100 + i));
    run.labels[ids.back()] = "relation " + std::to_string(100 + i);
  }
  for (int i = 0; i < n; ++i) {
    CandidateSet set{ids[i], {}};
    std::string reply;
    for (int j = 0; j < n; ++j) {
      if (j == i || rng.Uniform(3) == 0) continue;
      set.candidates.push_back({ids[j], 0.5});
      if (rng.Uniform(2) == 0) {
        run.chosen[ids[i]].insert(ids[j]);
        reply += (reply.empty() ? " " : ", ") + run.labels[ids[j]];
      }
    }
    run.backend.selection[run.labels[ids[i]]] = reply.empty() ? " None" : reply;
    if (!set.candidates.empty()) run.sets.push_back(std::move(set));
  }
  static const char* kNone[] = {" None", " none.", " NONE", " [None]."};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto key = std::make_pair(run.labels[ids[i]], run.labels[ids[j]]);
      if (rng.Uniform(3) == 0) {
        run.backend.meta[key] = kNone[rng.Uniform(4)];
        run.none_pairs.insert({ids[i], ids[j]});
      } else {
        run.backend.meta[key] = " [meta " + std::to_string(i) + "-" + std::to_string(j) + "].";
      }
    }
  }
  run.outcome = RunFilter(run.sets, run.labels, run.backend, PromptTemplates::Load(ANALOGY_DATA_DIR "/prompts"),
                          FilterOptions{4});
  return run;
}

Outcome RuleOneOracle() {
  Check check;
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ScriptedRun run = MakeScriptedRun(seed);
    std::vector<RelationIdPair> expected;
    for (const auto& [a, _] : run.labels) {
      for (const auto& [b, __] : run.labels) {
        if (!(a < b)) continue;
        auto ia = run.chosen.find(a), ib = run.chosen.find(b);
        if (ia != run.chosen.end() && ib != run.chosen.end() && ia->second.count(b) && ib->second.count(a)) {
          expected.push_back({a, b});
        }
      }
    }
    check.Expect(run.outcome.rule1_pairs == expected, "seed " + std::to_string(seed));
    total += expected.size();
  }
  return check.Done("100 seeds, " + std::to_string(total) + " mutual pairs");
}

Outcome RuleTwoFilter() {
  Check check;
  std::size_t raw = 0, rule1 = 0, rule2 = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ScriptedRun run = MakeScriptedRun(seed);
    const auto& o = run.outcome;
    std::set<RelationIdPair> pending;
    for (const auto& p : o.pending) pending.insert({p.rel_a, p.rel_b});
    const std::set<RelationIdPair> r1(o.rule1_pairs.begin(), o.rule1_pairs.end());
    const std::set<RelationIdPair> r0(o.raw_pairs.begin(), o.raw_pairs.end());
    for (const auto& p : r1) {
      check.Expect(r0.count(p) == 1, "rule1 pair not in raw");
      const bool none = run.none_pairs.count(p) > 0;
      check.Expect(pending.count(p) == (none ? 0u : 1u), p.first + "~" + p.second + " wrong under rule 2");
    }
    for (const auto& p : pending) check.Expect(r1.count(p) == 1, "rule2 pair not in rule1");
    raw += r0.size();
    rule1 += r1.size();
    rule2 += pending.size();
  }
  return check.Done("funnel " + std::to_string(raw) + " -> " + std::to_string(rule1) + " -> " +
                    std::to_string(rule2) + " over 100 transcripts");
}

// ---------------------------------------------------------------------------

KnowledgeBase RandomKb(Rng& rng, int relations, int max_pairs, int vocab, int approved) {
  std::vector<RawTriple> triples;
  for (int r = 0; r < relations; ++r) {
    const int n = 1 + static_cast<int>(rng.Uniform(max_pairs));
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(used.size()) < n) {
      const int s = static_cast<int>(rng.Uniform(vocab)), o = static_cast<int>(rng.Uniform(vocab));
      if (s == o || !used.insert({s, o}).second) continue;
      triples.push_back({"c" + std::to_string(s), "rel" + std::to_string(r), "c" + std::to_string(o),
                         static_cast<double>(rng.Uniform(1000)), Source::kWikidata});
    }
  }
  std::vector<AnalogousRelationPair> pairs;
  std::set<std::pair<int, int>> seen;
  while (static_cast<int>(pairs.size()) < approved) {
    int a = static_cast<int>(rng.Uniform(relations)), b = static_cast<int>(rng.Uniform(relations));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    pairs.push_back({RelationId(Source::kWikidata, "rel" + std::to_string(a)),
                     RelationId(Source::kWikidata, "rel" + std::to_string(b)), "m", Provenance::kAuto,
                     PairStatus::kApproved});
  }
  return KnowledgeBase::Build(triples, pairs);
}

using Quad = std::array<std::string, 4>;
using StringPair = std::pair<std::string, std::string>;
using PairOfPairs = std::set<StringPair>;

Outcome EnumerationCounts() {
  Check check;
  std::uint64_t same_total = 0, cross_total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const KnowledgeBase kb = RandomKb(rng, 8, 20, 40, 5);
    std::uint64_t same_expected = 0, cross_expected = 0;
    for (const auto& r : kb.relations()) {
      const std::size_t n = r.pairs.size();
      check.Expect(n <= 20, "fixture relation too large");
      std::set<PairOfPairs> oracle;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          oracle.insert(PairOfPairs{StringPair{r.pairs[i].subject, r.pairs[i].object},
                                    StringPair{r.pairs[j].subject, r.pairs[j].object}});
        }
      }
      const auto got = EnumerateSameRelation(kb, r.id);
      std::set<PairOfPairs> seen;
      for (const auto& x : got) seen.insert(PairOfPairs{StringPair{x.a, x.b}, StringPair{x.c, x.d}});
      check.Expect(got.size() == n * (n - 1) / 2 && seen == oracle, r.id + " same-relation set");
      same_expected += n * (n - 1) / 2;
    }
    for (const auto& p : kb.analogous_pairs()) {
      const auto& a = kb.GetRelation(p.rel_a);
      const auto& b = kb.GetRelation(p.rel_b);
      std::set<Quad> oracle;
      for (const auto& x : a.pairs) {
        for (const auto& y : b.pairs) oracle.insert({x.subject, x.object, y.subject, y.object});
      }
      const auto got = EnumerateAnalogous(kb, p.rel_a, p.rel_b);
      std::set<Quad> seen;
      for (const auto& x : got) seen.insert({x.a, x.b, x.c, x.d});
      check.Expect(got.size() == a.pairs.size() * b.pairs.size() && seen == oracle,
                   p.rel_a + "~" + p.rel_b + " cross set");
      cross_expected += a.pairs.size() * b.pairs.size();
    }
    const KbStats stats = ComputeStats(kb);
    check.Expect(stats.same_relation_analogies == same_expected, "stats same-relation total");
    check.Expect(stats.analogous_analogies == cross_expected, "stats analogous total");
    same_total += same_expected;
    cross_total += cross_expected;
  }
  return check.Done(std::to_string(same_total) + " same-relation and " + std::to_string(cross_total) +
                    " cross analogies match explicit enumeration");
}

// ---------------------------------------------------------------------------

Outcome McqaValidity() {
  Check check;
  std::array<std::size_t, kMcqaCandidates> positions{};
  std::size_t n = 0;
  for (std::uint64_t seed = 0; n < 1000 && seed < 50; ++seed) {
    Rng rng(1000 + seed);
    const KnowledgeBase kb = RandomKb(rng, 12, 20, 80, 4);
    const auto data = MakeRecognitionDataset(kb, {150, 150, seed});
    for (const auto& item : data.items) {
      if (n == 1000) break;
      // Oracle: relations in which the query pair holds, plus approved partners.
      std::set<std::string> valid;
      for (const auto& r : kb.RelationsWithPair(item.query.subject, item.query.object)) {
        valid.insert(r);
        for (const auto& p : kb.analogous_pairs()) {
          if (p.status != PairStatus::kApproved) continue;
          if (p.rel_a == r) valid.insert(p.rel_b);
          if (p.rel_b == r) valid.insert(p.rel_a);
        }
      }
      for (std::size_t i = 0; i < item.candidates.size(); ++i) {
        bool ok = false;
        for (const auto& r : kb.RelationsWithPair(item.candidates[i].subject, item.candidates[i].object)) {
          ok = ok || valid.count(r) > 0;
        }
        check.Expect(ok == (i == item.answer_index), item.id + " candidate " + std::to_string(i));
      }
      check.Expect(item.candidates.size() == kMcqaCandidates, item.id + " candidate count");
      ++positions[item.answer_index];
      ++n;
    }
  }
  check.Expect(n == 1000, "only " + std::to_string(n) + " items generated");
  std::string shares;
  for (auto p : positions) {
    const double share = 100.0 * static_cast<double>(p) / static_cast<double>(std::max<std::size_t>(n, 1));
    check.Expect(share >= 20.0 && share <= 30.0, "answer share " + std::to_string(share));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", share);
    shares += (shares.empty() ? "" : "/") + std::string(buf);
  }
  return check.Done(std::to_string(n) + " items valid, answer positions % " + shares);
}

// ---------------------------------------------------------------------------

class FixedEmbedder : public EmbeddingProvider {
 public:
  EmbeddingVector vector;
  std::string id() const override { return "fixed"; }
  std::vector<EmbeddingVector> Embed(std::span<const std::string> texts) override {
    return std::vector<EmbeddingVector>(texts.size(), vector);
  }
};

EmbeddingVector RandomVector(Rng& rng, int dim) {
  EmbeddingVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.UniformReal() * 2 - 1;
  return v;
}

// Exhaustive scan: cosine descending, then position.
std::vector<std::size_t> Scan(const std::vector<EmbeddingVector>& rows, const EmbeddingVector& q,
                              std::size_t skip, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == skip) continue;
    scored.push_back({rows[i].dot(q) / (rows[i].norm() * q.norm()), i});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

Outcome RetrievalExactness() {
  Check check;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t n = 2 + rng.Uniform(199);
    const int dim = 4 + static_cast<int>(rng.Uniform(28));
    std::vector<EmbeddingVector> rows;
    for (std::size_t i = 0; i < n; ++i) {
      // Planted duplicates produce exact ties.
      rows.push_back(i > 0 && rng.Uniform(10) == 0 ? rows[rng.Uniform(i)] : RandomVector(rng, dim));
    }
    std::vector<std::string> ids;
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "r%05zu", i);
      ids.push_back(buf);
    }
    const RelationIndex index(ids, rows);
    const std::size_t probe = rng.Uniform(n);
    const auto set = TopKCandidates(ids[probe], index, 20);
    std::vector<std::size_t> got;
    for (const auto& c : set.candidates) got.push_back(static_cast<std::size_t>(std::stoul(c.id.substr(1))));
    check.Expect(got == Scan(rows, rows[probe], probe, 20), "top-20 seed " + std::to_string(seed));

    std::vector<Analogy> analogies;
    for (std::size_t i = 0; i < n; ++i) analogies.push_back({ids[i], "b", "c", "d", AnalogyKind::kSameRelation, {}});
    const AnalogyPool pool(analogies, rows);
    FixedEmbedder embedder;
    embedder.vector = rng.Uniform(2) == 0 ? RandomVector(rng, dim) : rows[rng.Uniform(n)];
    const auto prompt = RetrieveTopKAnalogies({"x", "y", "z"}, pool, embedder, 8);
    std::vector<std::size_t> top8;
    for (const auto& x : prompt.exemplars) top8.push_back(static_cast<std::size_t>(std::stoul(x.a.substr(1))));
    check.Expect(top8 == Scan(rows, embedder.vector, n, 8), "top-8 seed " + std::to_string(seed));
  }
  return check.Done("100 fixtures, top-20 candidates and top-8 exemplars equal exhaustive scans");
}

// ---------------------------------------------------------------------------

Outcome Metrics() {
  // Gold ranks 1, 1, 2, 3, absent, 1, 5, 10, 11, absent, 4, 1.
  const std::vector<std::size_t> ranks{1, 1, 2, 3, 0, 1, 5, 10, 11, 0, 4, 1};
  std::vector<GenItem> items;
  std::vector<RankedPrediction> preds;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const std::string id = "g" + std::to_string(i);
    items.push_back({id, "a", "b", "c", "Gold" + std::to_string(i), AnalogyKind::kSameRelation, {}});
    RankedPrediction p{id, {}, {}};
    for (std::size_t r = 1; r <= 12; ++r) {
      p.ranked_outputs.push_back(r == ranks[i] ? " gold" + std::to_string(i) : "w" + std::to_string(r));
    }
    preds.push_back(p);
  }
  const auto report = EvaluateGeneration(items, preds);
  const double mrr = (1 + 1 + 1.0 / 2 + 1.0 / 3 + 0 + 1 + 1.0 / 5 + 1.0 / 10 + 0 + 0 + 1.0 / 4 + 1) / 12;
  Check check;
  auto near = [&](double got, double want, const char* name) {
    check.Expect(std::abs(got - want) <= 1e-9, std::string(name) + " " + std::to_string(got));
  };
  near(report.mrr, mrr, "mrr");
  near(report.accuracy, 4.0 / 12, "accuracy");
  near(report.hit_at_1, 4.0 / 12, "hit@1");
  near(report.hit_at_5, 8.0 / 12, "hit@5");
  near(report.hit_at_10, 9.0 / 12, "hit@10");
  near(report.recall_at_5, 8.0 / 12, "recall@5");
  check.Expect(GoldRank(preds[3], items[3].target_d) == 3, "rank-3 item");
  near(1.0 / static_cast<double>(GoldRank(preds[3], items[3].target_d)), 1.0 / 3, "rank-3 reciprocal");
  check.Expect(GoldRank(preds[8], items[8].target_d) == 0, "rank-11 item counted");
  const std::vector<std::size_t> p{0, 1, 2, 3, 0}, g{0, 1, 3, 3, 2};
  near(Accuracy(p, g), 0.6, "mcqa accuracy");
  return check.Done("12-item fixture within 1e-9");
}

// ---------------------------------------------------------------------------

Outcome OffsetBaseline() {
  Rng rng(2024);
  const int dim = 32;
  WordVectors vectors;
  std::vector<McqaItem> items;
  for (int q = 0; q < 10; ++q) {
    const std::string s = std::to_string(q);
    const auto a = RandomVector(rng, dim), b = RandomVector(rng, dim), c = RandomVector(rng, dim);
    vectors.Add("a" + s, a);
    vectors.Add("b" + s, b);
    vectors.Add("c" + s, c);
    vectors.Add("d" + s, c + (b - a) + 0.05 * RandomVector(rng, dim));
    McqaItem item;
    item.id = "q" + s;
    item.query = {"a" + s, "b" + s, 0};
    item.answer_index = rng.Uniform(4);
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == item.answer_index) {
        item.candidates.push_back({"c" + s, "d" + s, 0});
        continue;
      }
      const std::string x = "x" + s + "_" + std::to_string(i), y = "y" + s + "_" + std::to_string(i);
      vectors.Add(x, RandomVector(rng, dim));
      vectors.Add(y, RandomVector(rng, dim));
      item.candidates.push_back({x, y, 0});
    }
    items.push_back(item);
  }
  const WordVectors scaled = vectors.Scaled(7.0);
  Check check;
  int correct = 0;
  for (const auto& item : items) {
    const auto pred = OffsetPredict(item, vectors);
    const auto again = OffsetPredict(item, scaled);
    correct += pred.index && *pred.index == item.answer_index;
    check.Expect(pred.index == again.index, item.id + " argmax moved under scaling");
  }
  check.Expect(correct == 10, std::to_string(correct) + "/10 correct");
  return check.Done(std::to_string(correct) + "/10 correct, argmax unchanged at scale 7.0");
}

Outcome Kappa() {
  constexpr auto A = Verdict::kAccept;
  constexpr auto R = Verdict::kReject;
  Check check;
  const double perfect = FleissKappa({{A, A}, {R, R}, {A, A}, {R, R}});
  check.Expect(perfect == 1.0, "perfect agreement " + std::to_string(perfect));
  // P-bar = 4/6, p_accept = 8/12, P_e = 5/9, kappa = (2/3 - 5/9) / (4/9) = 1/4.
  const double worked = FleissKappa({{A, A}, {A, A}, {R, R}, {A, R}, {R, A}, {A, A}});
  check.Expect(std::abs(worked - 0.25) <= 1e-9, "worked table " + std::to_string(worked));
  return check.Done("perfect = 1.0, worked table = 0.25");
}

Outcome Overlap() {
  Check check;
  std::size_t planted_total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(500 + seed);
    const KnowledgeBase kb = RandomKb(rng, 10, 10, 30, 3);
    std::string text;
    std::size_t planted = 0;
    for (int i = 0; i < 40; ++i) {
      const int mode = static_cast<int>(rng.Uniform(4));
      if (mode == 0) {  // same relation
        const auto& r = kb.relations()[rng.Uniform(kb.relations().size())];
        const auto& x = r.pairs[rng.Uniform(r.pairs.size())];
        const auto& y = r.pairs[rng.Uniform(r.pairs.size())];
        text += x.subject + ":" + x.object + "::" + y.subject + ":" + y.object + "\n";
        ++planted;
      } else if (mode == 1) {  // approved analogous relations
        const auto& p = kb.analogous_pairs()[rng.Uniform(kb.analogous_pairs().size())];
        const auto& a = kb.GetRelation(p.rel_a);
        const auto& b = kb.GetRelation(p.rel_b);
        const auto& x = a.pairs[rng.Uniform(a.pairs.size())];
        const auto& y = b.pairs[rng.Uniform(b.pairs.size())];
        text += x.subject + ":" + x.object + "::" + y.subject + ":" + y.object + "\n";
        ++planted;
      } else if (mode == 2) {  // only one tuple in the KB
        const auto& r = kb.relations()[rng.Uniform(kb.relations().size())];
        const auto& x = r.pairs[rng.Uniform(r.pairs.size())];
        text += x.subject + ":" + x.object + "::zz" + std::to_string(i) + ":yy\n";
      } else {
        text += "u" + std::to_string(i) + ":v::w:x\n";
      }
    }
    // Mode 0 and 1 plants are collisions; modes 2 and 3 never are. A mode 2
    // line can still not collide by construction since zz* is not a concept.
    const auto result = ComputeOverlap(kb, ParseExternal(text));
    std::size_t unexpected = 0;
    for (const auto& item : result.overlapping) unexpected += item.c.rfind("zz", 0) == 0 || item.a[0] == 'u';
    check.Expect(unexpected == 0, "non-planted item flagged");
    check.Expect(result.overlapping.size() == planted,
                 "seed " + std::to_string(seed) + ": " + std::to_string(result.overlapping.size()) + " vs " +
                     std::to_string(planted));
    planted_total += planted;
  }
  return check.Done(std::to_string(planted_total) + " planted collisions found exactly");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"end-to-end fixture run", EndToEnd},
      {"ingestion threshold", IngestionThreshold},
      {"rule 1 oracle", RuleOneOracle},
      {"rule 2 filter and funnel", RuleTwoFilter},
      {"enumeration counts", EnumerationCounts},
      {"mcqa validity", McqaValidity},
      {"retrieval exactness", RetrievalExactness},
      {"metrics", Metrics},
      {"offset baseline", OffsetBaseline},
      {"fleiss kappa", Kappa},
      {"overlap rule", Overlap},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
