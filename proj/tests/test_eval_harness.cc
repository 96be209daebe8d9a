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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "analogy/error.h"
#include "analogy/eval_harness.h"
#include "doctest.h"
#include "test_support.h"

using namespace analogy;

namespace {

RankedPrediction Ranked(const std::string& id, std::vector<std::string> outputs) {
  return RankedPrediction{id, std::move(outputs), {}};
}

std::vector<std::string> Fill(std::size_t n, std::size_t gold_at, const std::string& gold) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(i + 1 == gold_at ? gold : "w" + std::to_string(i));
  return out;
}

// Gold ranks 1, 1, 2, 3, absent, 1, 5, 10, 11, absent, 4, 1.
struct MetricsFixture {
  std::vector<RankedPrediction> preds;
  std::vector<std::string> gold;

  MetricsFixture() {
    const std::vector<std::size_t> ranks{1, 1, 2, 3, 0, 1, 5, 10, 11, 0, 4, 1};
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      gold.push_back("Gold" + std::to_string(i));
      auto outputs = Fill(12, ranks[i], " gold" + std::to_string(i) + " ");
      preds.push_back(Ranked("i" + std::to_string(i), outputs));
    }
  }
};

class FixedEmbedder : public EmbeddingProvider {
 public:
  explicit FixedEmbedder(EmbeddingVector v) : v_(std::move(v)) {}
  std::string id() const override { return "fixed"; }
  std::vector<EmbeddingVector> Embed(std::span<const std::string> texts) override {
    return std::vector<EmbeddingVector>(texts.size(), v_);
  }

 private:
  EmbeddingVector v_;
};

}  // namespace

TEST_CASE("ranking metrics on a fixed fixture") {
  const MetricsFixture f;
  const double mrr = (1 + 1 + 1.0 / 2 + 1.0 / 3 + 0 + 1 + 1.0 / 5 + 1.0 / 10 + 0 + 0 + 1.0 / 4 + 1) / 12;
  CHECK(std::abs(Mrr(f.preds, f.gold) - mrr) < 1e-9);
  CHECK(std::abs(HitAtK(f.preds, f.gold, 1) - 4.0 / 12) < 1e-9);
  CHECK(std::abs(HitAtK(f.preds, f.gold, 5) - 8.0 / 12) < 1e-9);
  CHECK(std::abs(HitAtK(f.preds, f.gold, 10) - 9.0 / 12) < 1e-9);
  CHECK(RecallAtK(f.preds, f.gold, 5) == HitAtK(f.preds, f.gold, 5));
  CHECK(GoldRank(f.preds[3], f.gold[3]) == 3);
  CHECK(GoldRank(f.preds[4], f.gold[4]) == 0);
  CHECK(GoldRank(f.preds[8], f.gold[8]) == 0);
  CHECK(GoldRank(f.preds[8], f.gold[8], 20) == 11);
  // A wider window picks up the rank-11 item.
  CHECK(std::abs(Mrr(f.preds, f.gold, 20) - (mrr + 1.0 / 11 / 12)) < 1e-9);
}

TEST_CASE("metric preconditions") {
  const MetricsFixture f;
  const std::vector<std::string> short_gold(f.gold.begin(), f.gold.begin() + 3);
  CHECK_THROWS_AS(Mrr(f.preds, short_gold), Error);
  CHECK_THROWS_AS(HitAtK(f.preds, f.gold, 0), Error);
  CHECK_THROWS_AS(Mrr(std::span<const RankedPrediction>{}, std::span<const std::string>{}), Error);
  const std::vector<std::size_t> p{0, 1, 2, 3}, g{0, 1, 3, 3};
  CHECK(Accuracy(p, g) == 0.75);
  CHECK_THROWS_AS(Accuracy(p, std::vector<std::size_t>{0}), Error);
}

TEST_CASE("prediction validation and loading") {
  CHECK_THROWS_AS((RankedPrediction{"x", {"a", "a"}, {}}.Validate()), Error);
  CHECK_THROWS_AS((RankedPrediction{"x", {"a", "b"}, {1.0}}.Validate()), Error);
  CHECK_THROWS_AS((RankedPrediction{"x", {"a", "b"}, {0.1, 0.2}}.Validate()), Error);
  CHECK_NOTHROW((RankedPrediction{"x", {"a", "b"}, {0.2, 0.2}}.Validate()));

  testing::TempDir dir;
  WriteFile(dir / "p.jsonl", R"({"item_id":"g1","ranked_outputs":["x","y"],"scores":[2,1]})" "\n");
  const auto preds = ReadPredictions(dir / "p.jsonl");
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].ranked_outputs[1] == "y");
  WriteFile(dir / "bad.jsonl", R"({"item_id":"g1","ranked_outputs":["x","x"]})" "\n");
  CHECK_THROWS_AS(ReadPredictions(dir / "bad.jsonl"), Error);
}

TEST_CASE("generation report aligns predictions by id") {
  std::vector<GenItem> items;
  for (int i = 0; i < 4; ++i) {
    items.push_back({"g" + std::to_string(i), "a", "b", "c", "d" + std::to_string(i), AnalogyKind::kSameRelation, {}});
  }
  const std::vector<RankedPrediction> preds{Ranked("g2", {"x", "D2"}), Ranked("g0", {"d0"}),
                                            Ranked("g9", {"d9"})};
  const auto report = EvaluateGeneration(items, preds);
  CHECK(report.items == 4);
  CHECK(report.missing_predictions == 2);
  CHECK(report.accuracy == 0.25);
  CHECK(report.mrr == doctest::Approx(1.5 / 4));
  CHECK(report.hit_at_5 == 0.5);
  const auto json = GenerationReportToJson(report);
  CHECK(json["metrics"]["hit@1"] == 0.25);
  const auto table = FormatReportTable(json);
  CHECK(table.find("mrr           0.3750") != std::string::npos);
  CHECK(table.find("missing_predictions: 2") != std::string::npos);
}

TEST_CASE("word vectors") {
  const auto v = WordVectors::Parse("3 2\nnew 1 0\nyork 0 1\nnew_york 5 5\n");
  CHECK(v.size() == 3);
  CHECK(v.dim() == 2);
  CHECK((*v.Concept("new york"))(0) == 5.0);
  CHECK((*v.Concept("New York"))(0) == 5.0);
  CHECK((*v.Concept("York"))(1) == 1.0);
  const auto mean = WordVectors::Parse("new 1 0\nyork 0 1\n").Concept("new york");
  REQUIRE(mean);
  CHECK((*mean)(0) == 0.5);
  CHECK_FALSE(v.Concept("new jersey").has_value());
  CHECK((*v.Scaled(7.0).Concept("new"))(0) == 7.0);
  CHECK_THROWS_AS(WordVectors::Parse("a 1 2\nb 1\n"), Error);
}

TEST_CASE("offset baseline solves exact parallelograms and ignores scale") {
  Rng rng(17);
  const int dim = 16;
  auto random_vector = [&] {
    EmbeddingVector x(dim);
    for (int i = 0; i < dim; ++i) x(i) = rng.UniformReal() * 2 - 1;
    return x;
  };
  WordVectors vectors;
  std::vector<McqaItem> items;
  for (int q = 0; q < 10; ++q) {
    const auto name = [&](const std::string& s) { return s + std::to_string(q); };
    const EmbeddingVector a = random_vector(), b = random_vector(), c = random_vector();
    vectors.Add(name("a"), a);
    vectors.Add(name("b"), b);
    vectors.Add(name("c"), c);
    vectors.Add(name("d"), c + (b - a));
    McqaItem item;
    item.query = {name("a"), name("b"), 0};
    item.answer_index = static_cast<std::size_t>(q % 4);
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == item.answer_index) {
        item.candidates.push_back({name("c"), name("d"), 0});
      } else {
        const auto x = name("x") + "_" + std::to_string(i), y = name("y") + "_" + std::to_string(i);
        vectors.Add(x, random_vector());
        vectors.Add(y, random_vector());
        item.candidates.push_back({x, y, 0});
      }
    }
    items.push_back(item);
  }
  const WordVectors scaled = vectors.Scaled(7.0);
  for (const auto& item : items) {
    const auto pred = OffsetPredict(item, vectors);
    REQUIRE(pred.index.has_value());
    CHECK(*pred.index == item.answer_index);
    CHECK(pred.scores[item.answer_index] == doctest::Approx(1.0));
    const auto again = OffsetPredict(item, scaled);
    CHECK(again.index == pred.index);
    for (std::size_t i = 0; i < 4; ++i) CHECK(again.scores[i] == doctest::Approx(pred.scores[i]));
  }

  McqaItem unknown = items.front();
  unknown.query.subject = "zzz";
  const auto pred = OffsetPredict(unknown, vectors);
  CHECK_FALSE(pred.index.has_value());
  CHECK(pred.missing == std::vector<std::string>{"zzz"});
}

TEST_CASE("sentence baseline compares rendered pairs") {
  McqaItem item;
  item.query = {"hot", "cold", 0};
  item.candidates = {{"a", "b", 0}, {"big", "small", 0}, {"c", "d", 0}, {"e", "f", 0}};
  std::vector<std::string> asked;
  const SentenceEmbedder embed = [&](const std::string& s) -> std::optional<EmbeddingVector> {
    asked.push_back(s);
    EmbeddingVector v(2);
    v << (s == "hot is to cold" || s == "big is to small" ? 1.0 : 0.0), 1.0;
    return v;
  };
  const auto pred = SentencePredict(item, embed);
  CHECK(pred.index == std::optional<std::size_t>(1));
  CHECK(asked.front() == "hot is to cold");
}

TEST_CASE("few-shot prompt rendering") {
  const AnalogyQuery query{"classroom", "desk", "church"};
  CHECK(RenderQuery(query) == "classroom is to desk as church is to");
  const std::vector<Analogy> exemplars{{"hot", "cold", "big", "small", AnalogyKind::kSameRelation, {}}};
  CHECK(RenderFewShot(exemplars, query) ==
        "Please make analogies.\n"
        "input: hot is to cold as big is to\n"
        "output: small\n"
        "input: classroom is to desk as church is to\n"
        "output:");
  CHECK(RenderFewShot({}, query) == "Please make analogies.\ninput: classroom is to desk as church is to\noutput:");
}

TEST_CASE("retrieval returns the exact top-k by cosine") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.Uniform(200);
    const int dim = 8;
    std::vector<Analogy> analogies;
    std::vector<EmbeddingVector> vectors;
    for (std::size_t i = 0; i < n; ++i) {
      analogies.push_back({"a" + std::to_string(i), "b", "c", "d", AnalogyKind::kSameRelation, {}});
      EmbeddingVector v(dim);
      // Coarse values so that ties occur.
      for (int j = 0; j < dim; ++j) v(j) = static_cast<double>(rng.Uniform(3)) - 1.0;
      if (v.norm() == 0) v(0) = 1;
      vectors.push_back(v);
    }
    EmbeddingVector q(dim);
    for (int j = 0; j < dim; ++j) q(j) = static_cast<double>(rng.Uniform(3)) - 1.0;
    q(1) = 1;
    const AnalogyPool pool(analogies, vectors);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto cosine = [&](std::size_t i) { return vectors[i].dot(q) / (vectors[i].norm() * q.norm()); };
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return cosine(x) > cosine(y); });
    for (std::size_t k : {std::size_t{8}, std::size_t{20}}) {
      const auto got = pool.TopK(q, k);
      const std::vector<std::size_t> want(order.begin(), order.begin() + std::min(k, n));
      CHECK(got == want);
    }
    FixedEmbedder embedder(q);
    const auto prompt = RetrieveTopKAnalogies({"x", "y", "z"}, pool, embedder, 8);
    REQUIRE(prompt.exemplars.size() == std::min<std::size_t>(8, n));
    CHECK(prompt.exemplars.front() == analogies[order.front()]);
    CHECK(RetrieveTopKAnalogies({"x", "y", "z"}, pool, embedder, 0).exemplars.empty());
  }
}
