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

#include "analogy/eval_harness.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "analogy/error.h"
#include "analogy/kg_ingest.h"

namespace analogy {

namespace {

constexpr double kUnscored = -std::numeric_limits<double>::infinity();

std::vector<std::string_view> SplitSpaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool IsCount(std::string_view s) {
  std::size_t v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

// cos(x, y), or -inf when either vector is zero.
double SafeCosine(const EmbeddingVector& x, const EmbeddingVector& y) {
  if (x.norm() == 0.0 || y.norm() == 0.0) return kUnscored;
  return Cosine(x, y);
}

std::size_t Argmax(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace

WordVectors WordVectors::Parse(std::string_view text) {
  WordVectors wv;
  bool first = true;
  std::size_t lineno = 0;
  for (std::string_view line : SplitLines(text)) {
    ++lineno;
    const auto fields = SplitSpaces(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      if (fields.size() == 2 && IsCount(fields[0]) && IsCount(fields[1])) continue;
    }
    if (fields.size() < 2) {
      throw Error(ErrorCode::kDataLoss, "word vectors line " + std::to_string(lineno) + ": no values");
    }
    EmbeddingVector v(static_cast<Eigen::Index>(fields.size() - 1));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double x = 0;
      auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), x);
      if (ec != std::errc() || ptr != fields[i].data() + fields[i].size()) {
        throw Error(ErrorCode::kDataLoss,
                    "word vectors line " + std::to_string(lineno) + ": bad value '" +
                        std::string(fields[i]) + "'");
      }
      v(static_cast<Eigen::Index>(i - 1)) = x;
    }
    wv.Add(std::string(fields[0]), std::move(v));
  }
  return wv;
}

WordVectors WordVectors::Load(const std::filesystem::path& path) { return Parse(ReadFile(path)); }

void WordVectors::Add(std::string token, EmbeddingVector vector) {
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw Error(ErrorCode::kDataLoss, "word vector for '" + token + "' has dim " +
                                          std::to_string(vector.size()) + ", expected " +
                                          std::to_string(dim_));
  }
  vectors_.insert_or_assign(std::move(token), std::move(vector));
}

const EmbeddingVector* WordVectors::Token(const std::string& token) const {
  auto it = vectors_.find(token);
  if (it != vectors_.end()) return &it->second;
  it = vectors_.find(FoldCase(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<EmbeddingVector> WordVectors::Concept(std::string_view name) const {
  const std::string whole(Trim(name));
  if (const auto* v = Token(whole)) return *v;
  std::string joined = whole;
  std::replace(joined.begin(), joined.end(), ' ', '_');
  if (const auto* v = Token(joined)) return *v;

  std::vector<std::string_view> words;
  for (auto w : SplitSpaces(whole)) words.push_back(w);
  if (words.size() < 2) return std::nullopt;
  EmbeddingVector sum = EmbeddingVector::Zero(dim_);
  for (auto w : words) {
    const auto* v = Token(std::string(w));
    if (v == nullptr) return std::nullopt;
    sum += *v;
  }
  return EmbeddingVector(sum / static_cast<double>(words.size()));
}

WordVectors WordVectors::Scaled(double factor) const {
  WordVectors out;
  out.dim_ = dim_;
  for (const auto& [token, v] : vectors_) out.vectors_.emplace(token, v * factor);
  return out;
}

Prediction OffsetPredict(const McqaItem& item, const WordVectors& vectors) {
  Prediction pred;
  auto lookup = [&](const std::string& name) -> std::optional<EmbeddingVector> {
    auto v = vectors.Concept(name);
    if (!v) pred.missing.push_back(name);
    return v;
  };
  const auto a = lookup(item.query.subject);
  const auto b = lookup(item.query.object);
  std::vector<std::optional<EmbeddingVector>> cs, ds;
  for (const auto& c : item.candidates) {
    cs.push_back(lookup(c.subject));
    ds.push_back(lookup(c.object));
  }
  if (!pred.missing.empty()) return pred;

  const EmbeddingVector query = *b - *a;
  if (query.norm() == 0.0) return pred;
  for (std::size_t i = 0; i < item.candidates.size(); ++i) {
    pred.scores.push_back(SafeCosine(query, EmbeddingVector(*ds[i] - *cs[i])));
  }
  const std::size_t best = Argmax(pred.scores);
  if (pred.scores[best] != kUnscored) pred.index = best;
  return pred;
}

Prediction SentencePredict(const McqaItem& item, const SentenceEmbedder& embed) {
  Prediction pred;
  auto lookup = [&](const std::string& sentence) {
    auto v = embed(sentence);
    if (!v) pred.missing.push_back(sentence);
    return v;
  };
  const auto query = lookup(item.query.subject + " is to " + item.query.object);
  std::vector<std::optional<EmbeddingVector>> candidates;
  for (const auto& c : item.candidates) candidates.push_back(lookup(c.subject + " is to " + c.object));
  if (!pred.missing.empty()) return pred;
  for (const auto& c : candidates) pred.scores.push_back(SafeCosine(*query, *c));
  const std::size_t best = Argmax(pred.scores);
  if (!pred.scores.empty() && pred.scores[best] != kUnscored) pred.index = best;
  return pred;
}

namespace {

void CheckLengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kInvalidArgument, "length mismatch: " + std::to_string(a) +
                                                 " predictions vs " + std::to_string(b) + " gold");
  }
  if (a == 0) throw Error(ErrorCode::kInvalidArgument, "metric over zero items is undefined");
}

}  // namespace

double Accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
  CheckLengths(predicted.size(), gold.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

void RankedPrediction::Validate() const {
  std::set<std::string> seen;
  for (const auto& o : ranked_outputs) {
    if (!seen.insert(o).second) {
      throw Error(ErrorCode::kInvalidArgument, "prediction " + item_id + " repeats '" + o + "'");
    }
  }
  if (!scores.empty()) {
    if (scores.size() != ranked_outputs.size()) {
      throw Error(ErrorCode::kInvalidArgument, "prediction " + item_id + ": scores/outputs length differ");
    }
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (scores[i] > scores[i - 1]) {
        throw Error(ErrorCode::kInvalidArgument, "prediction " + item_id + ": scores not descending");
      }
    }
  }
}

std::string GoldKey(std::string_view s) { return FoldCase(Trim(s)); }

std::size_t GoldRank(const RankedPrediction& pred, const std::string& gold, std::size_t window) {
  const std::string key = GoldKey(gold);
  const std::size_t n = std::min(window, pred.ranked_outputs.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (GoldKey(pred.ranked_outputs[i]) == key) return i + 1;
  }
  return 0;
}

double Mrr(std::span<const RankedPrediction> preds, std::span<const std::string> gold,
           std::size_t window) {
  CheckLengths(preds.size(), gold.size());
  double sum = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::size_t rank = GoldRank(preds[i], gold[i], window);
    if (rank > 0) sum += 1.0 / static_cast<double>(rank);
  }
  return sum / static_cast<double>(preds.size());
}

double HitAtK(std::span<const RankedPrediction> preds, std::span<const std::string> gold,
              std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "hit@k needs k >= 1");
  CheckLengths(preds.size(), gold.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += GoldRank(preds[i], gold[i], k) > 0 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double RecallAtK(std::span<const RankedPrediction> preds, std::span<const std::string> gold,
                 std::size_t k) {
  return HitAtK(preds, gold, k);
}

std::vector<RankedPrediction> ReadPredictions(const std::filesystem::path& path) {
  std::vector<RankedPrediction> out;
  for (const Json& row : ReadJsonLines(path)) {
    try {
      RankedPrediction p;
      p.item_id = row.at("item_id").get<std::string>();
      p.ranked_outputs = row.at("ranked_outputs").get<std::vector<std::string>>();
      if (row.contains("scores")) p.scores = row["scores"].get<std::vector<double>>();
      p.Validate();
      out.push_back(std::move(p));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": bad prediction: " + e.what());
    }
  }
  return out;
}

GenerationReport EvaluateGeneration(const std::vector<GenItem>& items,
                                    const std::vector<RankedPrediction>& preds,
                                    std::size_t mrr_window) {
  std::unordered_map<std::string, const RankedPrediction*> by_id;
  for (const auto& p : preds) by_id[p.item_id] = &p;
  std::vector<RankedPrediction> aligned;
  std::vector<std::string> gold;
  GenerationReport r;
  for (const auto& item : items) {
    auto it = by_id.find(item.id);
    if (it == by_id.end()) {
      ++r.missing_predictions;
      aligned.push_back(RankedPrediction{item.id, {}, {}});
    } else {
      aligned.push_back(*it->second);
    }
    gold.push_back(item.target_d);
  }
  r.items = items.size();
  if (items.empty()) return r;
  r.accuracy = HitAtK(aligned, gold, 1);
  r.mrr = Mrr(aligned, gold, mrr_window);
  r.hit_at_1 = r.accuracy;
  r.hit_at_5 = HitAtK(aligned, gold, 5);
  r.hit_at_10 = HitAtK(aligned, gold, 10);
  r.recall_at_5 = RecallAtK(aligned, gold, 5);
  return r;
}

Json GenerationReportToJson(const GenerationReport& r) {
  return Json{{"task", "generation"},
              {"items", r.items},
              {"missing_predictions", r.missing_predictions},
              {"metrics",
               {{"accuracy", r.accuracy},
                {"mrr", r.mrr},
                {"hit@1", r.hit_at_1},
                {"hit@5", r.hit_at_5},
                {"hit@10", r.hit_at_10},
                {"recall@5", r.recall_at_5}}}};
}

Json RecognitionReportToJson(const RecognitionReport& r) {
  return Json{{"task", "recognition"},
              {"baseline", r.baseline},
              {"items", r.items},
              {"skipped", r.skipped},
              {"metrics", {{"accuracy", r.accuracy}, {"accuracy_all", r.accuracy_all}}}};
}

std::string FormatReportTable(const Json& report) {
  std::ostringstream out;
  out << "task: " << report.value("task", "") << '\n';
  for (const char* key : {"baseline", "items", "skipped", "missing_predictions"}) {
    if (report.contains(key)) {
      out << key << ": "
          << (report[key].is_string() ? report[key].get<std::string>() : report[key].dump()) << '\n';
    }
  }
  out << "metric        value\n";
  for (const auto& [name, value] : report.at("metrics").items()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-13s %.4f\n", name.c_str(), value.get<double>());
    out << buf;
  }
  return out.str();
}

std::string RenderQuery(const AnalogyQuery& q) {
  return q.a + " is to " + q.b + " as " + q.c + " is to";
}

std::string RenderFewShot(const std::vector<Analogy>& exemplars, const AnalogyQuery& query) {
  std::string out = "Please make analogies.\n";
  for (const auto& x : exemplars) {
    out += "input: " + x.a + " is to " + x.b + " as " + x.c + " is to\n";
    out += "output: " + x.d + "\n";
  }
  out += "input: " + RenderQuery(query) + "\noutput:";
  return out;
}

namespace {

std::string PoolId(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%012zu", i);
  return buf;
}

EmbeddingIndex<double> BuildPoolIndex(const std::vector<EmbeddingVector>& vectors) {
  std::vector<std::string> ids;
  ids.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) ids.push_back(PoolId(i));
  return EmbeddingIndex<double>(std::move(ids), vectors);
}

std::vector<EmbeddingVector> EmbedAnalogies(const std::vector<Analogy>& analogies,
                                            EmbeddingProvider& provider,
                                            const EmbeddingCache* cache,
                                            const EmbedOptions& options) {
  std::vector<std::string> texts;
  texts.reserve(analogies.size());
  for (const auto& x : analogies) texts.push_back(RenderAnalogy(x));
  const auto by_text = EmbedTexts(texts, provider, cache, options);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(by_text.at(t));
  return out;
}

}  // namespace

AnalogyPool::AnalogyPool(std::vector<Analogy> analogies, EmbeddingProvider& provider,
                         const EmbeddingCache* cache, const EmbedOptions& options)
    : AnalogyPool(analogies, EmbedAnalogies(analogies, provider, cache, options)) {}

AnalogyPool::AnalogyPool(std::vector<Analogy> analogies, std::vector<EmbeddingVector> vectors)
    : analogies_(std::move(analogies)), index_(BuildPoolIndex(vectors)) {}

std::vector<std::size_t> AnalogyPool::TopK(const EmbeddingVector& query_vector,
                                           std::size_t k) const {
  std::vector<std::size_t> out;
  for (const auto& hit : index_.TopK(query_vector, k)) out.push_back(std::stoull(hit.id));
  return out;
}

FewShotPrompt RetrieveTopKAnalogies(const AnalogyQuery& query, const AnalogyPool& pool,
                                    EmbeddingProvider& provider, std::size_t k) {
  FewShotPrompt prompt;
  prompt.query = query;
  if (k > 0 && !pool.analogies().empty()) {
    const std::string text = RenderQuery(query);
    const auto vectors = provider.Embed(std::span<const std::string>(&text, 1));
    if (vectors.size() != 1) throw Error(ErrorCode::kUnavailable, "embedding provider returned no vector");
    for (std::size_t i : pool.TopK(vectors.front(), k)) prompt.exemplars.push_back(pool.analogies()[i]);
  }
  prompt.rendered = RenderFewShot(prompt.exemplars, query);
  return prompt;
}

}  // namespace analogy
