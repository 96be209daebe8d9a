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

#include "analogy/pipeline.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "analogy/analogy_kb.h"
#include "analogy/curation.h"
#include "analogy/dataset_gen.h"
#include "analogy/error.h"
#include "analogy/eval_harness.h"
#include "analogy/llm_filter.h"
#include "analogy/relation_linker.h"

namespace analogy {

namespace fs = std::filesystem;

namespace {

void RejectSecrets(const Json& j, const std::string& where) {
  if (!j.is_object()) return;
  for (const auto& [key, value] : j.items()) {
    if (key == "api_key" || key == "apiKey" || key == "key") {
      throw Error(ErrorCode::kInvalidArgument,
                  "config " + where + key + ": API keys are read from the environment only");
    }
    RejectSecrets(value, where + key + ".");
  }
}

void CheckKeys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "config " + where + ": expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::kInvalidArgument, "config: unknown key '" + where + key + "'");
    }
  }
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
void Set(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void SetPath(const Json& j, const char* key, const fs::path& base, fs::path& field) {
  if (j.contains(key)) field = Resolve(base, j.at(key).get<std::string>());
}

std::string HashFile(const fs::path& path) { return Sha256Hex(ReadFile(path)); }

std::vector<RelationEntry> RelationEntries(const std::vector<RawTriple>& triples,
                                           const std::map<std::string, std::vector<std::string>>& aliases) {
  std::map<std::string, RelationEntry> by_id;
  for (const auto& t : triples) {
    const std::string id = RelationId(t.source, t.relation);
    if (by_id.count(id)) continue;
    RelationEntry e{id, t.relation, {}};
    for (const auto& key : {id, t.relation}) {
      auto it = aliases.find(key);
      if (it != aliases.end()) e.aliases.insert(e.aliases.end(), it->second.begin(), it->second.end());
    }
    by_id.emplace(id, std::move(e));
  }
  std::vector<RelationEntry> out;
  for (auto& [id, e] : by_id) out.push_back(std::move(e));
  return out;
}

EmbedOptions ToEmbedOptions(const EmbeddingConfig& c) {
  EmbedOptions o;
  o.batch_size = c.batch_size;
  o.max_in_flight = c.max_in_flight;
  return o;
}

std::optional<EmbeddingCache> MakeCache(const EmbeddingConfig& c) {
  if (c.cache_dir.empty()) return std::nullopt;
  return EmbeddingCache(c.cache_dir);
}

template <typename T, typename F>
std::string Lines(const std::vector<T>& rows, F to_json) {
  std::vector<Json> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(to_json(r));
  return ToJsonLines(out);
}

std::vector<AnalogousRelationPair> ReadPairs(const fs::path& path) {
  std::vector<AnalogousRelationPair> out;
  for (const Json& row : ReadJsonLines(path)) out.push_back(PairFromJson(row));
  return out;
}

void WriteJson(const fs::path& path, const Json& j) { WriteFile(path, j.dump(2) + "\n"); }

}  // namespace

PipelineConfig ConfigFromJson(const Json& j, const fs::path& base, PipelineConfig c) {
  RejectSecrets(j, "");
  CheckKeys(j,
            {"sources", "weight_threshold", "candidate_k", "retrieval_k", "mrr_window",
             "embedding", "backend", "max_in_flight", "seeds", "dataset", "out_dir",
             "annotators", "prompts_dir"},
            "");
  if (j.contains("sources")) {
    const Json& s = j["sources"];
    CheckKeys(s, {"conceptnet", "wikidata", "aliases", "language", "popularity"}, "sources.");
    SetPath(s, "conceptnet", base, c.conceptnet);
    SetPath(s, "wikidata", base, c.wikidata);
    SetPath(s, "aliases", base, c.aliases);
    Set(s, "language", c.language);
    if (s.contains("popularity")) c.popularity = ParsePopularityField(s["popularity"].get<std::string>());
  }
  Set(j, "weight_threshold", c.weight_threshold);
  Set(j, "candidate_k", c.candidate_k);
  Set(j, "retrieval_k", c.retrieval_k);
  Set(j, "mrr_window", c.mrr_window);
  Set(j, "max_in_flight", c.max_in_flight);
  if (j.contains("embedding")) {
    const Json& e = j["embedding"];
    CheckKeys(e,
              {"provider", "dim", "endpoint", "model", "api_key_env", "cache_dir",
               "with_aliases", "batch_size", "max_in_flight"},
              "embedding.");
    Set(e, "provider", c.embedding.provider);
    Set(e, "dim", c.embedding.dim);
    Set(e, "endpoint", c.embedding.remote.endpoint);
    Set(e, "model", c.embedding.remote.model);
    Set(e, "api_key_env", c.embedding.remote.api_key_env);
    SetPath(e, "cache_dir", base, c.embedding.cache_dir);
    Set(e, "with_aliases", c.embedding.with_aliases);
    Set(e, "batch_size", c.embedding.batch_size);
    Set(e, "max_in_flight", c.embedding.max_in_flight);
  }
  if (j.contains("backend")) {
    CheckKeys(j["backend"],
              {"kind", "model", "temperature", "max_output_tokens", "transcript", "endpoint",
               "api_key_env", "max_attempts"},
              "backend.");
    c.backend = BackendSpecFromJson(j["backend"]);
    if (!c.backend.transcript.empty()) c.backend.transcript = Resolve(base, c.backend.transcript.string());
  }
  if (j.contains("seeds")) {
    CheckKeys(j["seeds"], {"gen_data", "retrieve"}, "seeds.");
    Set(j["seeds"], "gen_data", c.gen_seed);
    Set(j["seeds"], "retrieve", c.retrieve_seed);
  }
  if (j.contains("dataset")) {
    const Json& d = j["dataset"];
    CheckKeys(d, {"n_same", "n_analogous", "n_generation", "retrieval_pool", "exclude_shared_concepts"},
              "dataset.");
    Set(d, "n_same", c.n_same);
    Set(d, "n_analogous", c.n_analogous);
    Set(d, "n_generation", c.n_generation);
    Set(d, "retrieval_pool", c.retrieval_pool);
    Set(d, "exclude_shared_concepts", c.exclude_shared_concepts);
  }
  SetPath(j, "out_dir", base, c.out_dir);
  SetPath(j, "annotators", base, c.annotators);
  SetPath(j, "prompts_dir", base, c.prompts_dir);
  if (c.candidate_k == 0) throw Error(ErrorCode::kInvalidArgument, "config: candidate_k must be >= 1");
  if (c.mrr_window == 0) throw Error(ErrorCode::kInvalidArgument, "config: mrr_window must be >= 1");
  return c;
}

PipelineConfig LoadConfig(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, path.parent_path());
}

Json ConfigToJson(const PipelineConfig& c) {
  return Json{
      {"sources",
       {{"conceptnet", c.conceptnet.string()},
        {"wikidata", c.wikidata.string()},
        {"aliases", c.aliases.string()},
        {"language", c.language},
        {"popularity", PopularityFieldName(c.popularity)}}},
      {"weight_threshold", c.weight_threshold},
      {"candidate_k", c.candidate_k},
      {"retrieval_k", c.retrieval_k},
      {"mrr_window", c.mrr_window},
      {"embedding",
       {{"provider", c.embedding.provider},
        {"dim", c.embedding.dim},
        {"endpoint", c.embedding.remote.endpoint},
        {"model", c.embedding.remote.model},
        {"api_key_env", c.embedding.remote.api_key_env},
        {"cache_dir", c.embedding.cache_dir.string()},
        {"with_aliases", c.embedding.with_aliases},
        {"batch_size", c.embedding.batch_size},
        {"max_in_flight", c.embedding.max_in_flight}}},
      {"backend", BackendSpecToJson(c.backend)},
      {"max_in_flight", c.max_in_flight},
      {"seeds", {{"gen_data", c.gen_seed}, {"retrieve", c.retrieve_seed}}},
      {"dataset",
       {{"n_same", c.n_same},
        {"n_analogous", c.n_analogous},
        {"n_generation", c.n_generation},
        {"retrieval_pool", c.retrieval_pool},
        {"exclude_shared_concepts", c.exclude_shared_concepts}}},
      {"out_dir", c.out_dir.string()},
      {"annotators", c.annotators.string()},
      {"prompts_dir", c.prompts_dir.string()}};
}

void WriteResolvedConfig(const PipelineConfig& config, const std::string& stage) {
  WriteJson(config.out_dir / (stage + ".resolved_config.json"), ConfigToJson(config));
}

void RequireArtifact(const std::string& stage, const std::string& producer, const fs::path& path) {
  if (path.empty()) {
    throw Error(ErrorCode::kFailedPrecondition, stage + ": no input given (expected output of " + producer + ")");
  }
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kFailedPrecondition,
                stage + ": missing input '" + path.string() + "' (produced by " + producer + ")");
  }
}

std::unique_ptr<EmbeddingProvider> MakeEmbedder(const EmbeddingConfig& config) {
  if (config.provider == "hashed-ngram") return std::make_unique<HashedNgramEmbedder>(config.dim);
  if (config.provider == "remote") {
    const std::string key = ApiKeyFromEnv(config.remote.api_key_env);
    if (key.empty()) {
      throw Error(ErrorCode::kFailedPrecondition,
                  "remote embedder: environment variable " + config.remote.api_key_env + " is not set");
    }
    return std::make_unique<RemoteEmbedder>(config.remote, key);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown embedding provider '" + config.provider + "'");
}

Json RunIngest(const PipelineConfig& config) {
  if (config.conceptnet.empty() && config.wikidata.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ingest: no source given (conceptnet or wikidata)");
  }
  std::vector<RawTriple> triples;
  Json summary{{"stage", "ingest"}, {"sources", Json::object()}, {"source_hashes", Json::object()}};
  auto take = [&](const fs::path& path, Source source, IngestResult result) {
    summary["sources"][std::string(SourceName(source))] = ReportToJson(result.report);
    summary["source_hashes"][path.filename().string()] = HashFile(path);
    triples.insert(triples.end(), std::make_move_iterator(result.triples.begin()),
                   std::make_move_iterator(result.triples.end()));
  };
  if (!config.conceptnet.empty()) {
    RequireArtifact("ingest", "the ConceptNet dump", config.conceptnet);
    std::istringstream in(ReadFile(config.conceptnet));
    take(config.conceptnet, Source::kConceptNet,
         ParseConceptNet(in, ConceptNetOptions{config.language, config.weight_threshold}));
  }
  if (!config.wikidata.empty()) {
    RequireArtifact("ingest", "the Wikidata slice", config.wikidata);
    std::istringstream in(ReadFile(config.wikidata));
    take(config.wikidata, Source::kWikidata, ParseWikidata(in, WikidataOptions{config.popularity}));
  }
  fs::create_directories(config.out_dir);
  WriteFile(config.out_dir / kTriplesFile, WriteTriples(triples));
  summary["triples"] = triples.size();
  summary["outputs"] = {(config.out_dir / kTriplesFile).string()};
  WriteJson(config.out_dir / kIngestReportFile, summary);
  WriteResolvedConfig(config, "ingest");
  return summary;
}

Json RunLink(const PipelineConfig& config, const fs::path& triples_path) {
  RequireArtifact("link", "ingest", triples_path);
  const auto triples = ReadTriples(triples_path);
  std::map<std::string, std::vector<std::string>> aliases;
  if (!config.aliases.empty()) aliases = ReadAliases(config.aliases);
  const auto entries = RelationEntries(triples, aliases);
  if (entries.size() < 2) {
    throw Error(ErrorCode::kFailedPrecondition, "link: fewer than 2 relations in " + triples_path.string());
  }
  auto provider = MakeEmbedder(config.embedding);
  auto cache = MakeCache(config.embedding);
  const auto index = EmbedRelations(entries, *provider, cache ? &*cache : nullptr,
                                    config.embedding.with_aliases, ToEmbedOptions(config.embedding));
  const auto sets = AllCandidates(index, config.candidate_k);
  std::map<std::string, std::string> labels;
  for (const auto& e : entries) labels[e.id] = e.label;
  fs::create_directories(config.out_dir);
  WriteFile(config.out_dir / kCandidatesFile, WriteCandidates(sets, labels));
  WriteResolvedConfig(config, "link");
  return Json{{"stage", "link"},
              {"relations", entries.size()},
              {"candidate_k", config.candidate_k},
              {"embedder", provider->id()},
              {"outputs", {(config.out_dir / kCandidatesFile).string()}}};
}

Json RunLlmFilter(const PipelineConfig& config, const fs::path& candidates_path) {
  RequireArtifact("llm-filter", "link", candidates_path);
  const auto candidates = ReadCandidates(candidates_path);
  auto backend = MakeBackend(config.backend);
  const auto templates = PromptTemplates::Load(config.prompts_dir);
  const auto outcome = RunFilter(candidates.sets, candidates.labels, *backend, templates,
                                 FilterOptions{config.max_in_flight});
  fs::create_directories(config.out_dir);
  WriteFile(config.out_dir / kSelectionsFile, Lines(outcome.selections, SelectionToJson));
  WriteFile(config.out_dir / kMetaFile, Lines(outcome.meta_results, MetaResultToJson));
  WriteFile(config.out_dir / kPendingFile, Lines(outcome.pending, PairToJson));
  const Json funnel = FunnelToJson(outcome);
  WriteJson(config.out_dir / kFunnelFile, funnel);
  WriteResolvedConfig(config, "llm-filter");
  return Json{{"stage", "llm-filter"},
              {"funnel", funnel},
              {"outputs",
               {(config.out_dir / kSelectionsFile).string(), (config.out_dir / kMetaFile).string(),
                (config.out_dir / kPendingFile).string(), (config.out_dir / kFunnelFile).string()}}};
}

Json RunEnqueue(const PipelineConfig& config, const fs::path& pending, const fs::path& candidates,
                const fs::path& triples, const fs::path& log) {
  RequireArtifact("curate-serve", "llm-filter", pending);
  RequireArtifact("curate-serve", "link", candidates);
  RequireArtifact("curate-serve", "ingest", triples);
  AnnotatorRegistry registry;
  if (!config.annotators.empty()) registry = AnnotatorRegistry::Load(config.annotators);
  const auto kb = KnowledgeBase::Build(ReadTriples(triples), {});
  ReviewStore store(registry, CandidatePairs(ReadCandidates(candidates).sets), log);
  const auto created = store.Enqueue(ReadPairs(pending), &kb);
  return Json{{"stage", "curate-serve"},
              {"enqueued", created.size()},
              {"items", store.Items().size()},
              {"log", log.string()}};
}

Json RunBuildKb(const PipelineConfig& config, const fs::path& triples_path, const ApprovedSource& source) {
  RequireArtifact("build-kb", "ingest", triples_path);
  KbManifest manifest;
  manifest.built_at = UtcTimestamp();
  manifest.source_hashes[triples_path.filename().string()] = HashFile(triples_path);
  std::vector<AnalogousRelationPair> approved;
  if (source.decisions) {
    if (fs::exists(*source.decisions)) {
      ReviewStore store(AnnotatorRegistry{}, {}, *source.decisions);
      approved = store.ExportApproved();
      manifest.source_hashes[source.decisions->filename().string()] = HashFile(*source.decisions);
    } else {
      RequireArtifact("build-kb", "curate-serve", *source.decisions);
    }
  }
  if (source.approved) {
    RequireArtifact("build-kb", "curate-serve", *source.approved);
    for (auto& p : ReadPairs(*source.approved)) {
      if (p.status == PairStatus::kApproved) approved.push_back(std::move(p));
    }
    manifest.source_hashes[source.approved->filename().string()] = HashFile(*source.approved);
  }
  std::sort(approved.begin(), approved.end(), [](const auto& x, const auto& y) {
    return std::tie(x.rel_a, x.rel_b) < std::tie(y.rel_a, y.rel_b);
  });
  approved.erase(std::unique(approved.begin(), approved.end(),
                             [](const auto& x, const auto& y) {
                               return x.rel_a == y.rel_a && x.rel_b == y.rel_b;
                             }),
                 approved.end());
  const auto kb = KnowledgeBase::Build(ReadTriples(triples_path), approved);
  fs::create_directories(config.out_dir);
  WriteFile(config.out_dir / kApprovedFile, Lines(approved, PairToJson));
  SaveKb(kb, config.out_dir / kKbDir, manifest);
  WriteResolvedConfig(config, "build-kb");
  Json summary{{"stage", "build-kb"},
               {"relations", kb.relations().size()},
               {"analogous_pairs", approved.size()},
               {"warnings", Json::array()},
               {"outputs", {(config.out_dir / kKbDir).string(), (config.out_dir / kApprovedFile).string()}}};
  if (approved.empty()) summary["warnings"].push_back("no approved analogous relation pairs; KB has same-relation analogies only");
  return summary;
}

Json RunStats(const PipelineConfig& config, const fs::path& kb_dir) {
  RequireArtifact("stats", "build-kb", kb_dir);
  const Json stats = StatsToJson(ComputeStats(LoadKb(kb_dir)));
  fs::create_directories(config.out_dir);
  WriteJson(config.out_dir / "stats.json", stats);
  WriteResolvedConfig(config, "stats");
  return Json{{"stage", "stats"}, {"stats", stats}};
}

Json RunGenData(const PipelineConfig& config, const fs::path& kb_dir, const std::vector<fs::path>& exclude) {
  RequireArtifact("gen-data", "build-kb", kb_dir);
  const auto kb = LoadKb(kb_dir);
  RecognitionOptions ro;
  ro.n_same = config.n_same;
  ro.n_analogous = config.n_analogous;
  ro.seed = config.gen_seed;
  ro.exclude_shared_concepts = config.exclude_shared_concepts;
  auto recognition = MakeRecognitionDataset(kb, ro);
  auto generation = MakeGenerationDataset(kb, config.n_generation, config.gen_seed);

  std::vector<ExternalSet> tests;
  Json overlap = Json::object();
  for (const auto& path : exclude) {
    RequireArtifact("gen-data", "an external benchmark file", path);
    tests.push_back(LoadExternal(path));
    if (!tests.back().items.empty()) overlap[path.filename().string()] = ComputeOverlap(kb, tests.back()).rate;
  }
  const std::size_t mcqa_before = recognition.items.size();
  const std::size_t gen_before = generation.items.size();
  if (!tests.empty()) {
    recognition.items = ExcludeOverlap(recognition.items, tests);
    generation.items = ExcludeOverlap(generation.items, tests);
  }
  fs::create_directories(config.out_dir);
  WriteFile(config.out_dir / kRecognitionFile, Lines(recognition.items, McqaToJson));
  WriteFile(config.out_dir / kGenerationFile, Lines(generation.items, GenToJson));
  WriteResolvedConfig(config, "gen-data");
  return Json{{"stage", "gen-data"},
              {"seed", config.gen_seed},
              {"recognition",
               {{"items", recognition.items.size()},
                {"skipped_queries", recognition.skipped_queries},
                {"excluded_shared_concept", recognition.excluded_shared_concept},
                {"excluded_overlap", mcqa_before - recognition.items.size()},
                {"short_of_request", recognition.short_of_request}}},
              {"generation",
               {{"items", generation.items.size()},
                {"excluded_overlap", gen_before - generation.items.size()},
                {"short_of_request", generation.short_of_request}}},
              {"external_overlap_rate", overlap},
              {"outputs",
               {(config.out_dir / kRecognitionFile).string(), (config.out_dir / kGenerationFile).string()}}};
}

Json RunEval(const PipelineConfig& config, const EvalInputs& in) {
  Json report;
  if (in.task == "recognition") {
    RequireArtifact("eval", "gen-data", in.dataset);
    const auto items = ReadMcqa(in.dataset);
    std::vector<Prediction> preds;
    if (in.baseline == "offset") {
      RequireArtifact("eval", "a word-vector file", in.vectors);
      const auto vectors = WordVectors::Load(in.vectors);
      for (const auto& item : items) preds.push_back(OffsetPredict(item, vectors));
    } else if (in.baseline == "sentence") {
      auto provider = MakeEmbedder(config.embedding);
      auto cache = MakeCache(config.embedding);
      std::vector<std::string> sentences;
      for (const auto& item : items) {
        sentences.push_back(item.query.subject + " is to " + item.query.object);
        for (const auto& c : item.candidates) sentences.push_back(c.subject + " is to " + c.object);
      }
      const auto vectors = EmbedTexts(sentences, *provider, cache ? &*cache : nullptr,
                                      ToEmbedOptions(config.embedding));
      const SentenceEmbedder embed = [&](const std::string& s) -> std::optional<EmbeddingVector> {
        auto it = vectors.find(s);
        if (it == vectors.end()) return std::nullopt;
        return it->second;
      };
      for (const auto& item : items) preds.push_back(SentencePredict(item, embed));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "eval: unknown baseline '" + in.baseline + "'");
    }
    RecognitionReport r;
    r.baseline = in.baseline;
    r.items = items.size();
    std::vector<std::size_t> got, gold;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!preds[i].index) {
        ++r.skipped;
        continue;
      }
      got.push_back(*preds[i].index);
      gold.push_back(items[i].answer_index);
      correct += got.back() == gold.back() ? 1 : 0;
    }
    if (!got.empty()) r.accuracy = Accuracy(got, gold);
    if (!items.empty()) r.accuracy_all = static_cast<double>(correct) / static_cast<double>(items.size());
    report = RecognitionReportToJson(r);
  } else if (in.task == "generation") {
    RequireArtifact("eval", "gen-data", in.dataset);
    RequireArtifact("eval", "a predictions file", in.predictions);
    report = GenerationReportToJson(
        EvaluateGeneration(ReadGen(in.dataset), ReadPredictions(in.predictions), config.mrr_window));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "eval: task must be recognition or generation");
  }
  fs::create_directories(config.out_dir);
  WriteJson(config.out_dir / "eval_report.json", report);
  WriteFile(config.out_dir / "eval_report.txt", FormatReportTable(report));
  WriteResolvedConfig(config, "eval");
  return Json{{"stage", "eval"}, {"report", report}};
}

Json RunRetrieve(const PipelineConfig& config, const RetrieveInputs& in) {
  RequireArtifact("retrieve", "build-kb", in.kb_dir);
  if (in.queries.empty()) throw Error(ErrorCode::kInvalidArgument, "retrieve: no queries");
  const auto kb = LoadKb(in.kb_dir);
  auto pool_analogies = SampleAnalogies(kb, SampleKind::kAny, config.retrieval_pool, config.retrieve_seed).analogies;
  auto provider = MakeEmbedder(config.embedding);
  auto cache = MakeCache(config.embedding);
  const AnalogyPool pool(std::move(pool_analogies), *provider, cache ? &*cache : nullptr,
                         ToEmbedOptions(config.embedding));
  std::vector<Json> rows;
  for (const auto& q : in.queries) {
    const auto prompt = RetrieveTopKAnalogies(AnalogyQuery{q[0], q[1], q[2]}, pool, *provider, config.retrieval_k);
    Json exemplars = Json::array();
    for (const auto& x : prompt.exemplars) exemplars.push_back(AnalogyToJson(x));
    rows.push_back(Json{{"query", {{"a", q[0]}, {"b", q[1]}, {"c", q[2]}}},
                        {"exemplars", exemplars},
                        {"rendered", prompt.rendered}});
  }
  fs::create_directories(config.out_dir);
  WriteFile(config.out_dir / kRetrievalFile, ToJsonLines(rows));
  WriteResolvedConfig(config, "retrieve");
  return Json{{"stage", "retrieve"},
              {"pool", pool.analogies().size()},
              {"k", config.retrieval_k},
              {"queries", in.queries.size()},
              {"outputs", {(config.out_dir / kRetrievalFile).string()}}};
}

}  // namespace analogy
