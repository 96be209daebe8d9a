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

#include <csignal>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "analogy/analogy_kb.h"
#include "analogy/curation.h"
#include "analogy/curation_server.h"
#include "analogy/error.h"
#include "analogy/kg_ingest.h"
#include "analogy/pipeline.h"
#include "analogy/relation_linker.h"

namespace fs = std::filesystem;
using namespace analogy;

namespace {

CurationServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int ExitCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 2;
    case ErrorCode::kFailedPrecondition: return 3;
    case ErrorCode::kNotFound: return 4;
    case ErrorCode::kDataLoss: return 5;
    case ErrorCode::kUnavailable: return 6;
    default: return 1;
  }
}

fs::path Or(const std::string& flag, const fs::path& fallback) {
  return flag.empty() ? fallback : fs::path(flag);
}

std::vector<std::array<std::string, 3>> ParseQueries(const std::vector<std::string>& inline_queries,
                                                     const std::string& file) {
  std::vector<std::string> lines = inline_queries;
  if (!file.empty()) {
    const std::string text = ReadFile(file);
    for (auto line : SplitLines(text)) {
      if (!Trim(line).empty()) lines.emplace_back(line);
    }
  }
  std::vector<std::array<std::string, 3>> out;
  for (const auto& line : lines) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, line.find('\t') != std::string::npos ? '\t' : ',')) {
      parts.emplace_back(Trim(part));
    }
    if (parts.size() != 3) {
      throw Error(ErrorCode::kInvalidArgument, "query '" + line + "': expected a,b,c");
    }
    out.push_back({parts[0], parts[1], parts[2]});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analogy knowledge-base toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Pipeline config (JSON)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed for sampling stages");

  auto* ingest = app.add_subcommand("ingest", "Parse KG dumps into triples");
  std::string conceptnet, wikidata, language, popularity;
  std::optional<double> threshold;
  ingest->add_option("--conceptnet", conceptnet, "ConceptNet assertions (tsv, optionally .gz)");
  ingest->add_option("--wikidata", wikidata, "Wikidata slice (tsv)");
  ingest->add_option("--language", language, "ConceptNet language");
  ingest->add_option("--weight-threshold", threshold, "Keep ConceptNet weight > threshold");
  ingest->add_option("--popularity", popularity, "subject | object | sum");

  auto* link = app.add_subcommand("link", "Top-k candidate relations by label embedding");
  std::string triples;
  std::optional<std::size_t> candidate_k;
  std::string aliases;
  link->add_option("--triples", triples, "triples.jsonl from ingest");
  link->add_option("--k", candidate_k, "Candidates per relation");
  link->add_option("--aliases", aliases, "Relation aliases (tsv)");

  auto* filter = app.add_subcommand("llm-filter", "LLM selection with symmetry and meta rules");
  std::string candidates, transcript;
  filter->add_option("--candidates", candidates, "candidates.jsonl from link");
  filter->add_option("--transcript", transcript, "Replay transcript (replay backend)");

  auto* serve = app.add_subcommand("curate-serve", "Review queue and HTTP API");
  std::string pending, log, annotators, static_dir, host = "127.0.0.1";
  int port = 8080;
  bool enqueue_only = false;
  serve->add_option("--pending", pending, "pending_pairs.jsonl from llm-filter");
  serve->add_option("--candidates", candidates, "candidates.jsonl from link");
  serve->add_option("--triples", triples, "triples.jsonl from ingest");
  serve->add_option("--log", log, "Decision event log");
  serve->add_option("--annotators", annotators, "Annotator registry (JSON)");
  serve->add_option("--static-dir", static_dir, "Built review UI assets");
  serve->add_option("--host", host, "Bind host");
  serve->add_option("--port", port, "Bind port (0: any)");
  serve->add_flag("--enqueue-only", enqueue_only, "Enqueue pending pairs and exit");

  auto* build = app.add_subcommand("build-kb", "Assemble the knowledge base");
  std::string decisions, approved;
  build->add_option("--triples", triples, "triples.jsonl from ingest");
  auto* decisions_opt = build->add_option("--decisions", decisions, "Decision event log");
  build->add_option("--approved", approved, "Approved pairs (jsonl)")->excludes(decisions_opt);

  auto* stats = app.add_subcommand("stats", "KB counts");
  std::string kb_dir;
  stats->add_option("--kb", kb_dir, "KB directory from build-kb");

  auto* gen = app.add_subcommand("gen-data", "Recognition and generation datasets");
  std::vector<std::string> exclude;
  std::optional<std::size_t> n_same, n_analogous, n_generation;
  bool exclude_shared = false;
  gen->add_option("--kb", kb_dir, "KB directory from build-kb");
  gen->add_option("--n-same", n_same, "Same-relation MCQA items");
  gen->add_option("--n-analogous", n_analogous, "Analogous-relation MCQA items");
  gen->add_option("--n-generation", n_generation, "Generation items");
  gen->add_option("--exclude", exclude, "External benchmark files to exclude");
  gen->add_flag("--exclude-shared-concepts", exclude_shared, "Drop items whose query and answer share a concept");

  auto* eval = app.add_subcommand("eval", "Baselines and metrics");
  EvalInputs eval_in;
  std::string dataset, vectors, predictions;
  std::optional<std::size_t> mrr_window;
  eval->add_option("--task", eval_in.task, "recognition | generation")->required();
  eval->add_option("--dataset", dataset, "Dataset jsonl from gen-data");
  eval->add_option("--vectors", vectors, "Word vectors (text format)");
  eval->add_option("--baseline", eval_in.baseline, "offset | sentence");
  eval->add_option("--predictions", predictions, "Ranked predictions (jsonl)");
  eval->add_option("--mrr-window", mrr_window, "MRR window");

  auto* retrieve = app.add_subcommand("retrieve", "Top-k analogy exemplars for few-shot prompts");
  std::vector<std::string> queries;
  std::string query_file;
  std::optional<std::size_t> retrieval_k;
  retrieve->add_option("--kb", kb_dir, "KB directory from build-kb");
  retrieve->add_option("--query", queries, "a,b,c");
  retrieve->add_option("--queries", query_file, "File with one a,b,c query per line");
  retrieve->add_option("--k", retrieval_k, "Exemplars per prompt");

  CLI11_PARSE(app, argc, argv);

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    PipelineConfig config;
    if (!config_path.empty()) config = LoadConfig(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed) config.gen_seed = config.retrieve_seed = *seed;
    if (!conceptnet.empty()) config.conceptnet = conceptnet;
    if (!wikidata.empty()) config.wikidata = wikidata;
    if (!language.empty()) config.language = language;
    if (threshold) config.weight_threshold = *threshold;
    if (!popularity.empty()) config.popularity = ParsePopularityField(popularity);
    if (!aliases.empty()) config.aliases = aliases;
    if (candidate_k) config.candidate_k = *candidate_k;
    if (!transcript.empty()) {
      config.backend.kind = BackendKind::kReplay;
      config.backend.transcript = transcript;
    }
    if (!annotators.empty()) config.annotators = annotators;
    if (n_same) config.n_same = *n_same;
    if (n_analogous) config.n_analogous = *n_analogous;
    if (n_generation) config.n_generation = *n_generation;
    if (exclude_shared) config.exclude_shared_concepts = true;
    if (mrr_window) config.mrr_window = *mrr_window;
    if (retrieval_k) config.retrieval_k = *retrieval_k;

    const fs::path out = config.out_dir;
    const fs::path triples_path = Or(triples, out / kTriplesFile);
    const fs::path candidates_path = Or(candidates, out / kCandidatesFile);
    const fs::path kb_path = Or(kb_dir, out / kKbDir);
    Json summary;

    if (stage == "ingest") {
      summary = RunIngest(config);
    } else if (stage == "link") {
      summary = RunLink(config, triples_path);
    } else if (stage == "llm-filter") {
      summary = RunLlmFilter(config, candidates_path);
    } else if (stage == "curate-serve") {
      const fs::path log_path = Or(log, out / kDecisionsFile);
      const fs::path pending_path = Or(pending, out / kPendingFile);
      if (fs::exists(pending_path) || !pending.empty()) {
        summary = RunEnqueue(config, pending_path, candidates_path, triples_path, log_path);
      }
      if (enqueue_only) {
        if (summary.is_null()) RequireArtifact("curate-serve", "llm-filter", pending_path);
      } else {
        RequireArtifact("curate-serve", "link", candidates_path);
        RequireArtifact("curate-serve", "ingest", triples_path);
        AnnotatorRegistry registry;
        if (!config.annotators.empty()) registry = AnnotatorRegistry::Load(config.annotators);
        const auto kb = KnowledgeBase::Build(ReadTriples(triples_path), {});
        ReviewStore store(registry, CandidatePairs(ReadCandidates(candidates_path).sets), log_path);
        CurationServer server(store, &kb,
                              static_dir.empty() ? std::nullopt : std::optional<fs::path>(static_dir));
        g_server = &server;
        std::signal(SIGINT, HandleSignal);
        std::signal(SIGTERM, HandleSignal);
        const int bound = port == 0 ? server.BindToAnyPort(host) : port;
        std::cout << Json{{"stage", "curate-serve"}, {"host", host}, {"port", bound},
                          {"log", log_path.string()}, {"items", store.Items().size()}}
                         .dump()
                  << std::endl;
        const bool ok = port == 0 ? server.ListenAfterBind() : server.Listen(host, port);
        g_server = nullptr;
        if (!ok && port != 0) {
          throw Error(ErrorCode::kUnavailable, "cannot bind " + host + ":" + std::to_string(port));
        }
        return 0;
      }
    } else if (stage == "build-kb") {
      ApprovedSource source;
      if (!approved.empty()) {
        source.approved = approved;
      } else {
        source.decisions = Or(decisions, out / kDecisionsFile);
      }
      summary = RunBuildKb(config, triples_path, source);
      for (const auto& w : summary["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    } else if (stage == "stats") {
      summary = RunStats(config, kb_path);
    } else if (stage == "gen-data") {
      std::vector<fs::path> paths(exclude.begin(), exclude.end());
      summary = RunGenData(config, kb_path, paths);
    } else if (stage == "eval") {
      const bool recognition = eval_in.task == "recognition";
      eval_in.dataset = Or(dataset, out / (recognition ? kRecognitionFile : kGenerationFile));
      eval_in.vectors = vectors;
      eval_in.predictions = predictions;
      summary = RunEval(config, eval_in);
    } else if (stage == "retrieve") {
      summary = RunRetrieve(config, RetrieveInputs{kb_path, ParseQueries(queries, query_file)});
    }
    std::cout << summary.dump(2) << std::endl;
    return 0;
  } catch (const Error& e) {
    std::cerr << "analogy " << stage << ": " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return ExitCode(e.code());
  } catch (const std::exception& e) {
    std::cerr << "analogy " << stage << ": " << e.what() << '\n';
    return 1;
  }
}
