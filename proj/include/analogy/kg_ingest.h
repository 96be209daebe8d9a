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

#ifndef ANALOGY_KG_INGEST_H_
#define ANALOGY_KG_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "analogy/util.h"

namespace analogy {

enum class Source { kConceptNet, kWikidata };

std::string_view SourceName(Source source);
Source ParseSource(std::string_view name);

// One subject-relation-object assertion read from a KG dump. `score` is the
// assertion weight (ConceptNet) or the popularity pageview count (Wikidata).
struct RawTriple {
  std::string subject;
  std::string relation;
  std::string object;
  double score = 0.0;
  Source source = Source::kConceptNet;

  bool operator==(const RawTriple&) const = default;
};

struct IngestReport {
  std::uint64_t triples_read = 0;
  std::uint64_t triples_kept = 0;
  std::uint64_t triples_dropped_by_weight = 0;
  std::uint64_t relations_seen = 0;
  std::uint64_t malformed_lines = 0;

  bool operator==(const IngestReport&) const = default;
};

struct IngestResult {
  std::vector<RawTriple> triples;
  IngestReport report;
};

// Trims, collapses internal whitespace, maps '_' to ' ' and applies Unicode
// NFC. ConceptNet concepts are lowercased; Wikidata labels keep their case.
// Throws kInvalidArgument when nothing usable remains.
std::string NormalizeConcept(std::string_view raw, Source source);

// Unicode lowercase; used wherever concepts or labels are matched
// case-insensitively.
std::string FoldCase(std::string_view s);

struct ConceptNetOptions {
  std::string language = "en";
  // Assertions are kept only when weight > min_weight (strict).
  double min_weight = 2.0;
};

// Parses the 5-column ConceptNet assertion dump:
//   assertion-uri  /r/Rel  /c/<lang>/<term>[/...]  /c/<lang>/<term>[/...]  {json}
// Lines whose endpoints are not both in `language` are read but not kept.
IngestResult ParseConceptNet(std::istream& in, const ConceptNetOptions& options = {});

enum class PopularityField { kSubject, kObject, kSum };

std::string_view PopularityFieldName(PopularityField field);
PopularityField ParsePopularityField(std::string_view name);

struct WikidataOptions {
  PopularityField popularity = PopularityField::kSubject;
};

// Parses the Wikidata slice TSV:
//   subject  property  object  pageviews [object_pageviews]
// A leading header row is skipped. The optional fifth column is only needed
// for the kObject and kSum popularity modes.
IngestResult ParseWikidata(std::istream& in, const WikidataOptions& options = {});

// Canonical triples file: one {"subject","relation","object","score","source"}
// object per line.
Json TripleToJson(const RawTriple& triple);
RawTriple TripleFromJson(const Json& j);
std::string WriteTriples(const std::vector<RawTriple>& triples);
std::vector<RawTriple> ReadTriples(const std::filesystem::path& path);

Json ReportToJson(const IngestReport& report);

}  // namespace analogy

#endif  // ANALOGY_KG_INGEST_H_
