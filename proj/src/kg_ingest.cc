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

#include "analogy/kg_ingest.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include "analogy/error.h"

namespace analogy {

std::string_view SourceName(Source source) {
  return source == Source::kConceptNet ? "conceptnet" : "wikidata";
}

Source ParseSource(std::string_view name) {
  if (name == "conceptnet") return Source::kConceptNet;
  if (name == "wikidata") return Source::kWikidata;
  throw Error(ErrorCode::kInvalidArgument, "unknown source '" + std::string(name) + "'");
}

std::string NormalizeConcept(std::string_view raw, Source source) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text.findAndReplace(icu::UnicodeString(u'_'), icu::UnicodeString(u' '));
  if (source == Source::kConceptNet) text.toLower(icu::Locale::getRoot());

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInternal, "ICU NFC unavailable");
  icu::UnicodeString composed = nfc->normalize(text, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInternal, "ICU NFC failed");

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < composed.length();) {
    const UChar32 c = composed.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !collapsed.isEmpty();
      continue;
    }
    if (pending_space) collapsed.append(u' ');
    pending_space = false;
    collapsed.append(c);
  }
  std::string out;
  collapsed.toUTF8String(out);
  if (out.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "empty concept after normalization: '" + std::string(raw) + "'");
  }
  return out;
}

std::string FoldCase(std::string_view s) {
  icu::UnicodeString text =
      icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  text.toLower(icu::Locale::getRoot());
  std::string out;
  text.toUTF8String(out);
  return out;
}

namespace {

struct ConceptUri {
  std::string_view language;
  std::string_view term;
};

// /c/<lang>/<term>[/<pos>/...]
std::optional<ConceptUri> SplitConceptUri(std::string_view uri) {
  if (uri.substr(0, 3) != "/c/") return std::nullopt;
  uri.remove_prefix(3);
  const auto slash = uri.find('/');
  if (slash == std::string_view::npos || slash == 0) return std::nullopt;
  ConceptUri out{uri.substr(0, slash), uri.substr(slash + 1)};
  out.term = out.term.substr(0, out.term.find('/'));
  if (out.term.empty()) return std::nullopt;
  return out;
}

std::optional<double> ParseWeight(std::string_view blob) {
  Json meta = Json::parse(blob, nullptr, /*allow_exceptions=*/false);
  if (!meta.is_object()) return std::nullopt;
  auto it = meta.find("weight");
  if (it == meta.end() || !it->is_number()) return std::nullopt;
  const double w = it->get<double>();
  if (!std::isfinite(w) || w < 0) return std::nullopt;
  return w;
}

std::optional<std::uint64_t> ParseCount(std::string_view s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::string> TryNormalize(std::string_view raw, Source source) {
  try {
    return NormalizeConcept(raw, source);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

IngestResult ParseConceptNet(std::istream& in, const ConceptNetOptions& options) {
  IngestResult result;
  IngestReport& report = result.report;
  std::set<std::string> relations;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    ++report.triples_read;

    const auto fields = SplitTabs(line);
    if (fields.size() != 5 || fields[1].substr(0, 3) != "/r/" || fields[1].size() == 3) {
      ++report.malformed_lines;
      continue;
    }
    const auto start = SplitConceptUri(fields[2]);
    const auto end = SplitConceptUri(fields[3]);
    const auto weight = ParseWeight(fields[4]);
    if (!start || !end || !weight) {
      ++report.malformed_lines;
      continue;
    }
    if (start->language != options.language || end->language != options.language) continue;

    auto subject = TryNormalize(start->term, Source::kConceptNet);
    auto object = TryNormalize(end->term, Source::kConceptNet);
    if (!subject || !object) {
      ++report.malformed_lines;
      continue;
    }
    if (!(*weight > options.min_weight)) {
      ++report.triples_dropped_by_weight;
      continue;
    }
    std::string relation(fields[1].substr(3));
    relations.insert(relation);
    result.triples.push_back(RawTriple{std::move(*subject), std::move(relation),
                                       std::move(*object), *weight, Source::kConceptNet});
    ++report.triples_kept;
  }
  report.relations_seen = relations.size();
  return result;
}

std::string_view PopularityFieldName(PopularityField field) {
  switch (field) {
    case PopularityField::kSubject: return "subject";
    case PopularityField::kObject: return "object";
    case PopularityField::kSum: return "sum";
  }
  return "subject";
}

PopularityField ParsePopularityField(std::string_view name) {
  if (name == "subject") return PopularityField::kSubject;
  if (name == "object") return PopularityField::kObject;
  if (name == "sum") return PopularityField::kSum;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown popularity field '" + std::string(name) + "'");
}

IngestResult ParseWikidata(std::istream& in, const WikidataOptions& options) {
  IngestResult result;
  IngestReport& report = result.report;
  std::set<std::string> relations;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const auto fields = SplitTabs(line);
    if (first) {
      first = false;
      if (fields.size() >= 4 && Trim(fields[0]) == "subject" && Trim(fields[1]) == "property") {
        continue;
      }
    }
    ++report.triples_read;
    if (fields.size() != 4 && fields.size() != 5) {
      ++report.malformed_lines;
      continue;
    }
    auto subject = TryNormalize(fields[0], Source::kWikidata);
    auto relation = TryNormalize(fields[1], Source::kWikidata);
    auto object = TryNormalize(fields[2], Source::kWikidata);
    const auto subject_views = ParseCount(Trim(fields[3]));
    std::optional<std::uint64_t> object_views;
    if (fields.size() == 5) {
      object_views = ParseCount(Trim(fields[4]));
      if (!object_views) {
        ++report.malformed_lines;
        continue;
      }
    }
    if (!subject || !relation || !object || !subject_views) {
      ++report.malformed_lines;
      continue;
    }
    double score = 0;
    switch (options.popularity) {
      case PopularityField::kSubject:
        score = static_cast<double>(*subject_views);
        break;
      case PopularityField::kObject:
      case PopularityField::kSum:
        if (!object_views) {
          ++report.malformed_lines;
          continue;
        }
        score = static_cast<double>(*object_views);
        if (options.popularity == PopularityField::kSum) {
          score += static_cast<double>(*subject_views);
        }
        break;
    }
    relations.insert(*relation);
    result.triples.push_back(RawTriple{std::move(*subject), std::move(*relation),
                                       std::move(*object), score, Source::kWikidata});
    ++report.triples_kept;
  }
  report.relations_seen = relations.size();
  return result;
}

Json TripleToJson(const RawTriple& t) {
  return Json{{"subject", t.subject},
              {"relation", t.relation},
              {"object", t.object},
              {"score", t.score},
              {"source", SourceName(t.source)}};
}

RawTriple TripleFromJson(const Json& j) {
  return RawTriple{j.at("subject").get<std::string>(), j.at("relation").get<std::string>(),
                   j.at("object").get<std::string>(), j.at("score").get<double>(),
                   ParseSource(j.at("source").get<std::string>())};
}

std::string WriteTriples(const std::vector<RawTriple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    out += TripleToJson(t).dump();
    out += '\n';
  }
  return out;
}

std::vector<RawTriple> ReadTriples(const std::filesystem::path& path) {
  std::vector<RawTriple> out;
  for (const Json& row : ReadJsonLines(path)) {
    try {
      out.push_back(TripleFromJson(row));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": bad triple: " + e.what());
    }
  }
  return out;
}

Json ReportToJson(const IngestReport& r) {
  return Json{{"triples_read", r.triples_read},
              {"triples_kept", r.triples_kept},
              {"triples_dropped_by_weight", r.triples_dropped_by_weight},
              {"relations_seen", r.relations_seen},
              {"malformed_lines", r.malformed_lines}};
}

}  // namespace analogy
