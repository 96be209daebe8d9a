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

#include "analogy/llm_filter.h"

#include <algorithm>
#include <future>
#include <set>

#include "analogy/error.h"
#include "analogy/kg_ingest.h"

namespace analogy {

namespace {

// Template files may open with '#' comment lines.
std::string ReadOptional(const std::filesystem::path& path, const std::string& fallback) {
  if (!std::filesystem::exists(path)) return fallback;
  const std::string text = ReadFile(path);
  std::string_view body = text;
  while (!body.empty() && body.front() == '#') {
    const auto eol = body.find('\n');
    body = eol == std::string_view::npos ? std::string_view() : body.substr(eol + 1);
  }
  return std::string(Trim(body));
}

std::string_view StripDecorations(std::string_view s) {
  s = Trim(s);
  while (!s.empty() && (s.front() == '[' || s.front() == '"')) s = Trim(s.substr(1));
  while (!s.empty() && (s.back() == ']' || s.back() == '.' || s.back() == '"')) {
    s = Trim(s.substr(0, s.size() - 1));
  }
  return s;
}

// Runs fn(i) for i in [0, n) with at most `in_flight` calls outstanding and
// returns the results in index order.
template <typename Fn>
auto RunOrdered(std::size_t n, std::size_t in_flight, Fn fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> out;
  out.reserve(n);
  in_flight = std::max<std::size_t>(1, in_flight);
  for (std::size_t start = 0; start < n; start += in_flight) {
    const std::size_t end = std::min(n, start + in_flight);
    if (in_flight == 1) {
      out.push_back(fn(start));
      continue;
    }
    std::vector<std::future<Result>> futures;
    for (std::size_t i = start; i < end; ++i) futures.push_back(std::async(std::launch::async, fn, i));
    for (auto& f : futures) out.push_back(f.get());
  }
  return out;
}

}  // namespace

PromptTemplates PromptTemplates::Load(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.selection_task = ReadOptional(dir / "selection_task.txt", t.selection_task);
  t.selection_exemplars = ReadOptional(dir / "selection_exemplars.txt", "");
  t.meta_task = ReadOptional(dir / "meta_task.txt", t.meta_task);
  t.meta_exemplars = ReadOptional(dir / "meta_exemplars.txt", "");
  return t;
}

std::string BuildSelectionPrompt(const std::string& query,
                                 const std::vector<std::string>& candidates,
                                 const PromptTemplates& templates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "selection prompt for '" + query + "' needs at least one candidate");
  }
  std::string prompt = templates.selection_task + "\n\n";
  const std::string_view exemplars = Trim(templates.selection_exemplars);
  if (!exemplars.empty()) {
    prompt += exemplars;
    prompt += "\n\n";
  }
  prompt += "Given relation: " + query + "\nRelation candidates: [";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i > 0) prompt += ", ";
    prompt += candidates[i];
  }
  prompt += "]\nAnswer:";
  return prompt;
}

std::string BuildMetaPrompt(const std::string& relation_a, const std::string& relation_b,
                            const PromptTemplates& templates) {
  std::string prompt = templates.meta_task + "\n\n";
  const std::string_view exemplars = Trim(templates.meta_exemplars);
  if (!exemplars.empty()) {
    prompt += exemplars;
    prompt += "\n\n";
  }
  prompt += "The relation [" + relation_a + "] and the relation [" + relation_b +
            "] can form an analogy because both of them can be induced into a relation:";
  return prompt;
}

SelectionResult ParseSelection(const std::string& query,
                               const std::vector<std::string>& candidates_shown,
                               const std::map<std::string, std::string>& labels,
                               const std::string& response) {
  SelectionResult result;
  result.query = query;
  result.candidates_shown = candidates_shown;
  result.raw_response = response;

  auto label_of = [&](const std::string& id) {
    auto it = labels.find(id);
    return it == labels.end() ? id : it->second;
  };
  std::set<std::string> chosen;
  std::size_t start = 0;
  while (start <= response.size()) {
    std::size_t end = response.find_first_of(",\n", start);
    if (end == std::string::npos) end = response.size();
    const std::string_view token =
        StripDecorations(std::string_view(response).substr(start, end - start));
    start = end + 1;
    if (token.empty() || token == "..." || token == "…") continue;
    const std::string key = FoldCase(token);
    if (key == "none") continue;
    bool matched = false;
    for (const auto& id : candidates_shown) {
      if (FoldCase(Trim(label_of(id))) == key) {
        chosen.insert(id);
        matched = true;
      }
    }
    if (!matched) result.unmatched.emplace_back(token);
  }
  for (const auto& id : candidates_shown) {
    if (chosen.count(id)) result.selected.push_back(id);
  }
  return result;
}

SelectionResult SelectAnalogous(const CandidateSet& candidates,
                                const std::map<std::string, std::string>& labels,
                                LlmBackend& backend, const PromptTemplates& templates) {
  auto label_of = [&](const std::string& id) {
    auto it = labels.find(id);
    return it == labels.end() ? id : it->second;
  };
  std::vector<std::string> ids;
  std::vector<std::string> shown;
  std::set<std::string> seen_labels;
  for (const auto& c : candidates.candidates) {
    ids.push_back(c.id);
    const std::string label = label_of(c.id);
    if (seen_labels.insert(label).second) shown.push_back(label);
  }
  const std::string prompt =
      BuildSelectionPrompt(label_of(candidates.query_relation), shown, templates);
  return ParseSelection(candidates.query_relation, ids, labels, backend.Complete(prompt));
}

namespace {

RelationIdPair Ordered(const std::string& x, const std::string& y) {
  return x < y ? RelationIdPair{x, y} : RelationIdPair{y, x};
}

}  // namespace

std::vector<RelationIdPair> RawSelectedPairs(const std::vector<SelectionResult>& results) {
  std::set<RelationIdPair> pairs;
  for (const auto& r : results) {
    for (const auto& s : r.selected) {
      if (s != r.query) pairs.insert(Ordered(r.query, s));
    }
  }
  return {pairs.begin(), pairs.end()};
}

std::vector<RelationIdPair> ApplySymmetryRule(const std::vector<SelectionResult>& results) {
  std::map<std::string, std::set<std::string>> selected;
  for (const auto& r : results) selected[r.query].insert(r.selected.begin(), r.selected.end());
  std::set<RelationIdPair> kept;
  for (const auto& [query, picks] : selected) {
    for (const auto& other : picks) {
      if (other == query) continue;
      auto it = selected.find(other);
      if (it != selected.end() && it->second.count(query)) kept.insert(Ordered(query, other));
    }
  }
  return {kept.begin(), kept.end()};
}

std::optional<std::string> ParseMetaCompletion(const std::string& response) {
  std::string_view text = response;
  constexpr std::string_view kAnchor = "induced into a relation:";
  if (const auto pos = text.rfind(kAnchor); pos != std::string_view::npos) {
    text.remove_prefix(pos + kAnchor.size());
  }
  text = Trim(text);
  text = text.substr(0, text.find('\n'));
  if (const auto stop = text.find(". "); stop != std::string_view::npos) text = text.substr(0, stop);
  const std::string_view meta = StripDecorations(text);
  if (meta.empty() || FoldCase(meta) == "none") return std::nullopt;
  return std::string(meta);
}

MetaRelationResult SummarizeMeta(const RelationIdPair& pair,
                                 const std::map<std::string, std::string>& labels,
                                 LlmBackend& backend, const PromptTemplates& templates) {
  auto label_of = [&](const std::string& id) {
    auto it = labels.find(id);
    return it == labels.end() ? id : it->second;
  };
  const std::string prompt = BuildMetaPrompt(label_of(pair.first), label_of(pair.second), templates);
  MetaRelationResult result{pair, std::nullopt, backend.Complete(prompt)};
  result.meta = ParseMetaCompletion(result.raw_response);
  return result;
}

std::vector<AnalogousRelationPair> ApplyMetaRule(const std::vector<MetaRelationResult>& results) {
  std::vector<AnalogousRelationPair> out;
  for (const auto& r : results) {
    if (!r.meta) continue;
    out.push_back(Canonical(AnalogousRelationPair{r.pair.first, r.pair.second, *r.meta,
                                                  Provenance::kAuto, PairStatus::kPending}));
  }
  return out;
}

FilterOutcome RunFilter(const std::vector<CandidateSet>& candidate_sets,
                        const std::map<std::string, std::string>& labels,
                        LlmBackend& backend, const PromptTemplates& templates,
                        const FilterOptions& options) {
  std::vector<const CandidateSet*> active;
  for (const auto& set : candidate_sets) {
    if (!set.candidates.empty()) active.push_back(&set);
  }
  FilterOutcome out;
  out.selections = RunOrdered(active.size(), options.max_in_flight, [&](std::size_t i) {
    return SelectAnalogous(*active[i], labels, backend, templates);
  });
  out.raw_pairs = RawSelectedPairs(out.selections);
  out.rule1_pairs = ApplySymmetryRule(out.selections);
  out.meta_results = RunOrdered(out.rule1_pairs.size(), options.max_in_flight, [&](std::size_t i) {
    return SummarizeMeta(out.rule1_pairs[i], labels, backend, templates);
  });
  out.pending = ApplyMetaRule(out.meta_results);
  return out;
}

Json SelectionToJson(const SelectionResult& r) {
  return Json{{"query", r.query},
              {"candidates_shown", r.candidates_shown},
              {"selected", r.selected},
              {"unmatched", r.unmatched},
              {"raw_response", r.raw_response}};
}

Json MetaResultToJson(const MetaRelationResult& r) {
  return Json{{"rel_a", r.pair.first},
              {"rel_b", r.pair.second},
              {"meta", r.meta ? Json(*r.meta) : Json(nullptr)},
              {"raw_response", r.raw_response}};
}

Json FunnelToJson(const FilterOutcome& o) {
  std::size_t unmatched = 0;
  for (const auto& s : o.selections) unmatched += s.unmatched.size();
  return Json{{"queries", o.selections.size()},
              {"raw_pairs", o.raw_pairs.size()},
              {"after_rule1", o.rule1_pairs.size()},
              {"after_rule2", o.pending.size()},
              {"unmatched_tokens", unmatched}};
}

}  // namespace analogy
