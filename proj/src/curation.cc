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

#include "analogy/curation.h"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "analogy/error.h"

namespace analogy {

std::string_view VerdictName(Verdict v) { return v == Verdict::kAccept ? "accept" : "reject"; }

Verdict ParseVerdict(std::string_view name) {
  if (name == "accept") return Verdict::kAccept;
  if (name == "reject") return Verdict::kReject;
  throw Error(ErrorCode::kInvalidArgument,
              "verdict must be 'accept' or 'reject', got '" + std::string(name) + "'");
}

std::string_view ReviewStatusName(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::kPending: return "pending";
    case ReviewStatus::kApproved: return "approved";
    case ReviewStatus::kRejected: return "rejected";
    case ReviewStatus::kConflict: return "conflict";
  }
  return "pending";
}

ReviewStatus ResolveStatus(const std::vector<AnnotationRecord>& decisions) {
  std::size_t accepts = 0, rejects = 0;
  for (const auto& d : decisions) (d.verdict == Verdict::kAccept ? accepts : rejects) += 1;
  if (accepts >= 2 && rejects < 2) return ReviewStatus::kApproved;
  if (rejects >= 2 && accepts < 2) return ReviewStatus::kRejected;
  if (accepts > 0 && rejects > 0) return ReviewStatus::kConflict;
  return ReviewStatus::kPending;
}

std::string ReviewItemId(const std::string& rel_a, const std::string& rel_b) {
  const bool ordered = rel_a < rel_b;
  return "rp-" + Sha256Hex((ordered ? rel_a : rel_b) + "\t" + (ordered ? rel_b : rel_a))
                     .substr(0, 16);
}

namespace {

Json ConceptPairToJson(const ConceptPair& p) {
  return Json{{"subject", p.subject}, {"object", p.object}, {"popularity", p.popularity}};
}

ConceptPair ConceptPairFromJson(const Json& j) {
  return ConceptPair{j.at("subject").get<std::string>(), j.at("object").get<std::string>(),
                     j.value("popularity", 0.0)};
}

Json RecordToJson(const AnnotationRecord& r) {
  Json j{{"annotator", r.annotator}, {"verdict", VerdictName(r.verdict)}, {"timestamp", r.timestamp}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::vector<ConceptPair> Evidence(const KnowledgeBase* kb, const std::string& id, bool& missing) {
  const Relation* r = kb == nullptr ? nullptr : kb->FindRelation(id);
  if (r == nullptr) {
    missing = true;
    return {};
  }
  const std::size_t n = std::min(kEvidenceSize, r->pairs.size());
  return {r->pairs.begin(), r->pairs.begin() + static_cast<std::ptrdiff_t>(n)};
}

PairStatus ToPairStatus(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::kApproved: return PairStatus::kApproved;
    case ReviewStatus::kRejected: return PairStatus::kRejected;
    default: return PairStatus::kPending;
  }
}

}  // namespace

Json ReviewItemToJson(const ReviewItem& item) {
  Json a = Json::array(), b = Json::array(), decisions = Json::array(), history = Json::array();
  for (const auto& p : item.sample_pairs_a) a.push_back(ConceptPairToJson(p));
  for (const auto& p : item.sample_pairs_b) b.push_back(ConceptPairToJson(p));
  for (const auto& d : item.decisions) decisions.push_back(RecordToJson(d));
  for (const auto& d : item.history) history.push_back(RecordToJson(d));
  return Json{{"id", item.id},
              {"pair", PairToJson(item.pair)},
              {"sample_pairs_a", a},
              {"sample_pairs_b", b},
              {"decisions", decisions},
              {"history", history},
              {"status", ReviewStatusName(item.status)},
              {"evidence_missing", item.evidence_missing}};
}

double FleissKappa(const std::vector<std::vector<Verdict>>& ratings) {
  if (ratings.empty()) throw Error(ErrorCode::kInvalidArgument, "fleiss kappa: no items");
  const std::size_t m = ratings.front().size();
  if (m < 2) throw Error(ErrorCode::kInvalidArgument, "fleiss kappa: need >= 2 ratings per item");
  double accept_total = 0, agreement_sum = 0;
  for (const auto& item : ratings) {
    if (item.size() != m) {
      throw Error(ErrorCode::kInvalidArgument,
                  "fleiss kappa: unequal rating counts (" + std::to_string(item.size()) + " vs " +
                      std::to_string(m) + ")");
    }
    const double accepts = static_cast<double>(
        std::count(item.begin(), item.end(), Verdict::kAccept));
    const double rejects = static_cast<double>(m) - accepts;
    accept_total += accepts;
    agreement_sum += (accepts * accepts + rejects * rejects - static_cast<double>(m)) /
                     (static_cast<double>(m) * static_cast<double>(m - 1));
  }
  const double n_items = static_cast<double>(ratings.size());
  const double p_accept = accept_total / (n_items * static_cast<double>(m));
  const double p_reject = 1.0 - p_accept;
  const double p_bar = agreement_sum / n_items;
  const double p_e = p_accept * p_accept + p_reject * p_reject;
  if (p_e == 1.0) {
    if (p_bar == 1.0) return 1.0;
    throw Error(ErrorCode::kInvalidArgument, "fleiss kappa undefined");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

AnnotatorRegistry AnnotatorRegistry::Load(const std::filesystem::path& path) {
  Json j = Json::parse(ReadFile(path), nullptr, /*allow_exceptions=*/false);
  if (j.is_object() && j.contains("annotators")) j = j["annotators"];
  if (!j.is_array()) {
    throw Error(ErrorCode::kDataLoss, path.string() + ": expected a list of annotator ids");
  }
  AnnotatorRegistry r;
  for (const auto& id : j) {
    if (!id.is_string() || id.get<std::string>().empty()) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": annotator ids must be non-empty strings");
    }
    r.ids.insert(id.get<std::string>());
  }
  return r;
}

Json ReviewStatsToJson(const ReviewStats& s) {
  return Json{{"by_status", s.by_status},
              {"total", s.total},
              {"kappa", s.kappa ? Json(*s.kappa) : Json(nullptr)},
              {"kappa_items", s.kappa_items}};
}

std::set<RelationIdPair> CandidatePairs(const std::vector<CandidateSet>& sets) {
  std::set<RelationIdPair> pairs;
  for (const auto& set : sets) {
    for (const auto& c : set.candidates) {
      if (c.id == set.query_relation) continue;
      pairs.insert(set.query_relation < c.id ? RelationIdPair{set.query_relation, c.id}
                                             : RelationIdPair{c.id, set.query_relation});
    }
  }
  return pairs;
}

ReviewStore::ReviewStore(AnnotatorRegistry registry, std::set<RelationIdPair> candidate_pairs,
                         std::optional<std::filesystem::path> log_path, Clock clock)
    : registry_(std::move(registry)),
      candidate_pairs_(std::move(candidate_pairs)),
      log_path_(std::move(log_path)),
      clock_(std::move(clock)),
      snapshot_(std::make_shared<const State>()) {
  if (log_path_ && std::filesystem::exists(*log_path_)) Replay(*log_path_);
}

void ReviewStore::Replay(const std::filesystem::path& path) {
  auto state = std::make_shared<State>();
  for (const Json& event : ReadJsonLines(path)) {
    try {
      Apply(*state, event);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kDataLoss, path.string() + ": bad event: " + e.what());
    }
    next_seq_ = std::max(next_seq_, event.value("seq", std::uint64_t{0}) + 1);
  }
  std::unique_lock lock(snapshot_mu_);
  snapshot_ = std::move(state);
}

ReviewItem& ReviewStore::Apply(State& state, const Json& event) {
  const std::string type = event.at("type").get<std::string>();
  const std::string item_id = event.at("item_id").get<std::string>();
  if (type == "enqueue" || type == "add") {
    if (state.by_id.count(item_id)) {
      throw Error(ErrorCode::kDataLoss, "event log creates item " + item_id + " twice");
    }
    ReviewItem item;
    item.id = item_id;
    item.pair = PairFromJson(event.at("pair"));
    for (const auto& p : event.at("sample_pairs_a")) item.sample_pairs_a.push_back(ConceptPairFromJson(p));
    for (const auto& p : event.at("sample_pairs_b")) item.sample_pairs_b.push_back(ConceptPairFromJson(p));
    item.evidence_missing = event.value("evidence_missing", false);
    state.by_id[item_id] = state.items.size();
    state.items.push_back(std::move(item));
    ReviewItem& created = state.items.back();
    if (type == "add") {
      AnnotationRecord r{event.at("annotator").get<std::string>(), Verdict::kAccept,
                         event.value("timestamp", ""), ""};
      created.decisions.push_back(r);
      created.history.push_back(r);
    }
    created.status = ResolveStatus(created.decisions);
    created.pair.status = ToPairStatus(created.status);
    return created;
  }
  if (type == "decision") {
    auto it = state.by_id.find(item_id);
    if (it == state.by_id.end()) {
      throw Error(ErrorCode::kDataLoss, "decision for unknown item " + item_id);
    }
    ReviewItem& item = state.items[it->second];
    AnnotationRecord r{event.at("annotator").get<std::string>(),
                       ParseVerdict(event.at("verdict").get<std::string>()),
                       event.value("timestamp", ""), event.value("note", "")};
    item.history.push_back(r);
    auto existing = std::find_if(item.decisions.begin(), item.decisions.end(),
                                 [&](const AnnotationRecord& d) { return d.annotator == r.annotator; });
    if (existing != item.decisions.end()) {
      *existing = r;
    } else {
      item.decisions.push_back(r);
    }
    item.status = ResolveStatus(item.decisions);
    item.pair.status = ToPairStatus(item.status);
    return item;
  }
  throw Error(ErrorCode::kDataLoss, "unknown event type '" + type + "'");
}

void ReviewStore::Persist(const Json& event) {
  if (!log_path_) return;
  if (log_path_->has_parent_path()) std::filesystem::create_directories(log_path_->parent_path());
  std::ofstream out(*log_path_, std::ios::app | std::ios::binary);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kUnavailable, "cannot append to " + log_path_->string());
}

std::shared_ptr<const ReviewStore::State> ReviewStore::Snapshot() const {
  std::shared_lock lock(snapshot_mu_);
  return snapshot_;
}

std::vector<ReviewItem> ReviewStore::Enqueue(const std::vector<AnalogousRelationPair>& pending,
                                             const KnowledgeBase* kb) {
  std::lock_guard<std::mutex> writer(writer_mu_);
  auto state = std::make_shared<State>(*Snapshot());
  std::vector<ReviewItem> created;
  for (const auto& raw : pending) {
    AnalogousRelationPair pair = Canonical(raw);
    pair.status = PairStatus::kPending;
    const std::string id = ReviewItemId(pair.rel_a, pair.rel_b);
    if (state->by_id.count(id)) continue;
    bool missing = false;
    Json a = Json::array(), b = Json::array();
    for (const auto& p : Evidence(kb, pair.rel_a, missing)) a.push_back(ConceptPairToJson(p));
    for (const auto& p : Evidence(kb, pair.rel_b, missing)) b.push_back(ConceptPairToJson(p));
    Json event{{"seq", next_seq_},
               {"type", "enqueue"},
               {"timestamp", clock_()},
               {"item_id", id},
               {"pair", PairToJson(pair)},
               {"sample_pairs_a", a},
               {"sample_pairs_b", b},
               {"evidence_missing", missing}};
    Persist(event);
    ++next_seq_;
    created.push_back(Apply(*state, event));
  }
  std::unique_lock lock(snapshot_mu_);
  snapshot_ = std::move(state);
  return created;
}

ReviewItem ReviewStore::SubmitDecision(const std::string& item_id, const std::string& annotator,
                                       Verdict verdict, const std::string& note) {
  std::lock_guard<std::mutex> writer(writer_mu_);
  auto state = std::make_shared<State>(*Snapshot());
  if (!state->by_id.count(item_id)) {
    throw Error(ErrorCode::kNotFound, "unknown review item '" + item_id + "'");
  }
  if (!registry_.Contains(annotator)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown annotator '" + annotator + "'");
  }
  Json event{{"seq", next_seq_},
             {"type", "decision"},
             {"timestamp", clock_()},
             {"item_id", item_id},
             {"annotator", annotator},
             {"verdict", VerdictName(verdict)}};
  if (!note.empty()) event["note"] = note;
  Persist(event);
  ++next_seq_;
  ReviewItem updated = Apply(*state, event);
  std::unique_lock lock(snapshot_mu_);
  snapshot_ = std::move(state);
  return updated;
}

ReviewItem ReviewStore::AddPair(const std::string& rel_a, const std::string& rel_b,
                                const std::string& annotator, const KnowledgeBase* kb) {
  std::lock_guard<std::mutex> writer(writer_mu_);
  if (!registry_.Contains(annotator)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown annotator '" + annotator + "'");
  }
  AnalogousRelationPair pair =
      Canonical(AnalogousRelationPair{rel_a, rel_b, "", Provenance::kHumanAdded, PairStatus::kPending});
  if (!candidate_pairs_.count({pair.rel_a, pair.rel_b})) {
    throw Error(ErrorCode::kInvalidArgument, "('" + pair.rel_a + "', '" + pair.rel_b +
                                                 "') is not a candidate pair");
  }
  auto state = std::make_shared<State>(*Snapshot());
  const std::string id = ReviewItemId(pair.rel_a, pair.rel_b);
  if (auto it = state->by_id.find(id); it != state->by_id.end()) {
    throw Error(ErrorCode::kAlreadyExists,
                "pair already under review as " + id + " (" +
                    std::string(ReviewStatusName(state->items[it->second].status)) + ")");
  }
  bool missing = false;
  Json a = Json::array(), b = Json::array();
  for (const auto& p : Evidence(kb, pair.rel_a, missing)) a.push_back(ConceptPairToJson(p));
  for (const auto& p : Evidence(kb, pair.rel_b, missing)) b.push_back(ConceptPairToJson(p));
  Json event{{"seq", next_seq_},
             {"type", "add"},
             {"timestamp", clock_()},
             {"item_id", id},
             {"annotator", annotator},
             {"pair", PairToJson(pair)},
             {"sample_pairs_a", a},
             {"sample_pairs_b", b},
             {"evidence_missing", missing}};
  Persist(event);
  ++next_seq_;
  ReviewItem created = Apply(*state, event);
  std::unique_lock lock(snapshot_mu_);
  snapshot_ = std::move(state);
  return created;
}

std::optional<ReviewItem> ReviewStore::Item(const std::string& id) const {
  auto state = Snapshot();
  auto it = state->by_id.find(id);
  if (it == state->by_id.end()) return std::nullopt;
  return state->items[it->second];
}

std::vector<ReviewItem> ReviewStore::Items() const { return Snapshot()->items; }

ReviewPage ReviewStore::Pending(const std::string& cursor, std::size_t limit) const {
  auto state = Snapshot();
  std::size_t start = 0;
  if (!cursor.empty()) {
    auto [ptr, ec] = std::from_chars(cursor.data(), cursor.data() + cursor.size(), start);
    if (ec != std::errc() || ptr != cursor.data() + cursor.size() || start > state->items.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad cursor '" + cursor + "'");
    }
  }
  if (limit == 0) limit = 20;
  ReviewPage page;
  std::size_t i = start;
  for (; i < state->items.size() && page.items.size() < limit; ++i) {
    const auto& item = state->items[i];
    if (item.status == ReviewStatus::kPending || item.status == ReviewStatus::kConflict) {
      page.items.push_back(item);
    }
  }
  for (std::size_t j = i; j < state->items.size(); ++j) {
    const auto s = state->items[j].status;
    if (s == ReviewStatus::kPending || s == ReviewStatus::kConflict) {
      page.next_cursor = std::to_string(i);
      break;
    }
  }
  return page;
}

ReviewStats ReviewStore::Stats() const {
  auto state = Snapshot();
  ReviewStats stats;
  for (auto s : {ReviewStatus::kPending, ReviewStatus::kApproved, ReviewStatus::kRejected,
                 ReviewStatus::kConflict}) {
    stats.by_status[std::string(ReviewStatusName(s))] = 0;
  }
  std::vector<std::vector<Verdict>> ratings;
  for (const auto& item : state->items) {
    ++stats.by_status[std::string(ReviewStatusName(item.status))];
    ++stats.total;
    if (item.decisions.size() >= 2) {
      ratings.push_back({item.decisions[0].verdict, item.decisions[1].verdict});
    }
  }
  if (!ratings.empty()) {
    stats.kappa = FleissKappa(ratings);
    stats.kappa_items = ratings.size();
  }
  return stats;
}

std::vector<AnalogousRelationPair> ReviewStore::ExportApproved() const {
  auto state = Snapshot();
  std::vector<AnalogousRelationPair> out;
  for (const auto& item : state->items) {
    if (item.status == ReviewStatus::kApproved) out.push_back(item.pair);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.rel_a, x.rel_b) < std::tie(y.rel_a, y.rel_b);
  });
  return out;
}

}  // namespace analogy
