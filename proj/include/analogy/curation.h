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

#ifndef ANALOGY_CURATION_H_
#define ANALOGY_CURATION_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "analogy/analogy_kb.h"
#include "analogy/llm_filter.h"
#include "analogy/util.h"

namespace analogy {

enum class Verdict { kAccept, kReject };
enum class ReviewStatus { kPending, kApproved, kRejected, kConflict };

std::string_view VerdictName(Verdict v);
Verdict ParseVerdict(std::string_view name);
std::string_view ReviewStatusName(ReviewStatus s);

struct AnnotationRecord {
  std::string annotator;
  Verdict verdict = Verdict::kAccept;
  std::string timestamp;
  std::string note;

  bool operator==(const AnnotationRecord&) const = default;
};

inline constexpr std::size_t kEvidenceSize = 5;

struct ReviewItem {
  std::string id;
  AnalogousRelationPair pair;
  std::vector<ConceptPair> sample_pairs_a;
  std::vector<ConceptPair> sample_pairs_b;
  // Current verdict per annotator, in order of each annotator's first
  // decision. `history` keeps every submission.
  std::vector<AnnotationRecord> decisions;
  std::vector<AnnotationRecord> history;
  ReviewStatus status = ReviewStatus::kPending;
  bool evidence_missing = false;
};

// approved: >= 2 accepts and < 2 rejects; rejected: the reverse; conflict:
// both verdicts present otherwise; else pending.
ReviewStatus ResolveStatus(const std::vector<AnnotationRecord>& decisions);

// Stable id derived from the canonical relation pair.
std::string ReviewItemId(const std::string& rel_a, const std::string& rel_b);

Json ReviewItemToJson(const ReviewItem& item);

// Fleiss' kappa for two categories. Each inner vector holds one item's
// verdicts; all must have the same length m >= 2. When every rating falls
// in one category the statistic is 0/0; that case returns 1.0.
double FleissKappa(const std::vector<std::vector<Verdict>>& ratings);

struct AnnotatorRegistry {
  std::set<std::string> ids;

  // Either a JSON array of ids or {"annotators": [...]}.
  static AnnotatorRegistry Load(const std::filesystem::path& path);
  bool Contains(const std::string& id) const { return ids.count(id) > 0; }
};

struct ReviewStats {
  std::map<std::string, std::uint64_t> by_status;
  std::uint64_t total = 0;
  std::optional<double> kappa;
  std::uint64_t kappa_items = 0;
};

Json ReviewStatsToJson(const ReviewStats& stats);

struct ReviewPage {
  std::vector<ReviewItem> items;
  std::optional<std::string> next_cursor;
};

// Event-sourced review queue. Every mutation is appended to the decision log
// (JSONL) before it becomes visible; replaying the log rebuilds the same
// items and statuses. Mutations are serialised; readers work on immutable
// snapshots.
class ReviewStore {
 public:
  using Clock = std::function<std::string()>;

  ReviewStore(AnnotatorRegistry registry, std::set<RelationIdPair> candidate_pairs,
              std::optional<std::filesystem::path> log_path = std::nullopt,
              Clock clock = UtcTimestamp);

  // Creates one item per pair not already in the store. Evidence is the top
  // kEvidenceSize pairs of each relation; a relation missing from `kb`
  // yields empty evidence and sets evidence_missing. Returns the new items.
  std::vector<ReviewItem> Enqueue(const std::vector<AnalogousRelationPair>& pending,
                                  const KnowledgeBase* kb);

  // kNotFound for an unknown item, kInvalidArgument for an unregistered
  // annotator.
  ReviewItem SubmitDecision(const std::string& item_id, const std::string& annotator,
                            Verdict verdict, const std::string& note = {});

  // Human-added pair. kInvalidArgument unless the two relations appear in
  // each other's candidate sets (either direction); kAlreadyExists when the
  // pair is already in the store in any status.
  ReviewItem AddPair(const std::string& rel_a, const std::string& rel_b,
                     const std::string& annotator, const KnowledgeBase* kb);

  std::optional<ReviewItem> Item(const std::string& id) const;
  std::vector<ReviewItem> Items() const;  // enqueue order
  // Items still needing a decision (pending or conflict), paged by an opaque
  // cursor.
  ReviewPage Pending(const std::string& cursor, std::size_t limit) const;
  ReviewStats Stats() const;
  std::vector<AnalogousRelationPair> ExportApproved() const;

  const AnnotatorRegistry& registry() const { return registry_; }
  const std::set<RelationIdPair>& candidate_pairs() const { return candidate_pairs_; }

 private:
  struct State {
    std::vector<ReviewItem> items;
    std::map<std::string, std::size_t> by_id;
  };

  void Replay(const std::filesystem::path& path);
  // Applies one event to `state`; used by both live mutations and replay.
  ReviewItem& Apply(State& state, const Json& event);
  void Persist(const Json& event);
  std::shared_ptr<const State> Snapshot() const;

  AnnotatorRegistry registry_;
  std::set<RelationIdPair> candidate_pairs_;
  std::optional<std::filesystem::path> log_path_;
  Clock clock_;
  std::uint64_t next_seq_ = 1;

  std::mutex writer_mu_;
  mutable std::shared_mutex snapshot_mu_;
  std::shared_ptr<const State> snapshot_;
};

// All unordered relation pairs that co-occur in some candidate set.
std::set<RelationIdPair> CandidatePairs(const std::vector<CandidateSet>& sets);

}  // namespace analogy

#endif  // ANALOGY_CURATION_H_
