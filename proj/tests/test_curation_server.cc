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

#include <thread>

#include "analogy/curation_server.h"
#include "analogy/error.h"
#include "doctest.h"
#include "test_support.h"
// After Eigen: <resolv.h> defines _res.
#include <httplib.h>

using namespace analogy;

namespace {

class Running {
 public:
  Running(ReviewStore& store, const KnowledgeBase* kb) : server_(store, kb) {
    port_ = server_.BindToAnyPort("127.0.0.1");
    thread_ = std::thread([this] { server_.ListenAfterBind(); });
    server_.WaitUntilReady();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  ~Running() {
    server_.Stop();
    thread_.join();
  }

  httplib::Client& client() { return *client_; }
  int port() const { return port_; }

  Json Get(const std::string& path, int expected = 200) {
    auto res = client_->Get(path);
    REQUIRE(res);
    CHECK(res->status == expected);
    return Json::parse(res->body);
  }
  Json Post(const std::string& path, const Json& body, int expected) {
    auto res = client_->Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expected);
    return Json::parse(res->body);
  }

 private:
  CurationServer server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

KnowledgeBase SmallKb() {
  std::vector<RawTriple> triples;
  for (int i = 0; i < 60; ++i) {
    triples.push_back({"s" + std::to_string(100 + i), "author", "o", 100.0 - i, Source::kWikidata});
  }
  triples.push_back({"x", "composer", "y", 1.0, Source::kWikidata});
  triples.push_back({"u", "lyrics by", "v", 1.0, Source::kWikidata});
  return KnowledgeBase::Build(triples, {});
}

}  // namespace

TEST_CASE("review API round trip") {
  testing::TempDir dir;
  const KnowledgeBase kb = SmallKb();
  const auto author = RelationId(Source::kWikidata, "author");
  const auto composer = RelationId(Source::kWikidata, "composer");
  const auto lyrics = RelationId(Source::kWikidata, "lyrics by");
  ReviewStore store(AnnotatorRegistry{{"alice", "bob"}}, {{author, composer}, {author, lyrics}},
                    dir / "log.jsonl");
  store.Enqueue({{author, composer, "creator", Provenance::kAuto, PairStatus::kPending}}, &kb);
  Running server(store, &kb);

  auto pending = server.Get("/api/review/pending?limit=10");
  REQUIRE(pending["items"].size() == 1);
  CHECK(pending["next_cursor"].is_null());
  const std::string id = pending["items"][0]["id"];
  CHECK(pending["items"][0]["pair"]["meta_relation"] == "creator");
  CHECK(pending["items"][0]["sample_pairs_a"].size() == kEvidenceSize);

  CHECK(server.Get("/api/review/items/" + id)["status"] == "pending");
  CHECK(server.Get("/api/review/items/rp-missing", 404)["code"] == "not_found");

  auto item = server.Post("/api/review/items/" + id + "/decision",
                          {{"annotator", "alice"}, {"verdict", "accept"}, {"note", "ok"}}, 200);
  CHECK(item["status"] == "pending");
  item = server.Post("/api/review/items/" + id + "/decision", {{"annotator", "bob"}, {"verdict", "accept"}}, 200);
  CHECK(item["status"] == "approved");
  CHECK(server.Get("/api/review/pending")["items"].empty());

  server.Post("/api/review/items/" + id + "/decision", {{"annotator", "mallory"}, {"verdict", "accept"}}, 400);
  server.Post("/api/review/items/" + id + "/decision", {{"annotator", "bob"}, {"verdict", "maybe"}}, 400);
  server.Post("/api/review/items/rp-missing/decision", {{"annotator", "bob"}, {"verdict", "accept"}}, 404);
  auto bad = server.client().Post("/api/review/items/" + id + "/decision", "not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  const auto added = server.Post("/api/review/add", {{"rel_a", lyrics}, {"rel_b", author}, {"annotator", "alice"}}, 201);
  CHECK(added["pair"]["provenance"] == "human_added");
  server.Post("/api/review/add", {{"rel_a", lyrics}, {"rel_b", author}, {"annotator", "bob"}}, 409);
  server.Post("/api/review/add", {{"rel_a", lyrics}, {"rel_b", composer}, {"annotator", "bob"}}, 400);
  server.Post("/api/review/add", {{"rel_a", lyrics}}, 400);

  const auto stats = server.Get("/api/review/stats");
  CHECK(stats["total"] == 2);
  CHECK(stats["by_status"]["approved"] == 1);
  CHECK(stats["kappa_items"] == 1);

  CHECK(server.Get("/api/review/annotators")["annotators"] == Json{"alice", "bob"});

  const auto candidates = server.Get("/api/review/candidates?q=LYRICS")["candidates"];
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0]["label_b"] == "lyrics by");
  CHECK(candidates[0]["under_review"] == true);

  const auto relations = server.Get("/api/kb/relations")["relations"];
  CHECK(relations.size() == 3);
  const auto page = server.Get("/api/kb/relations/" + author + "/pairs?offset=50&limit=20");
  CHECK(page["total"] == 60);
  CHECK(page["pairs"].size() == 10);
  CHECK(page["pairs"][0]["subject"] == "s150");
  server.Get("/api/kb/relations/wikidata:nothing/pairs", 404);
  server.Get("/api/kb/relations/" + author + "/pairs?limit=abc", 400);

  // Every accepted mutation is in the log, so a new store sees the same state.
  ReviewStore reopened(AnnotatorRegistry{{"alice", "bob"}}, {}, dir / "log.jsonl");
  CHECK(reopened.Stats().by_status == store.Stats().by_status);
}

TEST_CASE("concurrent decisions are all recorded") {
  testing::TempDir dir;
  std::set<std::string> annotators;
  for (int i = 0; i < 8; ++i) annotators.insert("a" + std::to_string(i));
  ReviewStore store(AnnotatorRegistry{annotators}, {}, dir / "log.jsonl");
  std::vector<AnalogousRelationPair> pending;
  for (int i = 0; i < 10; ++i) {
    pending.push_back({"k:x", "k:y" + std::to_string(i), "m", Provenance::kAuto, PairStatus::kPending});
  }
  const auto items = store.Enqueue(pending, nullptr);
  Running server(store, nullptr);
  std::vector<std::thread> workers;
  for (const auto& who : annotators) {
    workers.emplace_back([port = server.port(), &items, who] {
      httplib::Client client("127.0.0.1", port);
      for (const auto& item : items) {
        client.Post("/api/review/items/" + item.id + "/decision",
                             Json{{"annotator", who}, {"verdict", "accept"}}.dump(), "application/json");
      }
    });
  }
  for (auto& w : workers) w.join();
  ReviewStore reopened(AnnotatorRegistry{annotators}, {}, dir / "log.jsonl");
  for (const auto& item : reopened.Items()) {
    CHECK(item.decisions.size() == annotators.size());
    CHECK(item.status == ReviewStatus::kApproved);
  }
  CHECK(ReadJsonLines(dir / "log.jsonl").size() == items.size() * (1 + annotators.size()));
}
