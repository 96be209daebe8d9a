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

#include "analogy/curation_server.h"

#include <httplib.h>

#include <charconv>

#include "analogy/error.h"
#include "analogy/kg_ingest.h"

namespace analogy {

namespace {

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kAlreadyExists: return 409;
    case ErrorCode::kFailedPrecondition: return 409;
    case ErrorCode::kUnavailable: return 503;
    case ErrorCode::kDataLoss:
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

void Reply(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, ErrorCode code, const std::string& message) {
  Reply(res, Json{{"code", ErrorCodeName(code)}, {"message", message}}, HttpStatus(code));
}

std::size_t QueryCount(const httplib::Request& req, const char* name, std::size_t fallback,
                       std::size_t max) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad '") + name + "' parameter: " + v);
  }
  return std::min(out, max);
}

Json ParseBody(const httplib::Request& req) {
  Json body = Json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return body;
}

std::string RequiredString(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

struct CurationServer::Impl {
  ReviewStore& store;
  const KnowledgeBase* kb;
  httplib::Server server;

  Impl(ReviewStore& s, const KnowledgeBase* k) : store(s), kb(k) {}

  std::string LabelOf(const std::string& id) const {
    const Relation* r = kb == nullptr ? nullptr : kb->FindRelation(id);
    return r == nullptr ? id : r->label;
  }

  // Wraps a handler so library errors become {code, message} responses.
  template <typename Fn>
  httplib::Server::Handler Guard(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        ReplyError(res, e.code(), e.what());
      } catch (const std::exception& e) {
        ReplyError(res, ErrorCode::kInternal, e.what());
      }
    };
  }

  void Routes() {
    server.Get("/api/review/pending", Guard([this](const auto& req, auto& res) {
      const std::string cursor = req.has_param("cursor") ? req.get_param_value("cursor") : "";
      const ReviewPage page = store.Pending(cursor, QueryCount(req, "limit", 20, 100));
      Json items = Json::array();
      for (const auto& item : page.items) items.push_back(ReviewItemToJson(item));
      Reply(res, Json{{"items", items},
                      {"next_cursor", page.next_cursor ? Json(*page.next_cursor) : Json(nullptr)}});
    }));

    server.Get(R"(/api/review/items/([^/]+))", Guard([this](const auto& req, auto& res) {
      const std::string id = req.matches[1];
      auto item = store.Item(id);
      if (!item) throw Error(ErrorCode::kNotFound, "unknown review item '" + id + "'");
      Reply(res, ReviewItemToJson(*item));
    }));

    server.Post(R"(/api/review/items/([^/]+)/decision)", Guard([this](const auto& req, auto& res) {
      const Json body = ParseBody(req);
      const std::string note = body.contains("note") && body["note"].is_string()
                                   ? body["note"].template get<std::string>()
                                   : std::string();
      const ReviewItem item =
          store.SubmitDecision(req.matches[1], RequiredString(body, "annotator"),
                               ParseVerdict(RequiredString(body, "verdict")), note);
      Reply(res, ReviewItemToJson(item));
    }));

    server.Post("/api/review/add", Guard([this](const auto& req, auto& res) {
      const Json body = ParseBody(req);
      const ReviewItem item = store.AddPair(RequiredString(body, "rel_a"),
                                            RequiredString(body, "rel_b"),
                                            RequiredString(body, "annotator"), kb);
      Reply(res, ReviewItemToJson(item), 201);
    }));

    server.Get("/api/review/stats", Guard([this](const auto&, auto& res) {
      Reply(res, ReviewStatsToJson(store.Stats()));
    }));

    server.Get("/api/review/annotators", Guard([this](const auto&, auto& res) {
      Reply(res, Json{{"annotators", store.registry().ids}});
    }));

    server.Get("/api/review/candidates", Guard([this](const auto& req, auto& res) {
      const std::string q = req.has_param("q") ? FoldCase(req.get_param_value("q")) : "";
      std::set<std::string> reviewed;
      for (const auto& item : store.Items()) reviewed.insert(item.id);
      Json out = Json::array();
      for (const auto& [a, b] : store.candidate_pairs()) {
        const std::string la = LabelOf(a), lb = LabelOf(b);
        if (!q.empty() && FoldCase(la).find(q) == std::string::npos &&
            FoldCase(lb).find(q) == std::string::npos) {
          continue;
        }
        out.push_back({{"rel_a", a},
                       {"rel_b", b},
                       {"label_a", la},
                       {"label_b", lb},
                       {"under_review", reviewed.count(ReviewItemId(a, b)) > 0}});
      }
      Reply(res, Json{{"candidates", out}});
    }));

    server.Get("/api/kb/relations", Guard([this](const auto&, auto& res) {
      Json out = Json::array();
      if (kb != nullptr) {
        for (const auto& r : kb->relations()) {
          out.push_back({{"id", r.id},
                         {"label", r.label},
                         {"source", SourceName(r.source)},
                         {"pair_count", r.pairs.size()}});
        }
      }
      Reply(res, Json{{"relations", out}});
    }));

    server.Get(R"(/api/kb/relations/([^/]+)/pairs)", Guard([this](const auto& req, auto& res) {
      if (kb == nullptr) throw Error(ErrorCode::kNotFound, "no KB loaded");
      const Relation& r = kb->GetRelation(std::string(req.matches[1]));
      const std::size_t offset = QueryCount(req, "offset", 0, r.pairs.size());
      const std::size_t limit = QueryCount(req, "limit", 50, 1000);
      Json pairs = Json::array();
      for (std::size_t i = offset; i < std::min(r.pairs.size(), offset + limit); ++i) {
        pairs.push_back({{"subject", r.pairs[i].subject},
                         {"object", r.pairs[i].object},
                         {"popularity", r.pairs[i].popularity}});
      }
      Reply(res, Json{{"relation", r.id}, {"total", r.pairs.size()}, {"offset", offset}, {"pairs", pairs}});
    }));
  }
};

CurationServer::CurationServer(ReviewStore& store, const KnowledgeBase* kb,
                               std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(store, kb)) {
  impl_->Routes();
  if (static_dir) {
    if (!impl_->server.set_mount_point("/", static_dir->string())) {
      throw Error(ErrorCode::kNotFound, "static asset directory " + static_dir->string() +
                                           " does not exist");
    }
  }
}

CurationServer::~CurationServer() { Stop(); }

bool CurationServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int CurationServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool CurationServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void CurationServer::Stop() {
  if (impl_) impl_->server.stop();
}

void CurationServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace analogy
