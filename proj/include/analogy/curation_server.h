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

#ifndef ANALOGY_CURATION_SERVER_H_
#define ANALOGY_CURATION_SERVER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "analogy/analogy_kb.h"
#include "analogy/curation.h"

namespace analogy {

// HTTP/JSON front of a ReviewStore:
//   GET  /api/review/pending?cursor=&limit=
//   GET  /api/review/items/{id}
//   POST /api/review/items/{id}/decision   {annotator, verdict, note?}
//   POST /api/review/add                    {rel_a, rel_b, annotator}
//   GET  /api/review/stats
//   GET  /api/review/annotators
//   GET  /api/review/candidates?q=
//   GET  /api/kb/relations
//   GET  /api/kb/relations/{id}/pairs?offset=&limit=
// Errors are {"code", "message"} with a matching HTTP status. Static files
// (the review UI build) are served from `static_dir` when given.
class CurationServer {
 public:
  CurationServer(ReviewStore& store, const KnowledgeBase* kb,
                 std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~CurationServer();

  CurationServer(const CurationServer&) = delete;
  CurationServer& operator=(const CurationServer&) = delete;

  // Blocks until Stop().
  bool Listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; pair with ListenAfterBind().
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace analogy

#endif  // ANALOGY_CURATION_SERVER_H_
