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

#ifndef ANALOGY_EMBEDDING_H_
#define ANALOGY_EMBEDDING_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "analogy/error.h"

namespace analogy {

template <typename Scalar>
using Embedding = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using EmbeddingVector = Embedding<double>;

// dot(u, v) / (|u| |v|), clamped to [-1, 1]. Throws kInvalidArgument on a
// dimension mismatch, a non-finite entry or an all-zero vector.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar Cosine(const Eigen::MatrixBase<DerivedU>& u,
                                 const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cosine: dimension mismatch " + std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()));
  }
  if (!u.allFinite() || !v.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "cosine: non-finite entry");
  }
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) {
    throw Error(ErrorCode::kInvalidArgument, "cosine: zero vector, similarity undefined");
  }
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

struct ScoredId {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

// Descending score, then ascending id.
inline bool RanksBefore(const ScoredId& x, const ScoredId& y) {
  if (x.score != y.score) return x.score > y.score;
  return x.id < y.id;
}

// Exact cosine search over a fixed set of labelled vectors. Rows are stored
// unnormalised next to their norms so every score is the same
// dot / (|q| |row|) expression as Cosine().
template <typename Scalar>
class EmbeddingIndex {
 public:
  using Vector = Embedding<Scalar>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  EmbeddingIndex() = default;

  EmbeddingIndex(std::vector<std::string> ids, const std::vector<Vector>& vectors)
      : ids_(std::move(ids)) {
    if (ids_.size() != vectors.size()) {
      throw Error(ErrorCode::kInvalidArgument, "index: ids and vectors differ in length");
    }
    const Eigen::Index dim = vectors.empty() ? 0 : vectors.front().size();
    rows_.resize(static_cast<Eigen::Index>(vectors.size()), dim);
    norms_.resize(static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const auto& v = vectors[i];
      if (v.size() != dim) {
        throw Error(ErrorCode::kInvalidArgument,
                    "index: '" + ids_[i] + "' has dim " + std::to_string(v.size()) +
                        ", expected " + std::to_string(dim));
      }
      if (!v.allFinite() || v.norm() == Scalar(0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "index: '" + ids_[i] + "' is zero or non-finite");
      }
      rows_.row(static_cast<Eigen::Index>(i)) = v.transpose();
      norms_(static_cast<Eigen::Index>(i)) = v.norm();
      position_[ids_[i]] = i;
    }
    if (position_.size() != ids_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "index: duplicate ids");
    }
  }

  std::size_t size() const { return ids_.size(); }
  Eigen::Index dim() const { return rows_.cols(); }
  const std::vector<std::string>& ids() const { return ids_; }

  std::optional<Vector> Find(std::string_view id) const {
    auto it = position_.find(std::string(id));
    if (it == position_.end()) return std::nullopt;
    return Vector(rows_.row(static_cast<Eigen::Index>(it->second)).transpose());
  }

  // Exact top-k by cosine; `exclude` (if any) never appears. Returns fewer
  // than k when the index is small.
  std::vector<ScoredId> TopK(const Vector& query, std::size_t k,
                             std::string_view exclude = {}) const {
    if (query.size() != dim() && size() > 0) {
      throw Error(ErrorCode::kInvalidArgument, "index: query dimension mismatch");
    }
    if (!query.allFinite() || query.norm() == Scalar(0)) {
      throw Error(ErrorCode::kInvalidArgument, "index: zero or non-finite query");
    }
    const Scalar qn = query.norm();
    std::vector<ScoredId> scored;
    scored.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      if (!exclude.empty() && ids_[i] == exclude) continue;
      const auto r = static_cast<Eigen::Index>(i);
      Scalar c = rows_.row(r).dot(query.transpose()) / (qn * norms_(r));
      c = std::clamp(c, Scalar(-1), Scalar(1));
      scored.push_back({ids_[i], static_cast<double>(c)});
    }
    const std::size_t keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                      scored.end(), RanksBefore);
    scored.resize(keep);
    return scored;
  }

  // Neighbours of an indexed id, itself excluded.
  std::vector<ScoredId> TopKFor(std::string_view id, std::size_t k) const {
    auto v = Find(id);
    if (!v) throw Error(ErrorCode::kNotFound, "index: unknown id '" + std::string(id) + "'");
    return TopK(*v, k, id);
  }

 private:
  std::vector<std::string> ids_;
  Matrix rows_;
  Vector norms_;
  std::map<std::string, std::size_t, std::less<>> position_;
};

// Something that turns texts into vectors: a remote service or the local
// hashed n-gram fallback.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Stable identity used in cache keys, e.g. "hashed-ngram-v1/256".
  virtual std::string id() const = 0;
  virtual std::vector<EmbeddingVector> Embed(std::span<const std::string> texts) = 0;
};

// Deterministic offline embedder: character 3..5-grams of " text " plus
// whole-word features, hashed (FNV-1a) into `dim` signed buckets and
// L2-normalised.
class HashedNgramEmbedder : public EmbeddingProvider {
 public:
  explicit HashedNgramEmbedder(int dim = 256);
  std::string id() const override;
  std::vector<EmbeddingVector> Embed(std::span<const std::string> texts) override;
  EmbeddingVector EmbedOne(std::string_view text) const;

 private:
  int dim_;
};

// Content-addressed on-disk cache: one JSON file per (provider id, text),
// named by sha256(provider id + '\n' + text).
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path dir);

  std::optional<EmbeddingVector> Get(const std::string& provider_id,
                                     const std::string& text) const;
  void Put(const std::string& provider_id, const std::string& text,
           const EmbeddingVector& vector) const;

  std::filesystem::path PathFor(const std::string& provider_id,
                                const std::string& text) const;

 private:
  std::filesystem::path dir_;
};

struct EmbedOptions {
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  int max_attempts = 3;
};

// One vector per unique text. Cache hits skip the provider; misses are sent
// in batches (at most max_in_flight concurrently), retried, then cached.
// A batch that still fails throws kUnavailable naming its texts.
std::map<std::string, EmbeddingVector> EmbedTexts(std::span<const std::string> texts,
                                                  EmbeddingProvider& provider,
                                                  const EmbeddingCache* cache,
                                                  const EmbedOptions& options = {});

}  // namespace analogy

#endif  // ANALOGY_EMBEDDING_H_
