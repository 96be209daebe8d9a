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

#include "analogy/embedding.h"

#include <future>
#include <set>

#include "analogy/kg_ingest.h"
#include "analogy/util.h"

namespace analogy {

namespace {

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

HashedNgramEmbedder::HashedNgramEmbedder(int dim) : dim_(dim) {
  if (dim <= 0) throw Error(ErrorCode::kInvalidArgument, "embedder dim must be positive");
}

std::string HashedNgramEmbedder::id() const {
  return "hashed-ngram-v1/" + std::to_string(dim_);
}

EmbeddingVector HashedNgramEmbedder::EmbedOne(std::string_view text) const {
  EmbeddingVector v = EmbeddingVector::Zero(dim_);
  auto add = [&](std::string_view feature) {
    const std::uint64_t h = Fnv1a(feature);
    v(static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_))) +=
        (h >> 63) != 0 ? -1.0 : 1.0;
  };
  const std::string folded = FoldCase(text);
  const std::string padded = " " + folded + " ";
  for (std::size_t n = 3; n <= 5; ++n) {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) add(padded.substr(i, n));
  }
  std::size_t start = 0;
  while (start < folded.size()) {
    std::size_t end = folded.find(' ', start);
    if (end == std::string::npos) end = folded.size();
    if (end > start) add("w:" + folded.substr(start, end - start));
    start = end + 1;
  }
  const double norm = v.norm();
  if (norm == 0.0) {
    v(static_cast<Eigen::Index>(Fnv1a(folded) % static_cast<std::uint64_t>(dim_))) = 1.0;
    return v;
  }
  return v / norm;
}

std::vector<EmbeddingVector> HashedNgramEmbedder::Embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(EmbedOne(t));
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path EmbeddingCache::PathFor(const std::string& provider_id,
                                              const std::string& text) const {
  const std::string key = Sha256Hex(provider_id + "\n" + text);
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<EmbeddingVector> EmbeddingCache::Get(const std::string& provider_id,
                                                   const std::string& text) const {
  const auto path = PathFor(provider_id, text);
  if (!std::filesystem::exists(path)) return std::nullopt;
  Json j = Json::parse(ReadFile(path), nullptr, /*allow_exceptions=*/false);
  if (!j.is_object() || j.value("provider", "") != provider_id || j.value("text", "") != text ||
      !j.contains("values") || !j["values"].is_array()) {
    return std::nullopt;
  }
  const auto values = j["values"].get<std::vector<double>>();
  return Eigen::Map<const EmbeddingVector>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

void EmbeddingCache::Put(const std::string& provider_id, const std::string& text,
                         const EmbeddingVector& vector) const {
  Json j{{"provider", provider_id},
         {"text", text},
         {"values", std::vector<double>(vector.data(), vector.data() + vector.size())}};
  WriteFile(PathFor(provider_id, text), j.dump());
}

std::map<std::string, EmbeddingVector> EmbedTexts(std::span<const std::string> texts,
                                                  EmbeddingProvider& provider,
                                                  const EmbeddingCache* cache,
                                                  const EmbedOptions& options) {
  std::map<std::string, EmbeddingVector> out;
  std::vector<std::string> misses;
  std::set<std::string> seen;
  const std::string provider_id = provider.id();
  for (const auto& t : texts) {
    if (!seen.insert(t).second) continue;
    if (cache != nullptr) {
      if (auto v = cache->Get(provider_id, t)) {
        out.emplace(t, std::move(*v));
        continue;
      }
    }
    misses.push_back(t);
  }

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  std::vector<std::span<const std::string>> batches;
  for (std::size_t i = 0; i < misses.size(); i += batch) {
    batches.emplace_back(misses.data() + i, std::min(batch, misses.size() - i));
  }

  auto run = [&](std::span<const std::string> texts_in_batch) {
    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, options.max_attempts); ++attempt) {
      try {
        auto vectors = provider.Embed(texts_in_batch);
        if (vectors.size() != texts_in_batch.size()) {
          last_error = "provider returned " + std::to_string(vectors.size()) + " vectors for " +
                       std::to_string(texts_in_batch.size()) + " texts";
          continue;
        }
        return vectors;
      } catch (const std::exception& e) {
        last_error = e.what();
      }
    }
    std::string msg = "embedding failed after retries (" + last_error + ") for:";
    for (const auto& t : texts_in_batch) msg += " '" + t + "'";
    throw Error(ErrorCode::kUnavailable, msg);
  };

  const std::size_t in_flight = std::max<std::size_t>(1, options.max_in_flight);
  for (std::size_t wave = 0; wave < batches.size(); wave += in_flight) {
    std::vector<std::future<std::vector<EmbeddingVector>>> futures;
    const std::size_t end = std::min(batches.size(), wave + in_flight);
    for (std::size_t b = wave; b < end; ++b) {
      futures.push_back(std::async(std::launch::async, run, batches[b]));
    }
    for (std::size_t b = wave; b < end; ++b) {
      auto vectors = futures[b - wave].get();
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        const std::string& text = batches[b][i];
        if (cache != nullptr) cache->Put(provider_id, text, vectors[i]);
        out.emplace(text, std::move(vectors[i]));
      }
    }
  }
  return out;
}

}  // namespace analogy
