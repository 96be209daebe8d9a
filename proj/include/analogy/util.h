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

#ifndef ANALOGY_UTIL_H_
#define ANALOGY_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace analogy {

using Json = nlohmann::json;

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

// Reads a whole file. Files ending in ".gz" or starting with the gzip magic
// bytes are inflated transparently.
std::string ReadFile(const std::filesystem::path& path);

// Writes atomically (temp file + rename).
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Splits on '\n', dropping a trailing '\r' from each line. A final empty line
// after the last newline is not reported.
std::vector<std::string_view> SplitLines(std::string_view text);

std::vector<std::string_view> SplitTabs(std::string_view line);

std::string_view Trim(std::string_view s);

// Reads one JSON value per non-blank line. Throws kDataLoss naming the file
// and line on malformed input.
std::vector<Json> ReadJsonLines(const std::filesystem::path& path);
std::string ToJsonLines(std::span<const Json> rows);

// UTC time formatted as 2026-01-31T12:00:00Z. Honours SOURCE_DATE_EPOCH.
std::string UtcTimestamp();

// Portable seeded generator. std::mt19937_64 output is fully specified, but
// the standard distributions are not, so bounded draws and shuffles are done
// here to keep datasets byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next();
  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t Uniform(std::uint64_t bound);
  double UniformReal();

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[Uniform(i)]);
    }
  }

  // Independent stream for item `index`; lets generators run items in any
  // order (or in parallel) and still agree.
  static Rng ForItem(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t state_;
};

}  // namespace analogy

#endif  // ANALOGY_UTIL_H_
