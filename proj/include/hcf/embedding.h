// Copyright 2026 The HCF Authors.
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


#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hcf/core.h"
#include "hcf/ingest.h"

namespace hcf {

// Id-keyed dense vectors of uniform dimension, stored row-major in insertion
// order. Every value is finite.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(size_t dim);

  size_t dim() const { return dim_; }
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  // Throws on duplicate id, wrong length, or a non-finite value.
  void Add(std::string_view id, std::span<const double> values);

  std::optional<std::span<const double>> Find(std::string_view id) const;
  std::span<const double> Row(size_t index) const {
    return {values_.data() + index * dim_, dim_};
  }
  const IdMap& ids() const { return ids_; }

  bool operator==(const EmbeddingSet& other) const {
    return dim_ == other.dim_ && ids_ == other.ids_ && values_ == other.values_;
  }

 private:
  size_t dim_ = 0;
  IdMap ids_;
  std::vector<double> values_;
};

// HCFE text format: a header line "HCFE <version> <dim>" followed by one
// "<id>\t<f_1> ... <f_dim>" line per vector. Lines starting with '#' after
// the header are ignored.
inline constexpr int kHcfeVersion = 1;

EmbeddingSet ParseEmbeddingFile(std::istream& in);
EmbeddingSet LoadEmbeddingFile(const std::filesystem::path& path);
// Values are printed with 9 significant digits.
void WriteEmbeddingFile(const EmbeddingSet& set, std::ostream& out);
void WriteEmbeddingFile(const EmbeddingSet& set, const std::filesystem::path& path);

namespace textembed {

struct ExternalFile {
  std::filesystem::path path;
};

struct HashedBagOfWords {
  size_t dim = 64;
  uint64_t seed = 0;
};

using ProviderKind = std::variant<ExternalFile, HashedBagOfWords>;

struct EmbedResult {
  EmbeddingSet embeddings;
  std::vector<std::string> zero_vector_ids;  // records whose vector is all zeros
};

// Lowercased alphanumeric runs; lines whose first non-blank character is '#'
// are skipped.
std::vector<std::string> Tokenize(std::string_view text);

// Bucket of `token` among `dim` buckets under `seed`.
size_t HashBucket(std::string_view token, size_t dim, uint64_t seed);

// log(1 + tf) per hashed bucket, then L2-normalized. Empty input gives the
// zero vector.
std::vector<double> HashedVector(std::string_view text, const HashedBagOfWords& cfg);

// One vector per record, in corpus order. ExternalFile joins the file's rows
// on record id.
EmbedResult EmbedCorpus(const std::vector<ingest::CorpusRecord>& corpus,
                        const ProviderKind& kind);

}  // namespace textembed
}  // namespace hcf
