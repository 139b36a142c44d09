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


#include <algorithm>
#include <cctype>
#include <cmath>

#include "hcf/embedding.h"
#include "hcf/rng.h"

namespace hcf::textembed {

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] == '#') continue;
    std::string current;
    for (char c : line) {
      const auto uc = static_cast<unsigned char>(c);
      if (std::isalnum(uc)) {
        current.push_back(static_cast<char>(std::tolower(uc)));
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
  }
  return tokens;
}

size_t HashBucket(std::string_view token, size_t dim, uint64_t seed) {
  return static_cast<size_t>(Mix64(Fnv1a(token) ^ Mix64(seed)) % dim);
}

std::vector<double> HashedVector(std::string_view text, const HashedBagOfWords& cfg) {
  if (cfg.dim < 2) throw Error("hashed bag-of-words needs dim >= 2");
  std::vector<double> counts(cfg.dim, 0.0);
  for (const auto& token : Tokenize(text)) counts[HashBucket(token, cfg.dim, cfg.seed)] += 1.0;
  double norm2 = 0.0;
  for (double& c : counts) {
    c = std::log1p(c);
    norm2 += c * c;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& c : counts) c *= inv;
  }
  return counts;
}

namespace {

bool IsZero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

EmbedResult FromFile(const std::vector<ingest::CorpusRecord>& corpus, const ExternalFile& kind) {
  const EmbeddingSet source = LoadEmbeddingFile(kind.path);
  EmbedResult result{EmbeddingSet(source.dim()), {}};
  std::vector<std::string> missing;
  for (const auto& record : corpus) {
    auto row = source.Find(record.id);
    if (!row) {
      missing.push_back(record.id);
      continue;
    }
    result.embeddings.Add(record.id, *row);
    if (IsZero(*row)) result.zero_vector_ids.push_back(record.id);
  }
  if (!missing.empty()) {
    std::string message = "embedding file is missing " + std::to_string(missing.size()) + " id(s):";
    for (size_t k = 0; k < std::min<size_t>(missing.size(), 10); ++k) message += " " + missing[k];
    if (missing.size() > 10) message += " ...";
    throw NotFoundError(message);
  }
  return result;
}

EmbedResult Hashed(const std::vector<ingest::CorpusRecord>& corpus, const HashedBagOfWords& kind) {
  EmbedResult result{EmbeddingSet(kind.dim), {}};
  for (const auto& record : corpus) {
    const auto v = HashedVector(record.text, kind);
    result.embeddings.Add(record.id, v);
    if (IsZero(v)) result.zero_vector_ids.push_back(record.id);
  }
  return result;
}

}  // namespace

EmbedResult EmbedCorpus(const std::vector<ingest::CorpusRecord>& corpus, const ProviderKind& kind) {
  if (corpus.empty()) throw Error("cannot embed an empty corpus");
  if (const auto* file = std::get_if<ExternalFile>(&kind)) return FromFile(corpus, *file);
  return Hashed(corpus, std::get<HashedBagOfWords>(kind));
}

}  // namespace hcf::textembed
