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
#include <string>
#include <vector>

#include "json.hpp"

#include "hcf/core.h"

namespace hcf::ingest {

struct LoadedInteractions {
  InteractionMatrix matrix;
  size_t duplicates = 0;  // repeated (entity, item) lines collapsed
};

// "entity_id,item_id" per line; blank lines and lines starting with '#' are
// skipped. Ids are trimmed and assigned indices in file order.
LoadedInteractions ParseInteractions(std::istream& in);
LoadedInteractions LoadInteractions(const std::filesystem::path& path);
void WriteInteractions(const InteractionMatrix& matrix, std::ostream& out);
void WriteInteractions(const InteractionMatrix& matrix, const std::filesystem::path& path);

// Fraction of entities holding `item`.
double OccurrenceDensity(const InteractionMatrix& matrix, uint32_t item);
double OccurrenceDensity(const InteractionMatrix& matrix, std::string_view item_id);

struct DensityFilterConfig {
  double rho_min = 0.1;
  double rho_max = 0.85;

  // Requires 0 <= rho_min < rho_max <= 1.
  void Validate() const;
};

enum class DropReason { kTooRare, kTooCommon };

struct DroppedItem {
  std::string id;
  double rho;
  DropReason reason;
};

struct FilterReport {
  std::vector<std::string> kept;
  std::vector<DroppedItem> dropped;

  nlohmann::json ToJson() const;
};

struct FilterResult {
  InteractionMatrix matrix;
  FilterReport report;
};

// Keeps items with rho_min <= rho <= rho_max. Entities are all retained, even
// those left without items; kept items are re-indexed in their original order.
FilterResult FilterItems(const InteractionMatrix& matrix, const DensityFilterConfig& cfg);

// Keeps the `cap` items with the highest counts (ties by lower index) and
// re-indexes them in original order. cap >= n returns the input unchanged.
InteractionMatrix CapItems(const InteractionMatrix& matrix, size_t cap);

struct CorpusRecord {
  std::string id;
  std::string text;
  bool operator==(const CorpusRecord&) const = default;
};

// JSON lines with string fields "id" and "text".
std::vector<CorpusRecord> ParseCorpus(std::istream& in);
std::vector<CorpusRecord> LoadCorpus(const std::filesystem::path& path);
void WriteCorpus(const std::vector<CorpusRecord>& corpus, const std::filesystem::path& path);

struct CoverageReport {
  std::vector<std::string> missing;      // entity has no corpus record
  std::vector<std::string> empty_text;   // record exists, text is empty
  std::vector<std::string> extra;        // record for an unknown entity

  nlohmann::json ToJson() const;
};

struct AlignedCorpus {
  std::vector<CorpusRecord> records;  // one per entity, entity index order
  CoverageReport coverage;
};

// Orders the corpus by the matrix's entity indices. Entities without a record
// get an empty description.
AlignedCorpus AlignCorpus(const std::vector<CorpusRecord>& corpus, const IdMap& entities);

}  // namespace hcf::ingest
