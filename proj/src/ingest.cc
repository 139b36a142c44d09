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


#include "hcf/ingest.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace hcf::ingest {
namespace {

std::string_view Trim(std::string_view s) {
  const char* kSpace = " \t\r\n";
  const auto begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(kSpace);
  return s.substr(begin, end - begin + 1);
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

const char* ReasonName(DropReason reason) {
  return reason == DropReason::kTooRare ? "too_rare" : "too_common";
}

// Restricts `matrix` to items with keep[item] set, preserving item order.
InteractionMatrix KeepItems(const InteractionMatrix& matrix, const std::vector<bool>& keep) {
  auto items = std::make_shared<IdMap>();
  std::vector<uint32_t> remap(matrix.num_items(), UINT32_MAX);
  for (uint32_t i = 0; i < matrix.num_items(); ++i) {
    if (keep[i]) remap[i] = items->GetOrAdd(matrix.item_ids().Id(i));
  }
  std::vector<Interaction> entries;
  for (const auto& e : matrix.entries()) {
    if (remap[e.item] != UINT32_MAX) entries.push_back({e.entity, remap[e.item]});
  }
  return InteractionMatrix(matrix.shared_entity_ids(), std::move(items), std::move(entries));
}

}  // namespace

LoadedInteractions ParseInteractions(std::istream& in) {
  auto entities = std::make_shared<IdMap>();
  auto items = std::make_shared<IdMap>();
  std::set<Interaction> seen;
  std::vector<Interaction> entries;
  LoadedInteractions result;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("expected 'entity_id,item_id'", line_no);
    }
    auto entity = Trim(text.substr(0, comma));
    auto item = Trim(text.substr(comma + 1));
    if (entity.empty() || item.empty()) throw ParseError("empty id field", line_no);
    Interaction pair{entities->GetOrAdd(entity), items->GetOrAdd(item)};
    if (seen.insert(pair).second) {
      entries.push_back(pair);
    } else {
      ++result.duplicates;
    }
  }
  if (entries.empty()) throw ParseError("interactions file has no pairs", 0);
  result.matrix = InteractionMatrix(std::move(entities), std::move(items), std::move(entries));
  return result;
}

LoadedInteractions LoadInteractions(const std::filesystem::path& path) {
  auto in = OpenForRead(path);
  return ParseInteractions(in);
}

void WriteInteractions(const InteractionMatrix& matrix, std::ostream& out) {
  for (const auto& e : matrix.entries()) {
    out << matrix.entity_ids().Id(e.entity) << ',' << matrix.item_ids().Id(e.item) << '\n';
  }
}

void WriteInteractions(const InteractionMatrix& matrix, const std::filesystem::path& path) {
  auto out = OpenForWrite(path);
  WriteInteractions(matrix, out);
}

double OccurrenceDensity(const InteractionMatrix& matrix, uint32_t item) {
  if (item >= matrix.num_items()) throw NotFoundError("unknown item index");
  return static_cast<double>(matrix.ItemCount(item)) /
         static_cast<double>(matrix.num_entities());
}

double OccurrenceDensity(const InteractionMatrix& matrix, std::string_view item_id) {
  auto index = matrix.item_ids().Find(item_id);
  if (!index) throw NotFoundError("unknown item '" + std::string(item_id) + "'");
  return OccurrenceDensity(matrix, *index);
}

void DensityFilterConfig::Validate() const {
  if (!(rho_min >= 0.0 && rho_min < rho_max && rho_max <= 1.0)) {
    throw Error("density filter bounds must satisfy 0 <= rho_min < rho_max <= 1");
  }
}

nlohmann::json FilterReport::ToJson() const {
  nlohmann::json dropped_json = nlohmann::json::array();
  for (const auto& d : dropped) {
    dropped_json.push_back({{"id", d.id}, {"rho", d.rho}, {"reason", ReasonName(d.reason)}});
  }
  return {{"kept", kept}, {"dropped", dropped_json}};
}

FilterResult FilterItems(const InteractionMatrix& matrix, const DensityFilterConfig& cfg) {
  cfg.Validate();
  FilterResult result;
  std::vector<bool> keep(matrix.num_items(), false);
  for (uint32_t i = 0; i < matrix.num_items(); ++i) {
    const double rho = OccurrenceDensity(matrix, i);
    const auto& id = matrix.item_ids().Id(i);
    if (rho < cfg.rho_min) {
      result.report.dropped.push_back({id, rho, DropReason::kTooRare});
    } else if (rho > cfg.rho_max) {
      result.report.dropped.push_back({id, rho, DropReason::kTooCommon});
    } else {
      keep[i] = true;
      result.report.kept.push_back(id);
    }
  }
  if (result.report.kept.empty()) throw Error("empty matrix after density filter");
  result.matrix = KeepItems(matrix, keep);
  return result;
}

InteractionMatrix CapItems(const InteractionMatrix& matrix, size_t cap) {
  if (cap >= matrix.num_items()) return matrix;
  std::vector<uint32_t> order(matrix.num_items());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return matrix.ItemCount(a) > matrix.ItemCount(b);
  });
  std::vector<bool> keep(matrix.num_items(), false);
  for (size_t k = 0; k < cap; ++k) keep[order[k]] = true;
  return KeepItems(matrix, keep);
}

std::vector<CorpusRecord> ParseCorpus(std::istream& in) {
  std::vector<CorpusRecord> corpus;
  std::set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ParseError("invalid JSON", line_no);
    }
    if (!object.is_object() || !object.contains("id") || !object["id"].is_string() ||
        !object.contains("text") || !object["text"].is_string()) {
      throw ParseError("corpus record needs string fields 'id' and 'text'", line_no);
    }
    CorpusRecord record{object["id"].get<std::string>(), object["text"].get<std::string>()};
    if (!ids.insert(record.id).second) {
      throw ParseError("duplicate corpus id '" + record.id + "'", line_no);
    }
    corpus.push_back(std::move(record));
  }
  if (corpus.empty()) throw ParseError("corpus file has no records", 0);
  return corpus;
}

std::vector<CorpusRecord> LoadCorpus(const std::filesystem::path& path) {
  auto in = OpenForRead(path);
  return ParseCorpus(in);
}

void WriteCorpus(const std::vector<CorpusRecord>& corpus, const std::filesystem::path& path) {
  auto out = OpenForWrite(path);
  for (const auto& record : corpus) {
    out << nlohmann::json{{"id", record.id}, {"text", record.text}}.dump() << '\n';
  }
}

nlohmann::json CoverageReport::ToJson() const {
  return {{"missing", missing}, {"empty_text", empty_text}, {"extra", extra}};
}

AlignedCorpus AlignCorpus(const std::vector<CorpusRecord>& corpus, const IdMap& entities) {
  AlignedCorpus aligned;
  std::vector<const CorpusRecord*> by_entity(entities.size(), nullptr);
  for (const auto& record : corpus) {
    auto index = entities.Find(record.id);
    if (!index) {
      aligned.coverage.extra.push_back(record.id);
      continue;
    }
    by_entity[*index] = &record;
  }
  aligned.records.reserve(entities.size());
  for (uint32_t u = 0; u < entities.size(); ++u) {
    const auto& id = entities.Id(u);
    if (by_entity[u] == nullptr) {
      aligned.coverage.missing.push_back(id);
      aligned.records.push_back({id, ""});
      continue;
    }
    if (by_entity[u]->text.empty()) aligned.coverage.empty_text.push_back(id);
    aligned.records.push_back(*by_entity[u]);
  }
  return aligned;
}

}  // namespace hcf::ingest
