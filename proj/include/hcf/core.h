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

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hcf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; `line` is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// A parameter or gradient went NaN/Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Bijection between opaque string ids and dense indices, assigned in
// first-seen order.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::span<const std::string> ids);

  uint32_t GetOrAdd(std::string_view id);
  std::optional<uint32_t> Find(std::string_view id) const;
  uint32_t IndexOf(std::string_view id) const;  // throws NotFoundError
  const std::string& Id(uint32_t index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const { return ids_; }
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  bool operator==(const IdMap& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, uint32_t> index_;
};

struct Interaction {
  uint32_t entity;
  uint32_t item;
  auto operator<=>(const Interaction&) const = default;
};

// Sparse binary entity x item observations. Entries are kept sorted by
// (entity, item) and unique; id maps are shared between a matrix and the
// splits derived from it.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;

  // Throws Error on out-of-range indices or duplicate pairs.
  InteractionMatrix(std::shared_ptr<const IdMap> entities,
                    std::shared_ptr<const IdMap> items,
                    std::vector<Interaction> entries);

  size_t num_entities() const { return entities_ ? entities_->size() : 0; }
  size_t num_items() const { return items_ ? items_->size() : 0; }
  size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::vector<Interaction>& entries() const { return entries_; }
  const IdMap& entity_ids() const { return *entities_; }
  const IdMap& item_ids() const { return *items_; }
  const std::shared_ptr<const IdMap>& shared_entity_ids() const { return entities_; }
  const std::shared_ptr<const IdMap>& shared_item_ids() const { return items_; }

  // Items held by `entity`, ascending.
  std::span<const uint32_t> ItemsOf(uint32_t entity) const;
  bool Contains(uint32_t entity, uint32_t item) const;
  // Number of distinct entities holding `item`.
  uint32_t ItemCount(uint32_t item) const { return item_counts_.at(item); }
  const std::vector<uint32_t>& item_counts() const { return item_counts_; }

  // Same id maps, different entries.
  InteractionMatrix WithEntries(std::vector<Interaction> entries) const;

  bool operator==(const InteractionMatrix& other) const;

 private:
  std::shared_ptr<const IdMap> entities_;
  std::shared_ptr<const IdMap> items_;
  std::vector<Interaction> entries_;
  std::vector<size_t> row_offsets_;
  std::vector<uint32_t> row_items_;
  std::vector<uint32_t> item_counts_;
};

struct SplitSpec {
  double train_frac = 0.70;
  double val_frac = 0.15;
  double test_frac = 0.15;
  uint64_t seed = 0;

  // Throws Error unless all fractions are positive and sum to 1 within 1e-9.
  void Validate() const;
};

struct Split {
  InteractionMatrix train;
  InteractionMatrix val;
  InteractionMatrix test;
};

// Sizes for `total` items under `spec`: floor of each share, then leftover
// units go to the largest fractional remainders. Remainders within 1e-9 of
// each other tie, and ties resolve in train, val, test order.
std::array<size_t, 3> SplitSizes(size_t total, const SplitSpec& spec);

// Partitions the positive pairs by a seeded Fisher-Yates shuffle of the
// canonical entry order: the first block goes to train, then val, then test.
Split SplitInteractions(const InteractionMatrix& matrix, const SplitSpec& spec);

}  // namespace hcf
