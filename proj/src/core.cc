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


#include "hcf/core.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "hcf/rng.h"

namespace hcf {

IdMap::IdMap(std::span<const std::string> ids) {
  for (const auto& id : ids) {
    if (Find(id)) throw Error("duplicate id '" + id + "'");
    GetOrAdd(id);
  }
}

uint32_t IdMap::GetOrAdd(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it != index_.end()) return it->second;
  const auto index = static_cast<uint32_t>(ids_.size());
  ids_.emplace_back(id);
  index_.emplace(ids_.back(), index);
  return index;
}

std::optional<uint32_t> IdMap::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

uint32_t IdMap::IndexOf(std::string_view id) const {
  auto index = Find(id);
  if (!index) throw NotFoundError("unknown id '" + std::string(id) + "'");
  return *index;
}

InteractionMatrix::InteractionMatrix(std::shared_ptr<const IdMap> entities,
                                     std::shared_ptr<const IdMap> items,
                                     std::vector<Interaction> entries)
    : entities_(std::move(entities)),
      items_(std::move(items)),
      entries_(std::move(entries)) {
  if (!entities_ || !items_) throw Error("interaction matrix needs id maps");
  const size_t m = entities_->size();
  const size_t n = items_->size();
  std::sort(entries_.begin(), entries_.end());
  for (size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.entity >= m || e.item >= n) throw Error("interaction index out of range");
    if (k > 0 && entries_[k - 1] == e) {
      throw Error("duplicate interaction (" + entities_->Id(e.entity) + ", " +
                  items_->Id(e.item) + ")");
    }
  }
  row_offsets_.assign(m + 1, 0);
  item_counts_.assign(n, 0);
  row_items_.reserve(entries_.size());
  for (const auto& e : entries_) {
    ++row_offsets_[e.entity + 1];
    ++item_counts_[e.item];
    row_items_.push_back(e.item);
  }
  for (size_t u = 0; u < m; ++u) row_offsets_[u + 1] += row_offsets_[u];
}

std::span<const uint32_t> InteractionMatrix::ItemsOf(uint32_t entity) const {
  const size_t begin = row_offsets_.at(entity);
  const size_t end = row_offsets_.at(entity + 1);
  return {row_items_.data() + begin, end - begin};
}

bool InteractionMatrix::Contains(uint32_t entity, uint32_t item) const {
  if (entity >= num_entities()) return false;
  auto row = ItemsOf(entity);
  return std::binary_search(row.begin(), row.end(), item);
}

InteractionMatrix InteractionMatrix::WithEntries(std::vector<Interaction> entries) const {
  return InteractionMatrix(entities_, items_, std::move(entries));
}

bool InteractionMatrix::operator==(const InteractionMatrix& other) const {
  return entity_ids() == other.entity_ids() && item_ids() == other.item_ids() &&
         entries_ == other.entries_;
}

void SplitSpec::Validate() const {
  const std::array<double, 3> fracs{train_frac, val_frac, test_frac};
  for (double f : fracs) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error("split fractions must be positive");
    }
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw Error("split fractions must sum to 1");
  }
}

std::array<size_t, 3> SplitSizes(size_t total, const SplitSpec& spec) {
  spec.Validate();
  const std::array<double, 3> fracs{spec.train_frac, spec.val_frac, spec.test_frac};
  std::array<size_t, 3> sizes{};
  std::array<double, 3> remainders{};
  size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = fracs[k] * static_cast<double>(total);
    sizes[k] = static_cast<size_t>(std::floor(exact + 1e-9));
    remainders[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainders[a] > remainders[b] + 1e-9;
  });
  for (size_t k = 0; assigned < total; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

Split SplitInteractions(const InteractionMatrix& matrix, const SplitSpec& spec) {
  spec.Validate();
  if (matrix.empty()) throw Error("nothing to split");
  std::vector<Interaction> shuffled = matrix.entries();
  Rng rng(DeriveSeed(spec.seed, "split"));
  rng.Shuffle(shuffled);
  const auto sizes = SplitSizes(shuffled.size(), spec);
  auto begin = shuffled.begin();
  auto take = [&](size_t count) {
    std::vector<Interaction> part(begin, begin + static_cast<std::ptrdiff_t>(count));
    begin += static_cast<std::ptrdiff_t>(count);
    return matrix.WithEntries(std::move(part));
  };
  Split split;
  split.train = take(sizes[0]);
  split.val = take(sizes[1]);
  split.test = take(sizes[2]);
  return split;
}

}  // namespace hcf
