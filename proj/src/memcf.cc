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
#include <cmath>
#include <numeric>

#include "hcf/baselines.h"

namespace hcf::baselines {

MemCfParams MemCfParams::FromJson(const nlohmann::json& json) {
  MemCfParams params;
  for (const auto& [key, value] : json.items()) {
    if (key != "knn") throw Error("unknown memcf config key '" + key + "'");
  }
  if (json.contains("knn")) params.knn = json.at("knn").get<size_t>();
  return params;
}

ItemSimilarity MemCfFit(const InteractionMatrix& train) {
  if (train.empty()) throw Error("memcf needs a nonempty training matrix");
  const size_t n = train.num_items();
  ItemSimilarity sims(n);
  // Co-occurrence counts, accumulated per entity.
  std::vector<double> overlap(n * n, 0.0);
  for (uint32_t u = 0; u < train.num_entities(); ++u) {
    const auto items = train.ItemsOf(u);
    for (size_t a = 0; a < items.size(); ++a) {
      for (size_t b = a; b < items.size(); ++b) {
        overlap[items[a] * n + items[b]] += 1.0;
      }
    }
  }
  for (uint32_t i = 0; i < n; ++i) {
    const double ci = train.ItemCount(i);
    if (ci == 0) continue;
    for (uint32_t j = i; j < n; ++j) {
      const double cj = train.ItemCount(j);
      if (cj == 0) continue;
      const double value = i == j ? 1.0 : overlap[i * n + j] / std::sqrt(ci * cj);
      sims.at(i, j) = value;
      sims.at(j, i) = value;
    }
  }
  return sims;
}

double MemCfScore(const ItemSimilarity& sims, const InteractionMatrix& train, uint32_t entity,
                  uint32_t item) {
  const auto held = train.ItemsOf(entity);
  if (held.empty()) return 0.0;
  double numerator = 0.0;
  for (uint32_t j : held) {
    if (j != item) numerator += sims(item, j);
  }
  double denominator = 0.0;
  for (uint32_t j = 0; j < sims.size(); ++j) {
    if (j != item) denominator += std::abs(sims(item, j));
  }
  return denominator > 0.0 ? numerator / denominator : 0.0;
}

MemCfModel::MemCfModel(const InteractionMatrix& train, MemCfParams params)
    : train_(&train), sims_(MemCfFit(train)), knn_(params.knn) {
  const size_t n = sims_.size();
  denominators_.assign(n, 0.0);
  if (knn_ > 0 && knn_ < n - 1) neighbors_.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    if (neighbors_.empty()) {
      for (uint32_t j = 0; j < n; ++j) {
        if (j != i) denominators_[i] += std::abs(sims_(i, j));
      }
      continue;
    }
    std::vector<uint32_t> others;
    for (uint32_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(), [&](uint32_t a, uint32_t b) {
      return std::abs(sims_(i, a)) > std::abs(sims_(i, b));
    });
    others.resize(knn_);
    std::sort(others.begin(), others.end());
    for (uint32_t j : others) denominators_[i] += std::abs(sims_(i, j));
    neighbors_[i] = std::move(others);
  }
}

double MemCfModel::Score(uint32_t entity, uint32_t item) const {
  const auto held = train_->ItemsOf(entity);
  if (held.empty() || denominators_[item] == 0.0) return 0.0;
  double numerator = 0.0;
  if (neighbors_.empty()) {
    for (uint32_t j : held) {
      if (j != item) numerator += sims_(item, j);
    }
  } else {
    const auto& hood = neighbors_[item];
    for (uint32_t j : held) {
      if (std::binary_search(hood.begin(), hood.end(), j)) numerator += sims_(item, j);
    }
  }
  return numerator / denominators_[item];
}

}  // namespace hcf::baselines
