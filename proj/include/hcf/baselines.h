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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "json.hpp"

#include "hcf/core.h"
#include "hcf/embedding.h"

namespace hcf::baselines {

// Item-item cosine similarity over binary item columns:
// sim(i, j) = |U_i & U_j| / sqrt(|U_i| |U_j|), zero rows for unused items.
class ItemSimilarity {
 public:
  ItemSimilarity() = default;
  explicit ItemSimilarity(size_t n) : n_(n), values_(n * n, 0.0) {}

  size_t size() const { return n_; }
  double operator()(uint32_t i, uint32_t j) const { return values_[i * n_ + j]; }
  double& at(uint32_t i, uint32_t j) { return values_[i * n_ + j]; }
  const std::vector<double>& values() const { return values_; }

 private:
  size_t n_ = 0;
  std::vector<double> values_;
};

struct MemCfParams {
  // Neighborhood of an item: its `knn` most similar other items (ties by
  // index). 0 means every other item.
  size_t knn = 0;

  nlohmann::json ToJson() const { return {{"knn", knn}}; }
  static MemCfParams FromJson(const nlohmann::json& json);
};

ItemSimilarity MemCfFit(const InteractionMatrix& train);

// Item-based prediction with binary ratings over the neighborhood N(i):
//
//   score(u, i) = sum_{j in N(i), u holds j} sim(i, j) / sum_{j in N(i)} |sim(i, j)|
//
// 0 when u holds no training item or the denominator is 0.
class MemCfModel {
 public:
  MemCfModel(const InteractionMatrix& train, MemCfParams params);

  const ItemSimilarity& similarity() const { return sims_; }
  double Score(uint32_t entity, uint32_t item) const;

 private:
  const InteractionMatrix* train_;
  ItemSimilarity sims_;
  std::vector<std::vector<uint32_t>> neighbors_;  // per item, empty = all
  std::vector<double> denominators_;
  size_t knn_;
};

// Direct form for a given similarity matrix, summing over every item j != i.
double MemCfScore(const ItemSimilarity& sims, const InteractionMatrix& train, uint32_t entity,
                  uint32_t item);

struct BpdmParams {
  size_t factors = 32;
  double lr = 0.05;
  double reg = 0.01;
  size_t epochs = 30;  // each epoch draws nnz(train) triples
  double init_stddev = 0.1;
  uint64_t seed = 0;

  nlohmann::json ToJson() const;
  static BpdmParams FromJson(const nlohmann::json& json);
};

// Pairwise-ranking model: x(u, i) = P_u . Q_i + b_i, fit by stochastic ascent
// on ln sigmoid(x(u, i+) - x(u, i-)) - reg |params|^2 over sampled triples with
// (u, i+) observed and i- uniform among items u does not hold.
struct BpdmModel {
  BpdmParams params;
  size_t num_entities = 0;
  size_t num_items = 0;
  std::vector<double> entity_factors;  // m x k row-major
  std::vector<double> item_factors;    // n x k row-major
  std::vector<double> item_bias;
  bool frozen_entities = false;

  double Raw(uint32_t entity, uint32_t item) const;
  // sigmoid(Raw)
  double Score(uint32_t entity, uint32_t item) const;
};

struct BpdmFitHistory {
  // Mean of ln sigmoid(x_ui - x_uj) over consecutive windows of 100 steps.
  std::vector<double> window_objective;
};

BpdmModel BpdmFit(const InteractionMatrix& train, const BpdmParams& params,
                  BpdmFitHistory* history = nullptr);

// Stage-1-only scorer: entity factors are the stage-1 vectors mapped to k
// dims (identity when k equals the stage-1 dim, otherwise the seeded random
// projection), frozen; only item factors and biases are fit.
BpdmModel Stage1OnlyFit(const EmbeddingSet& stage1, const InteractionMatrix& train,
                        const BpdmParams& params, BpdmFitHistory* history = nullptr);

void SaveBpdm(const BpdmModel& model, const std::filesystem::path& path);
BpdmModel LoadBpdm(const std::filesystem::path& path);

}  // namespace hcf::baselines
