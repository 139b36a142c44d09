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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "hcf/baselines.h"
#include "hcf/harness.h"
#include "hcf/metrics.h"
#include "oracles.h"
#include "test_util.h"

namespace hcf::baselines {
namespace {

using testing::Matrix;

TEST(MemCfFit, Examples) {
  // Items 0 and 1 share {u0, u1}; item 2 is held by u2 only; item 3 by
  // u0..u3 and item 4 by u0 alone.
  const auto train = Matrix(4, 6, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 2}, {0, 3}, {1, 3},
                                   {2, 3}, {3, 3}, {0, 4}});
  const auto sims = MemCfFit(train);
  EXPECT_EQ(sims(0, 1), 1.0);
  EXPECT_EQ(sims(0, 2), 0.0);
  EXPECT_EQ(sims(3, 4), 0.5);
  EXPECT_EQ(sims(4, 3), 0.5);
  EXPECT_EQ(sims(2, 2), 1.0);
  for (uint32_t j = 0; j < 6; ++j) EXPECT_EQ(sims(5, j), 0.0);  // unused item
  EXPECT_THROW(MemCfFit(Matrix(2, 2, {})), Error);
}

TEST(MemCfFitProperty, MatchesSetOverlapOracle) {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const size_t m = 1 + rng.UniformIndex(30), n = 1 + rng.UniformIndex(30);
    const auto train = testing::RandomMatrix(rng, m, n, 0.05 + 0.5 * rng.Uniform());
    if (train.empty()) continue;
    const auto sims = MemCfFit(train);
    for (uint32_t i = 0; i < n; ++i) {
      for (uint32_t j = 0; j < n; ++j) {
        EXPECT_EQ(sims(i, j), oracle::SetOverlapCosine(train, i, j)) << i << "," << j;
        EXPECT_EQ(sims(i, j), sims(j, i));
        EXPECT_GE(sims(i, j), 0.0);
        EXPECT_LE(sims(i, j), 1.0 + 1e-15);
      }
    }
  }
}

TEST(MemCfScore, Examples) {
  // Item 0 (held by u0) overlaps only item 1 (held by u0, u1 and u2).
  // u1 holds item 1 and nothing else.
  const auto train = Matrix(4, 3, {{0, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 2}});
  const MemCfModel model(train, {});
  const double s01 = 1.0 / std::sqrt(3.0);
  EXPECT_DOUBLE_EQ(model.similarity()(0, 1), s01);
  // Single held neighbor spanning the whole neighborhood saturates at 1.
  EXPECT_EQ(model.Score(1, 0), 1.0);
  EXPECT_EQ(MemCfScore(model.similarity(), train, 1, 0), 1.0);
  // u3 holds only item 2, which is dissimilar to item 0.
  EXPECT_EQ(model.Score(3, 0), 0.0);

  // u4 holds items 1 and 2 with sims {0.5, 0.0} to item 0: 0.5 / 0.5.
  const auto pair = Matrix(5, 3, {{0, 0}, {1, 0}, {0, 1}, {4, 1}, {4, 2}});
  const MemCfModel pair_model(pair, {});
  EXPECT_EQ(pair_model.similarity()(0, 1), 0.5);
  EXPECT_EQ(pair_model.similarity()(0, 2), 0.0);
  EXPECT_EQ(pair_model.Score(4, 0), 1.0);
}

TEST(MemCfScore, EmptyHistoryScoresZero) {
  const auto train = Matrix(3, 2, {{0, 0}, {0, 1}, {1, 1}});
  const MemCfModel model(train, {});
  EXPECT_EQ(model.Score(2, 0), 0.0);
  EXPECT_EQ(model.Score(2, 1), 0.0);
  EXPECT_EQ(MemCfScore(model.similarity(), train, 2, 0), 0.0);
}

TEST(MemCfScore, PartialNeighborhoodIsFractional) {
  // sim(0, 1) = 1/2 and sim(0, 2) = 1/sqrt2; u2 holds only item 1.
  const auto train = Matrix(3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 2}, {2, 1}});
  const MemCfModel model(train, {});
  const double expected = 0.5 / (0.5 + 1.0 / std::sqrt(2.0));
  EXPECT_NEAR(model.Score(2, 0), expected, 1e-15);
  EXPECT_NEAR(MemCfScore(model.similarity(), train, 2, 0), expected, 1e-15);
}

TEST(MemCfModelProperty, ModelAgreesWithDirectFormAndStaysInUnitRange) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto train = testing::RandomMatrix(rng, 15, 12, 0.25);
    if (train.empty()) continue;
    const MemCfModel model(train, {});
    for (uint32_t u = 0; u < 15; ++u) {
      for (uint32_t i = 0; i < 12; ++i) {
        const double s = model.Score(u, i);
        EXPECT_NEAR(s, MemCfScore(model.similarity(), train, u, i), 1e-12);
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0 + 1e-12);
      }
    }
  }
}

TEST(MemCfModel, KnnTruncation) {
  // Item 0 is closest to item 1, then item 2; item 3 is unrelated. u5 holds
  // only item 2.
  const auto train = Matrix(6, 4, {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0, 1}, {1, 1}, {2, 1},
                                   {0, 2}, {3, 2}, {5, 2}, {4, 3}});
  const MemCfModel full(train, {0});
  const MemCfModel one(train, {1});
  const auto& s = one.similarity();
  ASSERT_GT(s(0, 1), s(0, 2));
  ASSERT_GT(s(0, 2), 0.0);
  EXPECT_EQ(one.Score(5, 0), 0.0);
  EXPECT_DOUBLE_EQ(full.Score(5, 0), s(0, 2) / (s(0, 1) + s(0, 2) + s(0, 3)));
  EXPECT_DOUBLE_EQ(one.Score(1, 2), 1.0);
  EXPECT_EQ(MemCfParams::FromJson({{"knn", 3}}).knn, 3u);
  EXPECT_THROW(MemCfParams::FromJson({{"k", 3}}), Error);
}

BpdmParams SmallBpdm(size_t epochs = 30) {
  BpdmParams p;
  p.factors = 8;
  p.epochs = epochs;
  return p;
}

TEST(Bpdm, InBlockPairsScoreHigher) {
  Rng rng(1);
  const auto train = testing::BlockMatrix(rng, 40, 20, 2, 0.6, 0.02);
  const auto model = BpdmFit(train, SmallBpdm(40));
  double in = 0.0, out = 0.0;
  size_t n_in = 0, n_out = 0;
  for (uint32_t u = 0; u < 40; ++u) {
    for (uint32_t i = 0; i < 20; ++i) {
      const bool same = u * 2 / 40 == i * 2 / 20;
      (same ? in : out) += model.Score(u, i);
      ++(same ? n_in : n_out);
    }
  }
  EXPECT_GT(in / n_in, out / n_out + 0.1);
}

TEST(Bpdm, ZeroEpochsIsChance) {
  Rng rng(2);
  const auto full = testing::BlockMatrix(rng, 60, 30, 3, 0.5, 0.05);
  const auto split = SplitInteractions(full, {0.7, 0.15, 0.15, 3});
  double mean = 0.0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto params = SmallBpdm(0);
    params.seed = seed;
    const auto model = BpdmFit(split.train, params);
    const auto pairs = eval::BuildEvalPairs(split.test, full, 1, seed);
    std::vector<double> scores;
    for (const auto& p : pairs) scores.push_back(model.Score(p.entity, p.item));
    const double auc = eval::RocAuc(scores, eval::Labels(pairs));
    EXPECT_NEAR(auc, 0.5, 0.1) << "seed " << seed;
    mean += auc / 10.0;
  }
  EXPECT_NEAR(mean, 0.5, 0.05);
}

TEST(Bpdm, ObjectiveIncreasesOnSeparableData) {
  Rng rng(3);
  const auto train = testing::BlockMatrix(rng, 40, 20, 2, 0.8, 0.0);
  BpdmFitHistory history;
  BpdmFit(train, SmallBpdm(20), &history);
  const auto& w = history.window_objective;
  ASSERT_GE(w.size(), 20u);
  auto mean = [&](size_t begin, size_t end) {
    double s = 0.0;
    for (size_t k = begin; k < end; ++k) s += w[k];
    return s / static_cast<double>(end - begin);
  };
  const size_t tenth = w.size() / 10;
  EXPECT_GT(mean(w.size() - tenth, w.size()), mean(0, tenth));
  EXPECT_GT(mean(w.size() - tenth, w.size()), -0.3);
}

TEST(Bpdm, DeterministicAndRoundTrips) {
  Rng rng(4);
  const auto train = testing::RandomMatrix(rng, 20, 10, 0.3);
  const auto a = BpdmFit(train, SmallBpdm(5));
  const auto b = BpdmFit(train, SmallBpdm(5));
  EXPECT_EQ(a.entity_factors, b.entity_factors);
  EXPECT_EQ(a.item_bias, b.item_bias);
  const auto path = std::filesystem::temp_directory_path() / "hcf_bpdm.ckpt";
  SaveBpdm(a, path);
  const auto loaded = LoadBpdm(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.item_factors, a.item_factors);
  EXPECT_EQ(loaded.Score(3, 7), a.Score(3, 7));
  EXPECT_EQ(loaded.params.ToJson(), a.params.ToJson());
  EXPECT_THROW(BpdmParams::FromJson({{"rank", 3}}), Error);
  auto bad = SmallBpdm();
  bad.factors = 0;
  EXPECT_THROW(BpdmFit(train, bad), Error);
}

EmbeddingSet Stage1For(const InteractionMatrix& matrix, size_t dim, uint64_t seed) {
  Rng rng(seed);
  EmbeddingSet set(dim);
  for (const auto& id : matrix.entity_ids().ids()) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.Normal();
    set.Add(id, v);
  }
  return set;
}

TEST(Stage1Only, EntityFactorsFrozen) {
  Rng rng(5);
  const auto train = testing::RandomMatrix(rng, 20, 10, 0.3);
  const auto stage1 = Stage1For(train, 8, 1);
  const auto model = Stage1OnlyFit(stage1, train, SmallBpdm(10));
  EXPECT_TRUE(model.frozen_entities);
  for (uint32_t u = 0; u < 20; ++u) {
    const auto row = *stage1.Find(train.entity_ids().Id(u));
    for (size_t k = 0; k < 8; ++k) EXPECT_EQ(model.entity_factors[u * 8 + k], row[k]);
  }
  const auto again = Stage1OnlyFit(stage1, train, SmallBpdm(10));
  EXPECT_EQ(again.item_factors, model.item_factors);
}

TEST(Stage1Only, ProjectsWhenDimsDiffer) {
  Rng rng(6);
  const auto train = testing::RandomMatrix(rng, 10, 6, 0.4);
  const auto stage1 = Stage1For(train, 5, 2);
  const auto model = Stage1OnlyFit(stage1, train, SmallBpdm(3));
  const auto projection = dcf::RandomProjection(5, 8, SmallBpdm().seed);
  const auto row = *stage1.Find(train.entity_ids().Id(4));
  const Eigen::RowVectorXd expected =
      Eigen::Map<const Eigen::RowVectorXd>(row.data(), 5) * projection;
  for (size_t k = 0; k < 8; ++k) EXPECT_NEAR(model.entity_factors[4 * 8 + k], expected(k), 1e-12);
  EmbeddingSet partial(5);
  partial.Add("u0", std::vector<double>(5, 1.0));
  EXPECT_THROW(Stage1OnlyFit(partial, train, SmallBpdm(1)), Error);
}

TEST(Stage2, IsDcfWithRandomInit) {
  RunConfig cfg;
  cfg.synth.m = 60;
  cfg.synth.n = 30;
  cfg.hcf.hidden = {16, 8};
  cfg.hcf.dropout = {0.2};
  cfg.hcf.epochs = 2;
  cfg.hcf.dim = 8;
  cfg.embed.dim = 8;
  const auto seeded = cfg.Seeded();
  const auto data = harness::SynthDataset(seeded);
  const auto prepared = harness::Prepare(data, seeded);
  const auto fitted = harness::Fit("stage2", prepared);

  const auto init = dcf::InitModel(seeded.hcf, prepared->full.shared_entity_ids(),
                                   prepared->full.shared_item_ids());
  const auto direct = dcf::Train(init, prepared->split.train, prepared->split.val, prepared->full);
  ASSERT_TRUE(fitted.dcf.has_value());
  EXPECT_EQ(fitted.dcf->entity_emb, direct.model.entity_emb);
  EXPECT_EQ(fitted.dcf->layers[1].weight, direct.model.layers[1].weight);
  ASSERT_EQ(fitted.history.size(), direct.history.size());
  EXPECT_EQ(fitted.history.back().val_pr_auc, direct.history.back().val_pr_auc);
}

}  // namespace
}  // namespace hcf::baselines
