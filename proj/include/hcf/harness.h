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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hcf/baselines.h"
#include "hcf/config.h"
#include "hcf/core.h"
#include "hcf/dcf.h"
#include "hcf/embedding.h"
#include "hcf/ingest.h"
#include "hcf/metrics.h"

// Comparison (one row per model) and ablation (feature set x item cap x
// model x seed) runners shared by the CLI and the acceptance suite.
namespace hcf::harness {

// The five compared configurations, in report order.
inline const std::vector<std::string> kAllModels{"bpdm", "memcf", "stage1", "stage2", "hcf"};

// "BPDM", "Mem.CF", "Independent Stage 1", "Independent Stage 2", "HCF".
std::string DisplayName(const std::string& model);

// Stage-1 provider named by cfg.embed; the hashed seed derives from cfg.seed.
textembed::ProviderKind EmbedProvider(const RunConfig& cfg);

struct Dataset {
  InteractionMatrix matrix;  // already density-filtered
  std::vector<ingest::CorpusRecord> corpus;
  std::vector<ingest::CorpusRecord> item_corpus;  // used by the CC+TechDesc variant
};

// Density-filtered synthetic data for `cfg.synth` (seeded by cfg.Seeded()).
Dataset SynthDataset(const RunConfig& cfg);

// Everything all models share for one (dataset, seed).
struct Prepared {
  RunConfig cfg;  // seeded
  InteractionMatrix full;
  Split split;
  EmbeddingSet stage1;
  std::optional<EmbeddingSet> item_stage1;
  std::vector<eval::LabeledPair> val_pairs;
  std::vector<eval::LabeledPair> test_pairs;
  ingest::CoverageReport coverage;
};

// `cfg` must already be seeded. With use_item_text, item descriptions are
// embedded by the hashed provider and seed the item rows of the HCF model.
// A given `stage1` is used instead of embedding data.corpus.
std::shared_ptr<const Prepared> Prepare(const Dataset& data, const RunConfig& cfg,
                                        bool use_item_text = false,
                                        const EmbeddingSet* stage1 = nullptr);

struct FittedModel {
  std::string kind;
  std::shared_ptr<const Prepared> prepared;
  std::optional<dcf::HcfModel> dcf;
  std::optional<baselines::BpdmModel> bpdm;
  std::shared_ptr<const baselines::MemCfModel> memcf;
  std::vector<dcf::EpochRecord> history;

  double Score(uint32_t entity, uint32_t item) const;
  std::vector<double> Score(std::span<const eval::LabeledPair> pairs) const;
};

FittedModel Fit(const std::string& kind, std::shared_ptr<const Prepared> prepared);

// Validation-selected threshold applied to the test pairs.
eval::EvalReport EvaluateFitted(const FittedModel& model);

struct ComparisonResult {
  std::vector<eval::EvalReport> reports;
  std::vector<FittedModel> models;

  nlohmann::json ToJson() const;
  std::string Table() const;
};

ComparisonResult RunComparison(const Dataset& data, const std::vector<std::string>& models,
                               const RunConfig& cfg);

struct AblationCell {
  std::string variant;
  size_t cap = 0;        // requested
  size_t items = 0;      // actually used
  std::string model;
  uint64_t seed = 0;
  eval::EvalReport report;
};

struct AblationRow {
  std::string variant;
  size_t cap = 0;
  std::string model;
  double precision = 0.0;  // means over seeds
  double recall = 0.0;
  double pr_auc = 0.0;
  double roc_auc = 0.0;
};

struct AblationResult {
  std::vector<AblationCell> cells;  // variant-major, then cap, model, seed
  std::vector<AblationRow> rows;    // seed means, same order
  std::vector<std::string> warnings;

  nlohmann::json ToJson() const;
  // Two tables: precision/recall and PR-AUC/ROC-AUC per (variant, cap, model).
  std::string Table() const;
};

// Runs every cell of cfg.ablation on `data`; each seed reseeds the split,
// embeddings and models via cfg.WithSeed(seed).Seeded(). Cells run on up to
// `jobs` threads; results do not depend on `jobs`.
AblationResult RunAblation(const Dataset& data, const RunConfig& cfg, size_t jobs = 1);

}  // namespace hcf::harness
