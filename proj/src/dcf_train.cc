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
#include <mutex>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "hcf/dcf.h"
#include "hcf/metrics.h"

namespace hcf::dcf {
namespace {

// Positives of `train` plus neg_ratio sampled negatives each, shuffled.
std::vector<Example> EpochExamples(const InteractionMatrix& train,
                                   const InteractionMatrix& observed, size_t neg_ratio,
                                   Rng& rng) {
  const size_t n = observed.num_items();
  std::vector<Example> examples;
  examples.reserve(train.nnz() * (1 + neg_ratio));
  for (const auto& e : train.entries()) {
    examples.push_back({e.entity, e.item, 1.0});
    if (observed.ItemsOf(e.entity).size() >= n) continue;
    for (size_t k = 0; k < neg_ratio; ++k) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const auto item = static_cast<uint32_t>(rng.UniformIndex(n));
        if (observed.Contains(e.entity, item)) continue;
        examples.push_back({e.entity, item, 0.0});
        break;
      }
    }
  }
  rng.Shuffle(examples);
  return examples;
}

double ValidationPrAuc(const HcfModel& model, const std::vector<eval::LabeledPair>& pairs,
                       const std::vector<int>& labels) {
  std::vector<std::pair<uint32_t, uint32_t>> index_pairs;
  index_pairs.reserve(pairs.size());
  for (const auto& p : pairs) index_pairs.emplace_back(p.entity, p.item);
  const auto scores = ScorePairs(model, index_pairs);
  return eval::PrAuc(scores, labels);
}

// Per-batch activations are a few MB each. glibc would otherwise mmap and
// unmap them on every batch, and the page faults cost about a fifth of an
// epoch.
void KeepLargeAllocationsOnHeap() {
#if defined(__GLIBC__)
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 32 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
    mallopt(M_TOP_PAD, 64 << 20);
  });
#endif
}

}  // namespace

TrainResult Train(HcfModel model, const InteractionMatrix& train, const InteractionMatrix& val,
                  const InteractionMatrix& observed) {
  const HcfConfig& cfg = model.config;
  cfg.Validate();
  KeepLargeAllocationsOnHeap();
  if (train.empty()) throw Error("training split is empty");
  if (train.num_entities() != model.num_entities() || train.num_items() != model.num_items()) {
    throw Error("training matrix shape does not match the model");
  }

  std::vector<eval::LabeledPair> val_pairs;
  std::vector<int> val_labels;
  bool has_val = false;
  if (!val.empty()) {
    val_pairs = eval::BuildEvalPairs(val, observed, cfg.neg_ratio, DeriveSeed(cfg.seed, "val_pairs"));
    val_labels = eval::Labels(val_pairs);
    has_val = std::count(val_labels.begin(), val_labels.end(), 0) > 0;
  }

  Rng sample_rng(DeriveSeed(cfg.seed, "negatives"));
  Rng dropout_rng(DeriveSeed(cfg.seed, "dropout"));
  TrainResult result{model, {}, 0, false, std::nullopt};
  double best_score = -1.0;
  size_t since_best = 0;

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto examples = EpochExamples(train, observed, cfg.neg_ratio, sample_rng);
    double loss_sum = 0.0;
    bool finite = true;
    try {
      for (size_t begin = 0; begin < examples.size(); begin += cfg.batch_size) {
        const size_t end = std::min(examples.size(), begin + cfg.batch_size);
        std::span<const Example> batch(examples.data() + begin, end - begin);
        const auto cache = Forward(model, batch, true, &dropout_rng);
        const double loss = BatchLoss(model, batch, cache);
        if (!std::isfinite(loss)) throw NonFiniteError("non-finite training loss");
        loss_sum += loss * static_cast<double>(batch.size());
        AdamStep(model, Backward(model, batch, cache), cfg.lr);
      }
      if (!model.AllFinite()) throw NonFiniteError("non-finite parameters after update");
    } catch (const NonFiniteError& e) {
      result.aborted = std::string(e.what()) + " in epoch " + std::to_string(epoch);
      finite = false;
    }
    if (!finite) break;

    EpochRecord record{epoch, loss_sum / static_cast<double>(examples.size()), 0.0};
    if (has_val) {
      record.val_pr_auc = ValidationPrAuc(model, val_pairs, val_labels);
    }
    result.history.push_back(record);

    const double score = has_val ? record.val_pr_auc : static_cast<double>(epoch);
    if (score > best_score) {
      best_score = score;
      result.model = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (has_val && ++since_best >= cfg.patience && cfg.patience > 0) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace hcf::dcf
