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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hcf/core.h"

namespace hcf::eval {

struct LabeledPair {
  uint32_t entity;
  uint32_t item;
  int label;  // 0 or 1
  bool operator==(const LabeledPair&) const = default;
};

// Every positive of `test` followed, per positive, by up to `neg_ratio`
// distinct negatives for the same entity drawn uniformly from items the
// entity does not hold anywhere in `full`. An entity holding every item gets
// no negatives.
std::vector<LabeledPair> BuildEvalPairs(const InteractionMatrix& test,
                                        const InteractionMatrix& full, size_t neg_ratio,
                                        uint64_t seed);

// For every entity holding a `test` positive, every item the entity does not
// hold in `exclude`, labeled by membership in `test`. For small data only.
std::vector<LabeledPair> BuildFullEvalPairs(const InteractionMatrix& test,
                                            const InteractionMatrix& exclude);

std::vector<int> Labels(std::span<const LabeledPair> pairs);

struct Confusion {
  size_t tp = 0;
  size_t fp = 0;
  size_t tn = 0;
  size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = false;  // tp + fp > 0
  bool recall_defined = false;     // tp + fn > 0

  size_t total() const { return tp + fp + tn + fn; }
  double F1() const;
};

// A pair is predicted positive when score >= threshold. Undefined precision
// or recall is reported as 0 with the matching flag cleared.
Confusion ConfusionAt(std::span<const double> scores, std::span<const int> labels,
                      double threshold);

// Area under the precision-recall curve. Thresholds are the distinct scores
// in descending order; each yields the point (recall, precision) for
// "score >= threshold". The curve is extended horizontally from the first
// point to recall 0 and integrated with the trapezoidal rule between
// consecutive points, without interpolation of precision. Throws Error
// ("AUC undefined") unless both classes are present.
double PrAuc(std::span<const double> scores, std::span<const int> labels);

// Mann-Whitney U / (n_pos * n_neg) with tied scores counted as one half.
double RocAuc(std::span<const double> scores, std::span<const int> labels);

struct FixedThreshold {
  double value = 0.5;
};
struct MaxF1 {};
using ThresholdPolicy = std::variant<FixedThreshold, MaxF1>;

std::string PolicyName(const ThresholdPolicy& policy);

// MaxF1 sweeps the distinct scores and returns the one with the highest F1;
// ties go to the lowest score.
double SelectThreshold(std::span<const double> scores, std::span<const int> labels,
                       const ThresholdPolicy& policy);

struct EvalReport {
  std::string model;
  std::string threshold_policy;
  double threshold = 0.5;
  double precision = 0.0;
  double recall = 0.0;
  double pr_auc = 0.0;
  double roc_auc = 0.0;
  size_t tp = 0, fp = 0, tn = 0, fn = 0;
  bool precision_defined = true;
  uint64_t seed = 0;
  std::string config_hash;

  // Throws Error if the counts and rates disagree.
  void CheckConsistency() const;
  nlohmann::json ToJson() const;
};

// Threshold from (val_scores, val_labels) under `policy`, applied to the
// test scores.
EvalReport Evaluate(const std::string& model, std::span<const double> test_scores,
                    std::span<const int> test_labels, std::span<const double> val_scores,
                    std::span<const int> val_labels, const ThresholdPolicy& policy);

// Aligned-column table with one row per report.
std::string FormatReports(const std::vector<EvalReport>& reports);

}  // namespace hcf::eval
