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


#include "hcf/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "hcf/rng.h"
#include "hcf/util.h"

namespace hcf::eval {
namespace {

void CheckSizes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
}

// Indices ordered by descending score; equal scores keep input order.
std::vector<size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return order;
}

void CountClasses(std::span<const int> labels, size_t& positives, size_t& negatives) {
  positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error("labels must be 0 or 1");
    positives += static_cast<size_t>(y);
  }
  negatives = labels.size() - positives;
}

}  // namespace

std::vector<LabeledPair> BuildEvalPairs(const InteractionMatrix& test,
                                        const InteractionMatrix& full, size_t neg_ratio,
                                        uint64_t seed) {
  const size_t n = full.num_items();
  std::vector<LabeledPair> pairs;
  pairs.reserve(test.nnz() * (1 + neg_ratio));
  for (const auto& e : test.entries()) pairs.push_back({e.entity, e.item, 1});
  Rng rng(DeriveSeed(seed, "eval_negatives"));
  std::set<Interaction> drawn;
  for (const auto& e : test.entries()) {
    const size_t free_items = n - full.ItemsOf(e.entity).size();
    if (free_items == 0) continue;
    for (size_t k = 0; k < neg_ratio; ++k) {
      // Rejection sampling; gives up after a bounded number of collisions so
      // nearly saturated entities cannot stall.
      for (int attempt = 0; attempt < 64; ++attempt) {
        const auto item = static_cast<uint32_t>(rng.UniformIndex(n));
        if (full.Contains(e.entity, item)) continue;
        if (!drawn.insert({e.entity, item}).second) continue;
        pairs.push_back({e.entity, item, 0});
        break;
      }
    }
  }
  return pairs;
}

std::vector<LabeledPair> BuildFullEvalPairs(const InteractionMatrix& test,
                                            const InteractionMatrix& exclude) {
  std::vector<LabeledPair> pairs;
  std::vector<bool> has_test(test.num_entities(), false);
  for (const auto& e : test.entries()) has_test[e.entity] = true;
  for (uint32_t u = 0; u < test.num_entities(); ++u) {
    if (!has_test[u]) continue;
    for (uint32_t i = 0; i < test.num_items(); ++i) {
      if (exclude.Contains(u, i)) continue;
      pairs.push_back({u, i, test.Contains(u, i) ? 1 : 0});
    }
  }
  return pairs;
}

std::vector<int> Labels(std::span<const LabeledPair> pairs) {
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) labels.push_back(p.label);
  return labels;
}

double Confusion::F1() const {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Confusion ConfusionAt(std::span<const double> scores, std::span<const int> labels,
                      double threshold) {
  CheckSizes(scores, labels);
  Confusion c;
  for (size_t k = 0; k < scores.size(); ++k) {
    const bool predicted = scores[k] >= threshold;
    if (labels[k] == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  c.precision_defined = c.tp + c.fp > 0;
  c.recall_defined = c.tp + c.fn > 0;
  c.precision = c.precision_defined ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  c.recall = c.recall_defined ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  return c;
}

double PrAuc(std::span<const double> scores, std::span<const int> labels) {
  CheckSizes(scores, labels);
  size_t positives = 0, negatives = 0;
  CountClasses(labels, positives, negatives);
  if (positives == 0 || negatives == 0) throw Error("AUC undefined: labels have a single class");
  const auto order = DescendingOrder(scores);
  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = 0.0;
  bool first = true;
  size_t tp = 0, fp = 0;
  for (size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      labels[order[k]] == 1 ? ++tp : ++fp;
      ++k;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (first) {
      prev_precision = precision;
      first = false;
    }
    area += (recall - prev_recall) * (precision + prev_precision) * 0.5;
    prev_recall = recall;
    prev_precision = precision;
  }
  return area;
}

double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  CheckSizes(scores, labels);
  size_t positives = 0, negatives = 0;
  CountClasses(labels, positives, negatives);
  if (positives == 0 || negatives == 0) throw Error("AUC undefined: labels have a single class");
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Sum of midranks (1-based) of the positives.
  double rank_sum = 0.0;
  for (size_t k = 0; k < order.size();) {
    size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) ++end;
    const double midrank = 0.5 * static_cast<double>(k + 1 + end);
    for (size_t j = k; j < end; ++j) {
      if (labels[order[j]] == 1) rank_sum += midrank;
    }
    k = end;
  }
  const double p = static_cast<double>(positives);
  const double u = rank_sum - p * (p + 1.0) * 0.5;
  return u / (p * static_cast<double>(negatives));
}

std::string PolicyName(const ThresholdPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "fixed(%g)", fixed->value);
    return buffer;
  }
  return "max_f1_on_validation";
}

double SelectThreshold(std::span<const double> scores, std::span<const int> labels,
                       const ThresholdPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) return fixed->value;
  CheckSizes(scores, labels);
  if (scores.empty()) return 0.5;
  size_t positives = 0, negatives = 0;
  CountClasses(labels, positives, negatives);
  const auto order = DescendingOrder(scores);
  double best_threshold = scores[order.front()];
  double best_f1 = -1.0;
  size_t tp = 0, fp = 0;
  for (size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      labels[order[k]] == 1 ? ++tp : ++fp;
      ++k;
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = positives ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    // Descending sweep: ">=" moves ties onto the lower score.
    if (f1 >= best_f1) {
      best_f1 = f1;
      best_threshold = threshold;
    }
  }
  return best_threshold;
}

void EvalReport::CheckConsistency() const {
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  if (tp + fp > 0 && !near(precision, static_cast<double>(tp) / static_cast<double>(tp + fp))) {
    throw Error("report '" + model + "': precision disagrees with counts");
  }
  if (tp + fn > 0 && !near(recall, static_cast<double>(tp) / static_cast<double>(tp + fn))) {
    throw Error("report '" + model + "': recall disagrees with counts");
  }
  for (double v : {precision, recall, pr_auc, roc_auc}) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("report '" + model + "': rate outside [0, 1]");
  }
}

nlohmann::json EvalReport::ToJson() const {
  CheckConsistency();
  return Round6(nlohmann::json{
      {"model", model},
      {"precision", precision},
      {"recall", recall},
      {"pr_auc", pr_auc},
      {"roc_auc", roc_auc},
      {"threshold", threshold},
      {"threshold_policy", threshold_policy},
      {"precision_defined", precision_defined},
      {"counts", {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}}},
      {"seed", seed},
      {"config_hash", config_hash},
  });
}

EvalReport Evaluate(const std::string& model, std::span<const double> test_scores,
                    std::span<const int> test_labels, std::span<const double> val_scores,
                    std::span<const int> val_labels, const ThresholdPolicy& policy) {
  EvalReport report;
  report.model = model;
  report.threshold_policy = PolicyName(policy);
  report.threshold = SelectThreshold(val_scores, val_labels, policy);
  const Confusion c = ConfusionAt(test_scores, test_labels, report.threshold);
  report.precision = c.precision;
  report.recall = c.recall;
  report.precision_defined = c.precision_defined;
  report.tp = c.tp;
  report.fp = c.fp;
  report.tn = c.tn;
  report.fn = c.fn;
  report.pr_auc = PrAuc(test_scores, test_labels);
  report.roc_auc = RocAuc(test_scores, test_labels);
  report.CheckConsistency();
  return report;
}

std::string FormatReports(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-22s %10s %10s %10s %10s %10s\n", "model", "precision",
                "recall", "pr_auc", "roc_auc", "threshold");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-22s %10.4f %10.4f %10.4f %10.4f %10.4f%s\n",
                  r.model.c_str(), r.precision, r.recall, r.pr_auc, r.roc_auc, r.threshold,
                  r.precision_defined ? "" : "  (precision undefined)");
    out << line;
  }
  return out.str();
}

}  // namespace hcf::eval
