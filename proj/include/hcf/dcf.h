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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "hcf/core.h"
#include "hcf/embedding.h"
#include "hcf/rng.h"

// Deep collaborative filtering model used for the fine-tuning stage.
//
// For an (entity u, item i) pair:
//
//   z_0 = [E_c[u], E_i[i]]
//   z_k = dropout_k(ReLU(z_{k-1} W_k + b_k))       k = 1..L
//   raw = z_L . w_out + b_out + E_c[u] . E_i[i]
//   p   = sigmoid(raw)
//
// so a model whose MLP parameters are all zero scores exactly
// sigmoid(E_c[u] . E_i[i]). Training minimizes, per batch B,
//
//   mean_b Huber_delta(y_b - p_b) + lambda * mean_b (|E_c[u_b]|^2 + |E_i[i_b]|^2)
//
// with Adam, updating only the embedding rows a batch touches.
namespace hcf::dcf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct HcfConfig {
  size_t dim = 64;
  std::vector<size_t> hidden{512, 256, 128, 70, 30};
  std::vector<double> dropout{0.3, 0.3, 0.2, 0.2};  // after hidden layers 1..size()
  double delta = 1.0;
  double lambda = 1e-4;
  double lr = 0.018;
  size_t batch_size = 1024;
  size_t epochs = 30;
  size_t neg_ratio = 4;
  size_t patience = 5;
  double init_stddev = 0.01;
  // "fixed": MLP weights ~ N(0, init_stddev^2). "he": hidden weights ~
  // N(0, 2 / fan_in), output weights ~ N(0, 1 / fan_in).
  std::string mlp_init = "he";
  // Start the output bias at the training prior, logit(1 / (1 + neg_ratio)),
  // instead of 0.
  bool prior_bias = true;
  bool allow_projection = true;  // random projection when stage-1 dim != dim
  // Stage-1 rows are mean-centered, then rescaled to this norm (0 keeps the
  // norm). Both apply only to rows that came from stage 1.
  bool stage1_center = true;
  double stage1_scale = 0.3;
  uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys throw.
  static HcfConfig FromJson(const nlohmann::json& json);
};

struct DenseLayer {
  Matrix weight;  // fan_in x fan_out
  Vector bias;
};

struct AdamState {
  uint64_t step = 0;
  RowMatrix entity_m, entity_v;
  RowMatrix item_m, item_v;
  std::vector<Matrix> weight_m, weight_v;
  std::vector<Vector> bias_m, bias_v;
  Vector out_weight_m, out_weight_v;
  double out_bias_m = 0.0, out_bias_v = 0.0;
};

struct HcfModel {
  HcfConfig config;
  std::shared_ptr<const IdMap> entity_ids;
  std::shared_ptr<const IdMap> item_ids;
  RowMatrix entity_emb;  // m x d
  RowMatrix item_emb;    // n x d
  std::vector<DenseLayer> layers;
  Vector out_weight;
  double out_bias = 0.0;
  AdamState adam;

  size_t num_entities() const { return static_cast<size_t>(entity_emb.rows()); }
  size_t num_items() const { return static_cast<size_t>(item_emb.rows()); }
  // Sets every MLP weight and bias (including the output head) to zero.
  void ZeroMlp();
  bool AllFinite() const;
};

struct Example {
  uint32_t entity;
  uint32_t item;
  double label;  // 0 or 1
};

// Dense matrix with entries N(0, 1 / dst_dim), fixed by `seed`.
Matrix RandomProjection(size_t src_dim, size_t dst_dim, uint64_t seed);

// Random init draws E_c and E_i from N(0, init_stddev^2), MLP weights per
// `mlp_init`, biases zero. With `stage1`, each entity row copies its stage-1
// vector (through RandomProjection when dims differ), then centering and
// scaling apply; all-zero stage-1 vectors fall back to the random draw.
// `item_stage1` does the same for item rows.
HcfModel InitModel(const HcfConfig& cfg, std::shared_ptr<const IdMap> entities,
                   std::shared_ptr<const IdMap> items, const EmbeddingSet* stage1 = nullptr,
                   const EmbeddingSet* item_stage1 = nullptr);

struct ForwardCache {
  Matrix input;              // B x 2d
  std::vector<Matrix> pre;   // per hidden layer, before ReLU
  std::vector<Matrix> act;   // per hidden layer, after ReLU and dropout
  std::vector<Matrix> mask;  // per hidden layer; empty when no dropout applied
  Vector dot;
  Vector raw;
  Vector prob;
};

// `dropout_rng` is required when train_mode is set and any rate is nonzero.
ForwardCache Forward(const HcfModel& model, std::span<const Example> batch, bool train_mode,
                     Rng* dropout_rng = nullptr);

double Sigmoid(double x);

// 0.5 r^2 when |r| <= delta, else delta (|r| - 0.5 delta), with r = y - p.
double HuberLoss(double y, double p, double delta);
// d/dp of HuberLoss: (p - y) clipped to [-delta, delta].
double HuberGrad(double y, double p, double delta);

double BatchLoss(const HcfModel& model, std::span<const Example> batch,
                 const ForwardCache& cache);
// Eval-mode forward followed by BatchLoss.
double BatchLoss(const HcfModel& model, std::span<const Example> batch);

struct SparseRows {
  std::vector<uint32_t> rows;  // ascending, unique
  RowMatrix values;            // rows.size() x d
};

struct Gradients {
  SparseRows entity;
  SparseRows item;
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
  Vector out_weight;
  double out_bias = 0.0;
};

Gradients Backward(const HcfModel& model, std::span<const Example> batch,
                   const ForwardCache& cache);

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of a single value at step t >= 1.
void AdamUpdate(double& param, double grad, double& m, double& v, double lr, uint64_t t,
                const AdamParams& adam = {});

// Advances model.adam.step and applies the update. Embedding rows absent from
// the gradients keep their values and moments. Throws NonFiniteError on a
// non-finite gradient, before any parameter changes.
void AdamStep(HcfModel& model, const Gradients& grads, double lr, const AdamParams& adam = {});

struct EpochRecord {
  size_t epoch = 0;
  double train_loss = 0.0;
  double val_pr_auc = 0.0;
};

struct TrainResult {
  HcfModel model;  // best-validation snapshot
  std::vector<EpochRecord> history;
  size_t best_epoch = 0;
  bool early_stopped = false;
  std::optional<std::string> aborted;  // set when training hit a non-finite loss
};

// Per epoch: shuffle the training positives, draw neg_ratio negatives per
// positive uniformly from pairs unobserved in `observed`, and run minibatch
// forward/backward/Adam. Validation PR-AUC (against a fixed negative sample)
// picks the returned snapshot and drives early stopping after `patience`
// epochs without improvement. With an empty `val` the last epoch is
// returned.
TrainResult Train(HcfModel model, const InteractionMatrix& train, const InteractionMatrix& val,
                  const InteractionMatrix& observed);

// Eval-mode probabilities for arbitrary pairs, computed in blocks.
std::vector<double> ScorePairs(const HcfModel& model,
                               std::span<const std::pair<uint32_t, uint32_t>> pairs);

// Eval-mode probabilities over entities x items (row per entity).
RowMatrix ScoreAll(const HcfModel& model, std::span<const uint32_t> entities,
                   std::span<const uint32_t> items);

void SaveCheckpoint(const HcfModel& model, const std::filesystem::path& path,
                    bool include_adam = false);
HcfModel LoadCheckpoint(const std::filesystem::path& path);

// Trained entity embeddings keyed by entity id.
EmbeddingSet ExportEntityEmbeddings(const HcfModel& model);

}  // namespace hcf::dcf
