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

#include "hcf/archive.h"
#include "hcf/dcf.h"

namespace hcf::dcf {
namespace {

const char* kCheckpointKind = "hcf_model";

void FillNormal(Eigen::Ref<Matrix> m, Rng& rng, double stddev) {
  // Row-major fill order so the draw sequence does not depend on storage.
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.Normal(0.0, stddev);
  }
}

void FillNormal(RowMatrix& m, Rng& rng, double stddev) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.Normal(0.0, stddev);
  }
}

template <typename Derived>
bool Finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void PutTensor(TensorArchive& archive, const std::string& name,
               const Eigen::MatrixBase<Derived>& m) {
  const RowMatrix copy = m;
  archive.Put(name, static_cast<size_t>(copy.rows()), static_cast<size_t>(copy.cols()),
              {copy.data(), static_cast<size_t>(copy.size())});
}

RowMatrix GetTensor(const TensorArchive& archive, const std::string& name, Eigen::Index rows,
                    Eigen::Index cols) {
  const Tensor& t = archive.Get(name, static_cast<size_t>(rows), static_cast<size_t>(cols));
  return Eigen::Map<const RowMatrix>(t.data.data(), rows, cols);
}

// Scatter target for per-example embedding gradients.
class RowAccumulator {
 public:
  RowAccumulator(std::span<const Example> batch, bool entity_side, size_t dim) {
    for (const auto& ex : batch) rows_.push_back(entity_side ? ex.entity : ex.item);
    std::sort(rows_.begin(), rows_.end());
    rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
    values_ = RowMatrix::Zero(static_cast<Eigen::Index>(rows_.size()),
                              static_cast<Eigen::Index>(dim));
  }

  Eigen::Index Slot(uint32_t row) const {
    return std::lower_bound(rows_.begin(), rows_.end(), row) - rows_.begin();
  }

  RowMatrix& values() { return values_; }
  SparseRows Release() { return SparseRows{std::move(rows_), std::move(values_)}; }

 private:
  std::vector<uint32_t> rows_;
  RowMatrix values_;
};

void CheckFinite(const Eigen::Ref<const Matrix>& m, const std::string& what) {
  if (!m.allFinite()) throw NonFiniteError("non-finite gradient in " + what);
}

template <typename Param, typename Grad>
void AdamDense(Param& param, const Grad& grad, Param& m, Param& v, double lr, double bc1,
               double bc2, const AdamParams& adam) {
  m = adam.beta1 * m + (1.0 - adam.beta1) * grad;
  v = adam.beta2 * v + (1.0 - adam.beta2) * grad.cwiseProduct(grad);
  param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + adam.epsilon);
}

void AdamRows(RowMatrix& param, const SparseRows& grad, RowMatrix& m, RowMatrix& v, double lr,
              double bc1, double bc2, const AdamParams& adam) {
  for (size_t k = 0; k < grad.rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(grad.rows[k]);
    const auto g = grad.values.row(static_cast<Eigen::Index>(k));
    m.row(r) = adam.beta1 * m.row(r) + (1.0 - adam.beta1) * g;
    v.row(r) = adam.beta2 * v.row(r) + (1.0 - adam.beta2) * g.cwiseProduct(g);
    param.row(r).array() -=
        lr * (m.row(r).array() / bc1) / ((v.row(r).array() / bc2).sqrt() + adam.epsilon);
  }
}

size_t LastWidth(const HcfModel& model) {
  return model.layers.empty() ? 2 * model.config.dim
                              : static_cast<size_t>(model.layers.back().weight.cols());
}

// Copies (or projects) stage-1 rows into `out`, then optionally centers them
// and rescales each to `stage1_scale`. All-zero rows, and rows left at zero
// by centering, get the random draw instead.
void FillFromStage1(RowMatrix& out, const IdMap& ids, const EmbeddingSet& stage1,
                    const HcfConfig& cfg, uint64_t projection_seed, const char* what, Rng& rng) {
  const size_t src_dim = stage1.dim();
  std::optional<Matrix> projection;
  if (src_dim != cfg.dim) {
    if (!cfg.allow_projection) {
      throw Error("stage-1 dim " + std::to_string(src_dim) + " differs from model dim " +
                  std::to_string(cfg.dim) + " and projection is disabled");
    }
    projection = RandomProjection(src_dim, cfg.dim, projection_seed);
  }
  std::vector<bool> fallback(static_cast<size_t>(out.rows()), false);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const auto& id = ids.Id(static_cast<uint32_t>(r));
    auto row = stage1.Find(id);
    if (!row) throw Error(std::string("stage-1 embeddings have no vector for ") + what + " '" + id + "'");
    if (std::all_of(row->begin(), row->end(), [](double x) { return x == 0.0; })) {
      fallback[static_cast<size_t>(r)] = true;
      continue;
    }
    Eigen::Map<const Eigen::RowVectorXd> source(row->data(), static_cast<Eigen::Index>(src_dim));
    if (projection) {
      out.row(r) = source * *projection;
    } else {
      out.row(r) = source;
    }
  }
  if (cfg.stage1_center) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(out.cols());
    size_t count = 0;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      if (fallback[static_cast<size_t>(r)]) continue;
      mean += out.row(r);
      ++count;
    }
    if (count > 0) mean /= static_cast<double>(count);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      if (!fallback[static_cast<size_t>(r)]) out.row(r) -= mean;
    }
  }
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    bool use_random = fallback[static_cast<size_t>(r)];
    if (!use_random && cfg.stage1_scale > 0.0) {
      const double norm = out.row(r).norm();
      if (norm == 0.0) {
        use_random = true;
      } else {
        out.row(r) *= cfg.stage1_scale / norm;
      }
    }
    if (use_random) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = rng.Normal(0.0, cfg.init_stddev);
    }
  }
}

}  // namespace

void HcfConfig::Validate() const {
  if (dim == 0) throw Error("hcf.dim must be positive");
  for (size_t w : hidden) {
    if (w == 0) throw Error("hcf.hidden widths must be positive");
  }
  if (dropout.size() > hidden.size()) throw Error("hcf.dropout has more rates than hidden layers");
  for (double p : dropout) {
    if (!(p >= 0.0 && p < 1.0)) throw Error("hcf.dropout rates must lie in [0, 1)");
  }
  if (!(delta > 0.0)) throw Error("hcf.delta must be positive");
  if (!(lambda >= 0.0)) throw Error("hcf.lambda must be nonnegative");
  if (!(lr > 0.0)) throw Error("hcf.lr must be positive");
  if (batch_size == 0) throw Error("hcf.batch_size must be positive");
  if (epochs == 0) throw Error("hcf.epochs must be positive");
  if (neg_ratio == 0) throw Error("hcf.neg_ratio must be positive");
  if (!(init_stddev >= 0.0)) throw Error("hcf.init_stddev must be nonnegative");
  if (!(stage1_scale >= 0.0)) throw Error("hcf.stage1_scale must be nonnegative");
  if (mlp_init != "fixed" && mlp_init != "he") throw Error("hcf.mlp_init must be 'fixed' or 'he'");
}

nlohmann::json HcfConfig::ToJson() const {
  return {{"dim", dim},           {"hidden", hidden},     {"dropout", dropout},
          {"delta", delta},       {"lambda", lambda},     {"lr", lr},
          {"batch_size", batch_size}, {"epochs", epochs}, {"neg_ratio", neg_ratio},
          {"patience", patience}, {"init_stddev", init_stddev},
          {"mlp_init", mlp_init},     {"allow_projection", allow_projection},
          {"prior_bias", prior_bias}, {"stage1_center", stage1_center}, {"stage1_scale", stage1_scale}, {"seed", seed}};
}

HcfConfig HcfConfig::FromJson(const nlohmann::json& json) {
  HcfConfig cfg;
  const nlohmann::json defaults = cfg.ToJson();
  for (const auto& [key, value] : json.items()) {
    if (!defaults.contains(key)) throw Error("unknown hcf config key '" + key + "'");
  }
  auto read = [&](const char* key, auto& field) {
    if (json.contains(key)) field = json.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("dim", cfg.dim);
  read("hidden", cfg.hidden);
  read("dropout", cfg.dropout);
  read("delta", cfg.delta);
  read("lambda", cfg.lambda);
  read("lr", cfg.lr);
  read("batch_size", cfg.batch_size);
  read("epochs", cfg.epochs);
  read("neg_ratio", cfg.neg_ratio);
  read("patience", cfg.patience);
  read("init_stddev", cfg.init_stddev);
  read("mlp_init", cfg.mlp_init);
  read("allow_projection", cfg.allow_projection);
  read("prior_bias", cfg.prior_bias);
  read("stage1_center", cfg.stage1_center);
  read("stage1_scale", cfg.stage1_scale);
  read("seed", cfg.seed);
  cfg.Validate();
  return cfg;
}

void HcfModel::ZeroMlp() {
  for (auto& layer : layers) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  out_weight.setZero();
  out_bias = 0.0;
}

bool HcfModel::AllFinite() const {
  if (!Finite(entity_emb) || !Finite(item_emb) || !Finite(out_weight) || !std::isfinite(out_bias)) {
    return false;
  }
  return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
    return Finite(l.weight) && Finite(l.bias);
  });
}

Matrix RandomProjection(size_t src_dim, size_t dst_dim, uint64_t seed) {
  Matrix projection(static_cast<Eigen::Index>(src_dim), static_cast<Eigen::Index>(dst_dim));
  Rng rng(DeriveSeed(seed, "projection"));
  FillNormal(projection, rng, 1.0 / std::sqrt(static_cast<double>(dst_dim)));
  return projection;
}

HcfModel InitModel(const HcfConfig& cfg, std::shared_ptr<const IdMap> entities,
                   std::shared_ptr<const IdMap> items, const EmbeddingSet* stage1,
                   const EmbeddingSet* item_stage1) {
  cfg.Validate();
  if (!entities || !items) throw Error("InitModel needs id maps");
  HcfModel model;
  model.config = cfg;
  model.entity_ids = std::move(entities);
  model.item_ids = std::move(items);
  const auto m = static_cast<Eigen::Index>(model.entity_ids->size());
  const auto n = static_cast<Eigen::Index>(model.item_ids->size());
  const auto d = static_cast<Eigen::Index>(cfg.dim);

  Rng entity_rng(DeriveSeed(cfg.seed, "entity_init"));
  Rng item_rng(DeriveSeed(cfg.seed, "item_init"));
  Rng mlp_rng(DeriveSeed(cfg.seed, "mlp_init"));

  model.entity_emb = RowMatrix::Zero(m, d);
  if (stage1 == nullptr) {
    FillNormal(model.entity_emb, entity_rng, cfg.init_stddev);
  } else {
    FillFromStage1(model.entity_emb, *model.entity_ids, *stage1, cfg, cfg.seed, "entity",
                   entity_rng);
  }
  model.item_emb = RowMatrix::Zero(n, d);
  if (item_stage1 == nullptr) {
    FillNormal(model.item_emb, item_rng, cfg.init_stddev);
  } else {
    FillFromStage1(model.item_emb, *model.item_ids, *item_stage1, cfg,
                   DeriveSeed(cfg.seed, "item_projection"), "item", item_rng);
  }

  const bool he = cfg.mlp_init == "he";
  Eigen::Index fan_in = 2 * d;
  for (size_t width : cfg.hidden) {
    DenseLayer layer;
    layer.weight = Matrix::Zero(fan_in, static_cast<Eigen::Index>(width));
    FillNormal(layer.weight, mlp_rng,
               he ? std::sqrt(2.0 / static_cast<double>(fan_in)) : cfg.init_stddev);
    layer.bias = Vector::Zero(static_cast<Eigen::Index>(width));
    model.layers.push_back(std::move(layer));
    fan_in = static_cast<Eigen::Index>(width);
  }
  model.out_weight = Vector::Zero(fan_in);
  const double out_stddev = he ? std::sqrt(1.0 / static_cast<double>(fan_in)) : cfg.init_stddev;
  for (Eigen::Index k = 0; k < fan_in; ++k) model.out_weight(k) = mlp_rng.Normal(0.0, out_stddev);
  // logit(1 / (1 + r)) = -log(r)
  model.out_bias = cfg.prior_bias ? -std::log(static_cast<double>(cfg.neg_ratio)) : 0.0;

  auto& adam = model.adam;
  adam.entity_m = adam.entity_v = RowMatrix::Zero(m, d);
  adam.item_m = adam.item_v = RowMatrix::Zero(n, d);
  for (const auto& layer : model.layers) {
    adam.weight_m.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    adam.weight_v.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    adam.bias_m.push_back(Vector::Zero(layer.bias.size()));
    adam.bias_v.push_back(Vector::Zero(layer.bias.size()));
  }
  adam.out_weight_m = adam.out_weight_v = Vector::Zero(fan_in);
  return model;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double HuberLoss(double y, double p, double delta) {
  const double r = std::abs(y - p);
  if (r <= delta) return 0.5 * r * r;
  return delta * (r - 0.5 * delta);
}

double HuberGrad(double y, double p, double delta) {
  return std::clamp(p - y, -delta, delta);
}

ForwardCache Forward(const HcfModel& model, std::span<const Example> batch, bool train_mode,
                     Rng* dropout_rng) {
  const auto b_size = static_cast<Eigen::Index>(batch.size());
  const auto d = static_cast<Eigen::Index>(model.config.dim);
  const auto m = static_cast<uint32_t>(model.num_entities());
  const auto n = static_cast<uint32_t>(model.num_items());
  ForwardCache cache;
  cache.input.resize(b_size, 2 * d);
  cache.dot.resize(b_size);
  for (Eigen::Index b = 0; b < b_size; ++b) {
    const auto& ex = batch[static_cast<size_t>(b)];
    if (ex.entity >= m || ex.item >= n) throw Error("batch index out of range");
    const auto eu = model.entity_emb.row(ex.entity);
    const auto ei = model.item_emb.row(ex.item);
    cache.input.row(b).head(d) = eu;
    cache.input.row(b).tail(d) = ei;
    cache.dot(b) = eu.dot(ei);
  }

  const Matrix* prev = &cache.input;
  const auto& rates = model.config.dropout;
  cache.pre.resize(model.layers.size());
  cache.act.resize(model.layers.size());
  cache.mask.resize(model.layers.size());
  for (size_t k = 0; k < model.layers.size(); ++k) {
    const auto& layer = model.layers[k];
    cache.pre[k] = *prev * layer.weight;
    cache.pre[k].rowwise() += layer.bias.transpose();
    cache.act[k] = cache.pre[k].cwiseMax(0.0);
    const double rate = k < rates.size() ? rates[k] : 0.0;
    if (train_mode && rate > 0.0) {
      if (dropout_rng == nullptr) throw Error("train-mode forward needs a dropout rng");
      const double scale = 1.0 / (1.0 - rate);
      Matrix& mask = cache.mask[k];
      mask.resize(b_size, layer.weight.cols());
      for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) {
          mask(r, c) = dropout_rng->Uniform() < rate ? 0.0 : scale;
        }
      }
      cache.act[k] = cache.act[k].cwiseProduct(mask);
    }
    prev = &cache.act[k];
  }
  cache.raw = (*prev * model.out_weight).array() + model.out_bias;
  cache.raw += cache.dot;
  cache.prob = cache.raw.unaryExpr([](double x) { return Sigmoid(x); });
  return cache;
}

double BatchLoss(const HcfModel& model, std::span<const Example> batch,
                 const ForwardCache& cache) {
  if (batch.empty()) throw Error("batch_loss needs a nonempty batch");
  double huber = 0.0;
  double reg = 0.0;
  for (size_t b = 0; b < batch.size(); ++b) {
    const auto& ex = batch[b];
    huber += HuberLoss(ex.label, cache.prob(static_cast<Eigen::Index>(b)), model.config.delta);
    reg += model.entity_emb.row(ex.entity).squaredNorm() + model.item_emb.row(ex.item).squaredNorm();
  }
  const auto count = static_cast<double>(batch.size());
  return huber / count + model.config.lambda * reg / count;
}

double BatchLoss(const HcfModel& model, std::span<const Example> batch) {
  return BatchLoss(model, batch, Forward(model, batch, false));
}

Gradients Backward(const HcfModel& model, std::span<const Example> batch,
                   const ForwardCache& cache) {
  const auto b_size = static_cast<Eigen::Index>(batch.size());
  const auto d = static_cast<Eigen::Index>(model.config.dim);
  const double inv_b = 1.0 / static_cast<double>(b_size);
  const double delta = model.config.delta;

  // d loss / d raw, including the 1/B of the batch mean.
  Vector g_raw(b_size);
  for (Eigen::Index b = 0; b < b_size; ++b) {
    const double p = cache.prob(b);
    g_raw(b) = HuberGrad(batch[static_cast<size_t>(b)].label, p, delta) * p * (1.0 - p) * inv_b;
  }

  Gradients grads;
  const size_t depth = model.layers.size();
  grads.weight.resize(depth);
  grads.bias.resize(depth);
  const Matrix& last = depth ? cache.act.back() : cache.input;
  grads.out_weight = last.transpose() * g_raw;
  grads.out_bias = g_raw.sum();

  Matrix upstream = g_raw * model.out_weight.transpose();
  for (size_t k = depth; k-- > 0;) {
    if (cache.mask[k].size() != 0) upstream = upstream.cwiseProduct(cache.mask[k]);
    Matrix d_pre = upstream.cwiseProduct(
        cache.pre[k].unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; }));
    const Matrix& input = k ? cache.act[k - 1] : cache.input;
    grads.weight[k] = input.transpose() * d_pre;
    grads.bias[k] = d_pre.colwise().sum().transpose();
    upstream = d_pre * model.layers[k].weight.transpose();
  }
  // upstream is now d loss / d input (B x 2d).

  RowAccumulator entity_acc(batch, true, model.config.dim);
  RowAccumulator item_acc(batch, false, model.config.dim);
  const double reg_scale = 2.0 * model.config.lambda * inv_b;
  for (Eigen::Index b = 0; b < b_size; ++b) {
    const auto& ex = batch[static_cast<size_t>(b)];
    const auto eu = model.entity_emb.row(ex.entity);
    const auto ei = model.item_emb.row(ex.item);
    auto gu = entity_acc.values().row(entity_acc.Slot(ex.entity));
    auto gi = item_acc.values().row(item_acc.Slot(ex.item));
    gu += upstream.row(b).head(d) + g_raw(b) * ei + reg_scale * eu;
    gi += upstream.row(b).tail(d) + g_raw(b) * eu + reg_scale * ei;
  }
  grads.entity = entity_acc.Release();
  grads.item = item_acc.Release();
  return grads;
}

void AdamUpdate(double& param, double grad, double& m, double& v, double lr, uint64_t t,
                const AdamParams& adam) {
  if (t == 0) throw Error("Adam step count starts at 1");
  m = adam.beta1 * m + (1.0 - adam.beta1) * grad;
  v = adam.beta2 * v + (1.0 - adam.beta2) * grad * grad;
  const double m_hat = m / (1.0 - std::pow(adam.beta1, static_cast<double>(t)));
  const double v_hat = v / (1.0 - std::pow(adam.beta2, static_cast<double>(t)));
  param -= lr * m_hat / (std::sqrt(v_hat) + adam.epsilon);
}

void AdamStep(HcfModel& model, const Gradients& grads, double lr, const AdamParams& adam) {
  CheckFinite(grads.entity.values, "entity embeddings");
  CheckFinite(grads.item.values, "item embeddings");
  for (size_t k = 0; k < grads.weight.size(); ++k) {
    CheckFinite(grads.weight[k], "layer " + std::to_string(k + 1) + " weights");
    CheckFinite(grads.bias[k], "layer " + std::to_string(k + 1) + " bias");
  }
  CheckFinite(grads.out_weight, "output weights");
  if (!std::isfinite(grads.out_bias)) throw NonFiniteError("non-finite gradient in output bias");

  auto& state = model.adam;
  const uint64_t t = ++state.step;
  const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(t));
  AdamRows(model.entity_emb, grads.entity, state.entity_m, state.entity_v, lr, bc1, bc2, adam);
  AdamRows(model.item_emb, grads.item, state.item_m, state.item_v, lr, bc1, bc2, adam);
  for (size_t k = 0; k < model.layers.size(); ++k) {
    AdamDense(model.layers[k].weight, grads.weight[k], state.weight_m[k], state.weight_v[k], lr,
              bc1, bc2, adam);
    AdamDense(model.layers[k].bias, grads.bias[k], state.bias_m[k], state.bias_v[k], lr, bc1,
              bc2, adam);
  }
  AdamDense(model.out_weight, grads.out_weight, state.out_weight_m, state.out_weight_v, lr, bc1,
            bc2, adam);
  AdamUpdate(model.out_bias, grads.out_bias, state.out_bias_m, state.out_bias_v, lr, t, adam);
}

std::vector<double> ScorePairs(const HcfModel& model,
                               std::span<const std::pair<uint32_t, uint32_t>> pairs) {
  constexpr size_t kBlock = 4096;
  std::vector<double> scores;
  scores.reserve(pairs.size());
  std::vector<Example> block;
  for (size_t begin = 0; begin < pairs.size(); begin += kBlock) {
    const size_t end = std::min(pairs.size(), begin + kBlock);
    block.clear();
    for (size_t k = begin; k < end; ++k) block.push_back({pairs[k].first, pairs[k].second, 0.0});
    const auto cache = Forward(model, block, false);
    for (Eigen::Index b = 0; b < cache.prob.size(); ++b) scores.push_back(cache.prob(b));
  }
  return scores;
}

RowMatrix ScoreAll(const HcfModel& model, std::span<const uint32_t> entities,
                   std::span<const uint32_t> items) {
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  pairs.reserve(entities.size() * items.size());
  for (uint32_t u : entities) {
    for (uint32_t i : items) pairs.emplace_back(u, i);
  }
  const auto scores = ScorePairs(model, pairs);
  RowMatrix out(static_cast<Eigen::Index>(entities.size()), static_cast<Eigen::Index>(items.size()));
  std::copy(scores.begin(), scores.end(), out.data());
  return out;
}

void SaveCheckpoint(const HcfModel& model, const std::filesystem::path& path, bool include_adam) {
  TensorArchive archive(kCheckpointKind);
  archive.meta() = {{"config", model.config.ToJson()},
                    {"entity_ids", model.entity_ids->ids()},
                    {"item_ids", model.item_ids->ids()},
                    {"has_adam", include_adam},
                    {"adam_step", model.adam.step}};
  PutTensor(archive, "entity_emb", model.entity_emb);
  PutTensor(archive, "item_emb", model.item_emb);
  for (size_t k = 0; k < model.layers.size(); ++k) {
    const std::string prefix = "layer" + std::to_string(k + 1);
    PutTensor(archive, prefix + ".weight", model.layers[k].weight);
    PutTensor(archive, prefix + ".bias", model.layers[k].bias.transpose());
  }
  PutTensor(archive, "out.weight", model.out_weight.transpose());
  const double out_bias[1] = {model.out_bias};
  archive.Put("out.bias", 1, 1, out_bias);
  if (include_adam) {
    const auto& a = model.adam;
    PutTensor(archive, "adam.entity_m", a.entity_m);
    PutTensor(archive, "adam.entity_v", a.entity_v);
    PutTensor(archive, "adam.item_m", a.item_m);
    PutTensor(archive, "adam.item_v", a.item_v);
    for (size_t k = 0; k < model.layers.size(); ++k) {
      const std::string prefix = "adam.layer" + std::to_string(k + 1);
      PutTensor(archive, prefix + ".weight_m", a.weight_m[k]);
      PutTensor(archive, prefix + ".weight_v", a.weight_v[k]);
      PutTensor(archive, prefix + ".bias_m", a.bias_m[k].transpose());
      PutTensor(archive, prefix + ".bias_v", a.bias_v[k].transpose());
    }
    PutTensor(archive, "adam.out.weight_m", a.out_weight_m.transpose());
    PutTensor(archive, "adam.out.weight_v", a.out_weight_v.transpose());
    const double out_mv[2] = {a.out_bias_m, a.out_bias_v};
    archive.Put("adam.out.bias_mv", 1, 2, out_mv);
  }
  archive.Save(path);
}

HcfModel LoadCheckpoint(const std::filesystem::path& path) {
  const TensorArchive archive = TensorArchive::Load(path);
  if (archive.kind() != kCheckpointKind) {
    throw Error("'" + path.string() + "' holds a '" + archive.kind() + "' checkpoint, not an HCF model");
  }
  const auto& meta = archive.meta();
  const HcfConfig cfg = HcfConfig::FromJson(meta.at("config"));
  const auto entity_list = meta.at("entity_ids").get<std::vector<std::string>>();
  const auto item_list = meta.at("item_ids").get<std::vector<std::string>>();
  auto entities = std::make_shared<IdMap>(entity_list);
  auto items = std::make_shared<IdMap>(item_list);
  HcfModel model = InitModel(cfg, entities, items);
  const auto m = static_cast<Eigen::Index>(entity_list.size());
  const auto n = static_cast<Eigen::Index>(item_list.size());
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  model.entity_emb = GetTensor(archive, "entity_emb", m, d);
  model.item_emb = GetTensor(archive, "item_emb", n, d);
  for (size_t k = 0; k < model.layers.size(); ++k) {
    auto& layer = model.layers[k];
    const std::string prefix = "layer" + std::to_string(k + 1);
    layer.weight = GetTensor(archive, prefix + ".weight", layer.weight.rows(), layer.weight.cols());
    layer.bias = GetTensor(archive, prefix + ".bias", 1, layer.bias.size()).transpose();
  }
  const auto width = static_cast<Eigen::Index>(LastWidth(model));
  model.out_weight = GetTensor(archive, "out.weight", 1, width).transpose();
  model.out_bias = archive.Get("out.bias", 1, 1).data[0];
  model.adam.step = meta.at("adam_step").get<uint64_t>();
  if (meta.at("has_adam").get<bool>()) {
    auto& a = model.adam;
    a.entity_m = GetTensor(archive, "adam.entity_m", m, d);
    a.entity_v = GetTensor(archive, "adam.entity_v", m, d);
    a.item_m = GetTensor(archive, "adam.item_m", n, d);
    a.item_v = GetTensor(archive, "adam.item_v", n, d);
    for (size_t k = 0; k < model.layers.size(); ++k) {
      const std::string prefix = "adam.layer" + std::to_string(k + 1);
      const auto rows = model.layers[k].weight.rows();
      const auto cols = model.layers[k].weight.cols();
      a.weight_m[k] = GetTensor(archive, prefix + ".weight_m", rows, cols);
      a.weight_v[k] = GetTensor(archive, prefix + ".weight_v", rows, cols);
      a.bias_m[k] = GetTensor(archive, prefix + ".bias_m", 1, cols).transpose();
      a.bias_v[k] = GetTensor(archive, prefix + ".bias_v", 1, cols).transpose();
    }
    a.out_weight_m = GetTensor(archive, "adam.out.weight_m", 1, width).transpose();
    a.out_weight_v = GetTensor(archive, "adam.out.weight_v", 1, width).transpose();
    const auto& mv = archive.Get("adam.out.bias_mv", 1, 2).data;
    a.out_bias_m = mv[0];
    a.out_bias_v = mv[1];
  } else {
    model.adam.step = 0;
  }
  if (!model.AllFinite()) throw Error("checkpoint contains non-finite parameters");
  return model;
}

EmbeddingSet ExportEntityEmbeddings(const HcfModel& model) {
  EmbeddingSet set(model.config.dim);
  for (Eigen::Index u = 0; u < model.entity_emb.rows(); ++u) {
    const auto row = model.entity_emb.row(u);
    set.Add(model.entity_ids->Id(static_cast<uint32_t>(u)),
            std::span<const double>(row.data(), static_cast<size_t>(row.size())));
  }
  return set;
}

}  // namespace hcf::dcf
