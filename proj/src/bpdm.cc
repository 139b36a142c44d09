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


#include <cmath>

#include "hcf/archive.h"
#include "hcf/baselines.h"
#include "hcf/dcf.h"
#include "hcf/rng.h"

namespace hcf::baselines {
namespace {

const char* kCheckpointKind = "bpdm_model";

double Sigmoid(double x) { return dcf::Sigmoid(x); }

double LogSigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

bool AllFinite(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void FitTriples(BpdmModel& model, const InteractionMatrix& train, BpdmFitHistory* history) {
  const auto& p = model.params;
  const size_t k = p.factors;
  const size_t n = train.num_items();
  const auto& entries = train.entries();
  Rng rng(DeriveSeed(p.seed, "bpdm_triples"));
  double window_sum = 0.0;
  size_t window_count = 0;
  std::vector<double> entity_step(k);
  for (size_t epoch = 0; epoch < p.epochs; ++epoch) {
    for (size_t step = 0; step < entries.size(); ++step) {
      const auto& pos = entries[rng.UniformIndex(entries.size())];
      const uint32_t u = pos.entity;
      if (train.ItemsOf(u).size() >= n) continue;
      uint32_t neg = 0;
      do {
        neg = static_cast<uint32_t>(rng.UniformIndex(n));
      } while (train.Contains(u, neg));
      const double x = model.Raw(u, pos.item) - model.Raw(u, neg);
      const double g = Sigmoid(-x);
      double* pu = model.entity_factors.data() + u * k;
      double* qi = model.item_factors.data() + pos.item * k;
      double* qj = model.item_factors.data() + neg * k;
      for (size_t f = 0; f < k; ++f) {
        entity_step[f] = g * (qi[f] - qj[f]) - p.reg * pu[f];
        const double pf = pu[f];
        qi[f] += p.lr * (g * pf - p.reg * qi[f]);
        qj[f] += p.lr * (-g * pf - p.reg * qj[f]);
      }
      if (!model.frozen_entities) {
        for (size_t f = 0; f < k; ++f) pu[f] += p.lr * entity_step[f];
      }
      model.item_bias[pos.item] += p.lr * (g - p.reg * model.item_bias[pos.item]);
      model.item_bias[neg] += p.lr * (-g - p.reg * model.item_bias[neg]);

      if (history != nullptr) {
        window_sum += LogSigmoid(x);
        if (++window_count == 100) {
          history->window_objective.push_back(window_sum / 100.0);
          window_sum = 0.0;
          window_count = 0;
        }
      }
    }
    if (!AllFinite(model.entity_factors) || !AllFinite(model.item_factors) ||
        !AllFinite(model.item_bias)) {
      throw NonFiniteError("bpdm parameters became non-finite in epoch " + std::to_string(epoch));
    }
  }
}

BpdmModel Initialized(const InteractionMatrix& train, const BpdmParams& params) {
  if (train.empty()) throw Error("bpdm needs a nonempty training matrix");
  if (params.factors == 0) throw Error("bpdm.factors must be positive");
  BpdmModel model;
  model.params = params;
  model.num_entities = train.num_entities();
  model.num_items = train.num_items();
  Rng rng(DeriveSeed(params.seed, "bpdm_init"));
  model.entity_factors.resize(model.num_entities * params.factors);
  for (double& v : model.entity_factors) v = rng.Normal(0.0, params.init_stddev);
  model.item_factors.resize(model.num_items * params.factors);
  for (double& v : model.item_factors) v = rng.Normal(0.0, params.init_stddev);
  model.item_bias.assign(model.num_items, 0.0);
  return model;
}

}  // namespace

nlohmann::json BpdmParams::ToJson() const {
  return {{"factors", factors}, {"lr", lr},     {"reg", reg},
          {"epochs", epochs},   {"init_stddev", init_stddev}, {"seed", seed}};
}

BpdmParams BpdmParams::FromJson(const nlohmann::json& json) {
  BpdmParams params;
  const auto defaults = params.ToJson();
  for (const auto& [key, value] : json.items()) {
    if (!defaults.contains(key)) throw Error("unknown bpdm config key '" + key + "'");
  }
  auto read = [&](const char* key, auto& field) {
    if (json.contains(key)) field = json.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("factors", params.factors);
  read("lr", params.lr);
  read("reg", params.reg);
  read("epochs", params.epochs);
  read("init_stddev", params.init_stddev);
  read("seed", params.seed);
  return params;
}

double BpdmModel::Raw(uint32_t entity, uint32_t item) const {
  const size_t k = params.factors;
  const double* pu = entity_factors.data() + entity * k;
  const double* qi = item_factors.data() + item * k;
  double x = item_bias[item];
  for (size_t f = 0; f < k; ++f) x += pu[f] * qi[f];
  return x;
}

double BpdmModel::Score(uint32_t entity, uint32_t item) const { return Sigmoid(Raw(entity, item)); }

BpdmModel BpdmFit(const InteractionMatrix& train, const BpdmParams& params,
                  BpdmFitHistory* history) {
  BpdmModel model = Initialized(train, params);
  FitTriples(model, train, history);
  return model;
}

BpdmModel Stage1OnlyFit(const EmbeddingSet& stage1, const InteractionMatrix& train,
                        const BpdmParams& params, BpdmFitHistory* history) {
  BpdmModel model = Initialized(train, params);
  model.frozen_entities = true;
  const size_t k = params.factors;
  const size_t d = stage1.dim();
  std::optional<dcf::Matrix> projection;
  if (k != d) projection = dcf::RandomProjection(d, k, params.seed);
  for (uint32_t u = 0; u < model.num_entities; ++u) {
    const auto& id = train.entity_ids().Id(u);
    auto row = stage1.Find(id);
    if (!row) throw Error("stage-1 embeddings have no vector for entity '" + id + "'");
    double* pu = model.entity_factors.data() + u * k;
    if (!projection) {
      std::copy(row->begin(), row->end(), pu);
      continue;
    }
    for (size_t f = 0; f < k; ++f) {
      double acc = 0.0;
      for (size_t c = 0; c < d; ++c) acc += (*row)[c] * (*projection)(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(f));
      pu[f] = acc;
    }
  }
  FitTriples(model, train, history);
  return model;
}

void SaveBpdm(const BpdmModel& model, const std::filesystem::path& path) {
  TensorArchive archive(kCheckpointKind);
  archive.meta() = {{"params", model.params.ToJson()},
                    {"frozen_entities", model.frozen_entities},
                    {"num_entities", model.num_entities},
                    {"num_items", model.num_items}};
  archive.Put("entity_factors", model.num_entities, model.params.factors, model.entity_factors);
  archive.Put("item_factors", model.num_items, model.params.factors, model.item_factors);
  archive.Put("item_bias", 1, model.num_items, model.item_bias);
  archive.Save(path);
}

BpdmModel LoadBpdm(const std::filesystem::path& path) {
  const TensorArchive archive = TensorArchive::Load(path);
  if (archive.kind() != kCheckpointKind) throw Error("'" + path.string() + "' is not a BPDM checkpoint");
  BpdmModel model;
  model.params = BpdmParams::FromJson(archive.meta().at("params"));
  model.frozen_entities = archive.meta().at("frozen_entities").get<bool>();
  model.num_entities = archive.meta().at("num_entities").get<size_t>();
  model.num_items = archive.meta().at("num_items").get<size_t>();
  const size_t k = model.params.factors;
  model.entity_factors = archive.Get("entity_factors", model.num_entities, k).data;
  model.item_factors = archive.Get("item_factors", model.num_items, k).data;
  model.item_bias = archive.Get("item_bias", 1, model.num_items).data;
  return model;
}

}  // namespace hcf::baselines
