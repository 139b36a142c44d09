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


#include "hcf/harness.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "hcf/rng.h"
#include "hcf/synth.h"
#include "hcf/embedding.h"
#include "hcf/util.h"

namespace hcf::harness {
namespace {

InteractionMatrix Union(const InteractionMatrix& a, const InteractionMatrix& b) {
  std::vector<Interaction> entries = a.entries();
  entries.insert(entries.end(), b.entries().begin(), b.entries().end());
  return a.WithEntries(std::move(entries));
}

std::string Fixed(double value, int digits) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

std::string Pad(const std::string& text, size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

}  // namespace

textembed::ProviderKind EmbedProvider(const RunConfig& cfg) {
  if (cfg.embed.provider == "external") return textembed::ExternalFile{cfg.embed.path};
  return textembed::HashedBagOfWords{cfg.embed.dim, DeriveSeed(cfg.seed, "embed")};
}

std::string DisplayName(const std::string& model) {
  if (model == "bpdm") return "BPDM";
  if (model == "memcf") return "Mem.CF";
  if (model == "stage1") return "Independent Stage 1";
  if (model == "stage2") return "Independent Stage 2";
  if (model == "hcf") return "HCF";
  throw Error("unknown model '" + model + "'");
}

Dataset SynthDataset(const RunConfig& cfg) {
  const RunConfig seeded = cfg.Seeded();
  auto data = synth::Generate(seeded.synth);
  Dataset out;
  out.matrix = ingest::FilterItems(data.interactions, seeded.filter).matrix;
  out.corpus = std::move(data.corpus);
  out.item_corpus = std::move(data.item_corpus);
  return out;
}

std::shared_ptr<const Prepared> Prepare(const Dataset& data, const RunConfig& cfg,
                                        bool use_item_text, const EmbeddingSet* stage1) {
  auto prepared = std::make_shared<Prepared>();
  prepared->cfg = cfg;
  prepared->full = data.matrix;
  prepared->split = SplitInteractions(data.matrix, cfg.split);

  if (stage1 != nullptr) {
    prepared->stage1 = *stage1;
  } else {
    auto aligned = ingest::AlignCorpus(data.corpus, data.matrix.entity_ids());
    prepared->coverage = aligned.coverage;
    prepared->stage1 = textembed::EmbedCorpus(aligned.records, EmbedProvider(cfg)).embeddings;
  }
  if (use_item_text) {
    auto items = ingest::AlignCorpus(data.item_corpus, data.matrix.item_ids());
    textembed::HashedBagOfWords hashed{cfg.embed.dim, DeriveSeed(cfg.seed, "embed")};
    prepared->item_stage1 = textembed::EmbedCorpus(items.records, hashed).embeddings;
  }

  const auto& split = prepared->split;
  const size_t ratio = cfg.eval.neg_ratio;
  if (cfg.eval.full_cross_product) {
    prepared->val_pairs = eval::BuildFullEvalPairs(split.val, Union(split.train, split.test));
    prepared->test_pairs = eval::BuildFullEvalPairs(split.test, Union(split.train, split.val));
  } else {
    prepared->val_pairs = eval::BuildEvalPairs(split.val, data.matrix, ratio, DeriveSeed(cfg.seed, "eval_val"));
    prepared->test_pairs = eval::BuildEvalPairs(split.test, data.matrix, ratio, DeriveSeed(cfg.seed, "eval_test"));
  }
  return prepared;
}

double FittedModel::Score(uint32_t entity, uint32_t item) const {
  eval::LabeledPair pair{entity, item, 0};
  return Score(std::span<const eval::LabeledPair>(&pair, 1))[0];
}

std::vector<double> FittedModel::Score(std::span<const eval::LabeledPair> pairs) const {
  std::vector<double> scores;
  scores.reserve(pairs.size());
  if (dcf) {
    std::vector<std::pair<uint32_t, uint32_t>> raw;
    raw.reserve(pairs.size());
    for (const auto& p : pairs) raw.emplace_back(p.entity, p.item);
    return dcf::ScorePairs(*dcf, raw);
  }
  for (const auto& p : pairs) {
    scores.push_back(bpdm ? bpdm->Score(p.entity, p.item) : memcf->Score(p.entity, p.item));
  }
  return scores;
}

FittedModel Fit(const std::string& kind, std::shared_ptr<const Prepared> prepared) {
  const auto& cfg = prepared->cfg;
  const auto& split = prepared->split;
  FittedModel fitted;
  fitted.kind = kind;
  fitted.prepared = prepared;
  if (kind == "bpdm") {
    fitted.bpdm = baselines::BpdmFit(split.train, cfg.bpdm);
  } else if (kind == "memcf") {
    fitted.memcf = std::make_shared<baselines::MemCfModel>(split.train, cfg.memcf);
  } else if (kind == "stage1") {
    fitted.bpdm = baselines::Stage1OnlyFit(prepared->stage1, split.train, cfg.bpdm);
  } else if (kind == "stage2" || kind == "hcf") {
    const EmbeddingSet* stage1 = kind == "hcf" ? &prepared->stage1 : nullptr;
    const EmbeddingSet* items =
        kind == "hcf" && prepared->item_stage1 ? &*prepared->item_stage1 : nullptr;
    auto model = dcf::InitModel(cfg.hcf, prepared->full.shared_entity_ids(),
                                prepared->full.shared_item_ids(), stage1, items);
    auto result = dcf::Train(std::move(model), split.train, split.val, prepared->full);
    if (result.aborted) throw NonFiniteError(kind + " training aborted: " + *result.aborted);
    fitted.dcf = std::move(result.model);
    fitted.history = std::move(result.history);
  } else {
    throw Error("unknown model '" + kind + "'");
  }
  return fitted;
}

eval::EvalReport EvaluateFitted(const FittedModel& model) {
  const auto& prepared = *model.prepared;
  const auto test_scores = model.Score(prepared.test_pairs);
  const auto val_scores = model.Score(prepared.val_pairs);
  const auto test_labels = eval::Labels(prepared.test_pairs);
  const auto val_labels = eval::Labels(prepared.val_pairs);
  auto report = eval::Evaluate(DisplayName(model.kind), test_scores, test_labels, val_scores,
                               val_labels, prepared.cfg.eval.Policy());
  report.seed = prepared.cfg.seed;
  report.config_hash = prepared.cfg.Hash();
  return report;
}

nlohmann::json ComparisonResult::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : reports) rows.push_back(r.ToJson());
  return rows;
}

std::string ComparisonResult::Table() const { return eval::FormatReports(reports); }

ComparisonResult RunComparison(const Dataset& data, const std::vector<std::string>& models,
                               const RunConfig& cfg) {
  const auto prepared = Prepare(data, cfg.Seeded());
  ComparisonResult result;
  for (const auto& kind : models) {
    auto fitted = Fit(kind, prepared);
    result.reports.push_back(EvaluateFitted(fitted));
    result.models.push_back(std::move(fitted));
  }
  return result;
}

nlohmann::json AblationResult::ToJson() const {
  nlohmann::json cell_json = nlohmann::json::array();
  for (const auto& c : cells) {
    auto report = c.report.ToJson();
    cell_json.push_back({{"variant", c.variant},
                         {"cap", c.cap},
                         {"items", c.items},
                         {"model", c.model},
                         {"seed", c.seed},
                         {"report", report}});
  }
  nlohmann::json row_json = nlohmann::json::array();
  for (const auto& r : rows) {
    row_json.push_back({{"variant", r.variant},
                        {"cap", r.cap},
                        {"model", DisplayName(r.model)},
                        {"precision", r.precision},
                        {"recall", r.recall},
                        {"pr_auc", r.pr_auc},
                        {"roc_auc", r.roc_auc}});
  }
  return Round6(nlohmann::json{{"cells", cell_json}, {"rows", row_json}, {"warnings", warnings}});
}

std::string AblationResult::Table() const {
  std::ostringstream out;
  auto header = [&](const char* a, const char* b) {
    out << Pad("features", 14) << Pad("items", 8) << Pad("model", 22) << Pad(a, 11) << b << "\n";
  };
  header("precision", "recall");
  for (const auto& r : rows) {
    out << Pad(r.variant, 14) << Pad(std::to_string(r.cap), 8) << Pad(DisplayName(r.model), 22)
        << Pad(Fixed(r.precision, 4), 11) << Fixed(r.recall, 4) << "\n";
  }
  out << "\n";
  header("pr_auc", "roc_auc");
  for (const auto& r : rows) {
    out << Pad(r.variant, 14) << Pad(std::to_string(r.cap), 8) << Pad(DisplayName(r.model), 22)
        << Pad(Fixed(r.pr_auc, 4), 11) << Fixed(r.roc_auc, 4) << "\n";
  }
  return out.str();
}

AblationResult RunAblation(const Dataset& data, const RunConfig& cfg, size_t jobs) {
  cfg.Validate();
  const auto& spec = cfg.ablation;
  AblationResult result;
  const size_t available = data.matrix.num_items();
  std::vector<InteractionMatrix> capped;
  for (size_t cap : spec.caps) {
    if (cap > available) {
      result.warnings.push_back("cap " + std::to_string(cap) + " exceeds the " +
                                std::to_string(available) + " available items; using all");
    }
    capped.push_back(ingest::CapItems(data.matrix, cap));
  }

  for (const auto& variant : spec.variants) {
    for (size_t c = 0; c < spec.caps.size(); ++c) {
      for (const auto& model : spec.models) {
        for (uint64_t seed : spec.seeds) {
          result.cells.push_back({variant, spec.caps[c], capped[c].num_items(), model, seed, {}});
        }
      }
    }
  }

  // Cells sharing (variant, cap, seed) share one Prepared.
  std::mutex mutex;
  std::map<std::tuple<std::string, size_t, uint64_t>, std::shared_ptr<const Prepared>> cache;
  auto prepared_for = [&](const AblationCell& cell, size_t cap_index) {
    const auto key = std::make_tuple(cell.variant, cell.cap, cell.seed);
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    Dataset subset{capped[cap_index], data.corpus, data.item_corpus};
    auto prepared = Prepare(subset, cfg.WithSeed(cell.seed).Seeded(), cell.variant == "CC+TechDesc");
    std::lock_guard lock(mutex);
    return cache.emplace(key, prepared).first->second;
  };

  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(result.cells.size());
  auto worker = [&]() {
    for (size_t k = next++; k < result.cells.size(); k = next++) {
      auto& cell = result.cells[k];
      try {
        const size_t cap_index = static_cast<size_t>(
            std::find(spec.caps.begin(), spec.caps.end(), cell.cap) - spec.caps.begin());
        cell.report = EvaluateFitted(Fit(cell.model, prepared_for(cell, cap_index)));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const size_t threads = std::max<size_t>(1, std::min(jobs, result.cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  const size_t per_row = spec.seeds.size();
  for (size_t begin = 0; begin < result.cells.size(); begin += per_row) {
    const auto& first = result.cells[begin];
    AblationRow row{first.variant, first.cap, first.model};
    for (size_t k = begin; k < begin + per_row; ++k) {
      const auto& r = result.cells[k].report;
      row.precision += r.precision / static_cast<double>(per_row);
      row.recall += r.recall / static_cast<double>(per_row);
      row.pr_auc += r.pr_auc / static_cast<double>(per_row);
      row.roc_auc += r.roc_auc / static_cast<double>(per_row);
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace hcf::harness
