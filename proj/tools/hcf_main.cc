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


// Command-line driver for the HCF pipeline.
//
// Every command works inside a run directory (--out, default out/run):
//
//   data/         synth and filter outputs, stage-1 embeddings
//   reports/      JSON and text reports
//   checkpoints/  trained models
//   graphs/       community graph exports
//   manifest.json per-command inputs, outputs, config and timings
//
// Commands read the previous stage's outputs from the run directory unless
// an explicit path is given.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hcf/baselines.h"
#include "hcf/community.h"
#include "hcf/config.h"
#include "hcf/core.h"
#include "hcf/dcf.h"
#include "hcf/embedding.h"
#include "hcf/harness.h"
#include "hcf/ingest.h"
#include "hcf/synth.h"
#include "hcf/util.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

// Exit codes.
constexpr int kGenericError = 1;
constexpr int kNotFound = 2;
constexpr int kParseFailure = 3;
constexpr int kNonFinite = 4;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  std::string out = "out/run";
  size_t jobs = 1;
};

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hcf::NotFoundError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hcf::Error("cannot write '" + path.string() + "'");
  out << text;
}

void WriteJson(const fs::path& path, const json& value) {
  WriteText(path, hcf::Round6(value).dump(2) + "\n");
}

fs::path Require(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw hcf::NotFoundError(what + " not found: '" + path.string() + "'");
  return path;
}

hcf::RunConfig ResolveConfig(const Common& common) {
  json doc = json::object();
  if (!common.config_path.empty()) {
    doc = hcf::RunConfig::Load(Require(common.config_path, "config")).ToJson();
  }
  if (!common.overrides.empty()) {
    doc = hcf::RunConfig::FromJson(doc).ToJson();
    for (const auto& assignment : common.overrides) hcf::ApplyOverride(doc, assignment);
  }
  auto cfg = hcf::RunConfig::FromJson(doc);
  if (common.seed) cfg.seed = *common.seed;
  cfg.Validate();
  return cfg;
}

// Records one command in manifest.json. Hashes cover file contents, so
// identical invocations give identical hashes; only timings differ.
class Manifest {
 public:
  Manifest(fs::path run_dir, std::string command, const hcf::RunConfig& cfg)
      : run_dir_(std::move(run_dir)), command_(std::move(command)), cfg_(cfg),
        start_(std::chrono::steady_clock::now()) {}

  void Input(const fs::path& path) { inputs_[path.string()] = hcf::HashHex(ReadFile(path)); }
  void Output(const fs::path& path) { outputs_[path.string()] = hcf::HashHex(ReadFile(path)); }

  void Commit() {
    const fs::path path = run_dir_ / "manifest.json";
    json doc = json::object();
    if (fs::exists(path)) doc = json::parse(ReadFile(path));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc["version"] = kVersion;
    doc["commands"][command_] = {{"inputs", inputs_},
                                 {"outputs", outputs_},
                                 {"config", cfg_.ToJson()},
                                 {"config_hash", cfg_.Hash()},
                                 {"seconds", seconds}};
    WriteJson(path, doc);
  }

 private:
  fs::path run_dir_;
  std::string command_;
  hcf::RunConfig cfg_;
  std::chrono::steady_clock::time_point start_;
  json inputs_ = json::object();
  json outputs_ = json::object();
};

std::vector<std::string> ParseModels(const std::string& list) {
  if (list == "all") return hcf::harness::kAllModels;
  std::vector<std::string> models;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    (void)hcf::harness::DisplayName(item);  // validates
    models.push_back(item);
  }
  if (models.empty()) throw hcf::Error("no models requested");
  return models;
}

fs::path CheckpointPath(const fs::path& run, const std::string& model) {
  return run / "checkpoints" / (model + ".ckpt");
}

struct Paths {
  std::string interactions;
  std::string corpus;
  std::string items;
  std::string embeddings;
};

// Loads the filtered interactions, entity corpus and (if present) item corpus.
hcf::harness::Dataset LoadDataset(const fs::path& run, const Paths& paths, Manifest& manifest,
                                  bool need_corpus) {
  hcf::harness::Dataset data;
  const fs::path interactions = paths.interactions.empty() ? run / "data" / "filtered.csv" : fs::path(paths.interactions);
  manifest.Input(Require(interactions, "interactions"));
  data.matrix = hcf::ingest::LoadInteractions(interactions).matrix;
  if (need_corpus) {
    const fs::path corpus = paths.corpus.empty() ? run / "data" / "corpus.jsonl" : fs::path(paths.corpus);
    manifest.Input(Require(corpus, "corpus"));
    data.corpus = hcf::ingest::LoadCorpus(corpus);
    const fs::path items = paths.items.empty() ? run / "data" / "items.jsonl" : fs::path(paths.items);
    if (fs::exists(items)) {
      manifest.Input(items);
      data.item_corpus = hcf::ingest::LoadCorpus(items);
    }
  }
  return data;
}

hcf::EmbeddingSet LoadStage1(const fs::path& run, const Paths& paths, Manifest& manifest) {
  const fs::path path = paths.embeddings.empty() ? run / "data" / "stage1.hcfe" : fs::path(paths.embeddings);
  manifest.Input(Require(path, "stage-1 embeddings"));
  return hcf::LoadEmbeddingFile(path);
}

int RunSynth(const Common& common) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "synth", cfg);
  const auto data = hcf::synth::Generate(cfg.Seeded().synth);
  const auto paths = hcf::synth::WriteSynth(data, run / "data");
  for (const auto& p : {paths.interactions, paths.corpus, paths.item_corpus, paths.truth}) {
    manifest.Output(p);
  }
  const json summary = {{"entities", data.interactions.num_entities()},
                        {"items", data.interactions.num_items()},
                        {"interactions", data.interactions.nnz()},
                        {"expected_density", hcf::synth::ExpectedDensity(cfg.Seeded().synth, data.truth)}};
  WriteJson(run / "reports" / "synth.json", summary);
  manifest.Output(run / "reports" / "synth.json");
  manifest.Commit();
  std::cout << hcf::Round6(summary).dump() << "\n";
  return 0;
}

int RunFilter(const Common& common, const Paths& paths) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "filter", cfg);
  const fs::path input = paths.interactions.empty() ? run / "data" / "interactions.csv" : fs::path(paths.interactions);
  manifest.Input(Require(input, "interactions"));
  const auto loaded = hcf::ingest::LoadInteractions(input);
  const auto result = hcf::ingest::FilterItems(loaded.matrix, cfg.filter);
  const fs::path output = run / "data" / "filtered.csv";
  fs::create_directories(output.parent_path());
  hcf::ingest::WriteInteractions(result.matrix, output);
  json report = result.report.ToJson();
  report["duplicates"] = loaded.duplicates;
  WriteJson(run / "reports" / "filter.json", report);
  manifest.Output(output);
  manifest.Output(run / "reports" / "filter.json");
  manifest.Commit();
  std::cout << "kept " << result.report.kept.size() << " items, dropped "
            << result.report.dropped.size() << "\n";
  return 0;
}

int RunEmbed(const Common& common, const Paths& paths) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "embed", cfg);
  auto data = LoadDataset(run, paths, manifest, true);
  const auto seeded = cfg.Seeded();
  const auto aligned = hcf::ingest::AlignCorpus(data.corpus, data.matrix.entity_ids());
  const auto result = hcf::textembed::EmbedCorpus(aligned.records, hcf::harness::EmbedProvider(seeded));
  const fs::path output = run / "data" / "stage1.hcfe";
  hcf::WriteEmbeddingFile(result.embeddings, output);
  json coverage = aligned.coverage.ToJson();
  coverage["zero_vectors"] = result.zero_vector_ids;
  WriteJson(run / "reports" / "coverage.json", coverage);
  manifest.Output(output);
  manifest.Output(run / "reports" / "coverage.json");
  manifest.Commit();
  std::cout << "embedded " << result.embeddings.size() << " entities (dim "
            << result.embeddings.dim() << ")\n";
  return 0;
}

int RunTrain(const Common& common, const Paths& paths, const std::string& model_list) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "train", cfg);
  auto data = LoadDataset(run, paths, manifest, false);
  const auto stage1 = LoadStage1(run, paths, manifest);
  const auto prepared = hcf::harness::Prepare(data, cfg.Seeded(), false, &stage1);
  fs::create_directories(run / "checkpoints");
  for (const auto& kind : ParseModels(model_list)) {
    const auto fitted = hcf::harness::Fit(kind, prepared);
    const fs::path path = CheckpointPath(run, kind);
    if (fitted.dcf) {
      hcf::dcf::SaveCheckpoint(*fitted.dcf, path);
      json history = json::array();
      for (const auto& h : fitted.history) {
        history.push_back({{"epoch", h.epoch}, {"train_loss", h.train_loss}, {"val_pr_auc", h.val_pr_auc}});
      }
      WriteJson(run / "reports" / ("history_" + kind + ".json"), history);
      manifest.Output(run / "reports" / ("history_" + kind + ".json"));
    } else if (fitted.bpdm) {
      hcf::baselines::SaveBpdm(*fitted.bpdm, path);
    } else {
      // Mem.CF has no trained parameters beyond the split; record the params.
      WriteJson(path, {{"kind", "memcf_model"}, {"params", cfg.memcf.ToJson()}});
    }
    manifest.Output(path);
    std::cout << "trained " << hcf::harness::DisplayName(kind) << " -> " << path.string() << "\n";
  }
  manifest.Commit();
  return 0;
}

hcf::harness::FittedModel LoadFitted(const fs::path& run, const std::string& kind,
                                     std::shared_ptr<const hcf::harness::Prepared> prepared,
                                     Manifest& manifest) {
  const fs::path path = CheckpointPath(run, kind);
  if (!fs::exists(path)) {
    throw hcf::NotFoundError("model not found: " + kind + " (expected '" + path.string() + "')");
  }
  manifest.Input(path);
  hcf::harness::FittedModel fitted;
  fitted.kind = kind;
  fitted.prepared = prepared;
  if (kind == "stage2" || kind == "hcf") {
    fitted.dcf = hcf::dcf::LoadCheckpoint(path);
    if (fitted.dcf->entity_ids->ids() != prepared->full.entity_ids().ids() ||
        fitted.dcf->item_ids->ids() != prepared->full.item_ids().ids()) {
      throw hcf::Error("checkpoint '" + path.string() + "' was trained on different ids");
    }
  } else if (kind == "bpdm" || kind == "stage1") {
    fitted.bpdm = hcf::baselines::LoadBpdm(path);
  } else {
    const json doc = json::parse(ReadFile(path));
    fitted.memcf = std::make_shared<hcf::baselines::MemCfModel>(
        prepared->split.train, hcf::baselines::MemCfParams::FromJson(doc.at("params")));
  }
  return fitted;
}

int RunEval(const Common& common, const Paths& paths, const std::string& model_list) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "eval", cfg);
  const auto models = ParseModels(model_list);
  for (const auto& kind : models) {
    if (!fs::exists(CheckpointPath(run, kind))) {
      throw hcf::NotFoundError("model not found: " + kind + " (expected '" +
                               CheckpointPath(run, kind).string() + "')");
    }
  }
  auto data = LoadDataset(run, paths, manifest, false);
  const auto stage1 = LoadStage1(run, paths, manifest);
  const auto prepared = hcf::harness::Prepare(data, cfg.Seeded(), false, &stage1);
  hcf::harness::ComparisonResult result;
  for (const auto& kind : models) {
    result.reports.push_back(hcf::harness::EvaluateFitted(LoadFitted(run, kind, prepared, manifest)));
  }
  WriteJson(run / "reports" / "comparison.json", result.ToJson());
  WriteText(run / "reports" / "comparison.txt", result.Table());
  manifest.Output(run / "reports" / "comparison.json");
  manifest.Output(run / "reports" / "comparison.txt");
  manifest.Commit();
  std::cout << result.Table();
  return 0;
}

int RunAblate(const Common& common, const Paths& paths) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "ablate", cfg);
  hcf::harness::Dataset data;
  if (paths.interactions.empty() && !fs::exists(run / "data" / "filtered.csv")) {
    data = hcf::harness::SynthDataset(cfg);
  } else {
    data = LoadDataset(run, paths, manifest, true);
  }
  const auto result = hcf::harness::RunAblation(data, cfg, common.jobs);
  WriteJson(run / "reports" / "ablation.json", result.ToJson());
  WriteText(run / "reports" / "ablation.txt", result.Table());
  manifest.Output(run / "reports" / "ablation.json");
  manifest.Output(run / "reports" / "ablation.txt");
  manifest.Commit();
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << result.Table();
  return 0;
}

int RunCommunities(const Common& common, const std::string& model) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "communities", cfg);
  const fs::path path = CheckpointPath(run, model);
  if (!fs::exists(path)) throw hcf::NotFoundError("model not found: " + model + " (expected '" + path.string() + "')");
  manifest.Input(path);
  const auto trained = hcf::dcf::LoadCheckpoint(path);
  const auto embeddings = hcf::dcf::ExportEntityEmbeddings(trained);
  const auto build = hcf::community::BuildGraph(embeddings, cfg.community.Policy());
  for (const auto& w : build.warnings) std::cerr << "warning: " << w << "\n";
  const auto gn = hcf::community::GirvanNewman(build.graph);
  const auto top = hcf::community::CommunityTopItems(gn.best, build.graph, trained, cfg.community.top_items);

  json communities = json::array();
  for (size_t c = 0; c < gn.best.communities.size(); ++c) {
    json members = json::array();
    for (uint32_t v : gn.best.communities[c]) members.push_back(build.graph.nodes()[v]);
    json items = json::array();
    for (const auto& item : top[c]) items.push_back({{"id", item.id}, {"mean_score", item.mean_score}});
    communities.push_back({{"members", members}, {"top_items", items}});
  }
  const json report = {{"threshold", build.threshold},
                       {"nodes", build.graph.num_nodes()},
                       {"edges", build.graph.num_edges()},
                       {"removals", gn.removals.size()},
                       {"best_step", gn.best_step},
                       {"modularity", gn.best.modularity},
                       {"communities", communities},
                       {"warnings", build.warnings}};
  hcf::WriteEmbeddingFile(embeddings, run / "graphs" / "embeddings.hcfe");
  WriteJson(run / "graphs" / "communities.json", hcf::community::ExportJson(build.graph, gn.best));
  WriteText(run / "graphs" / "communities.dot", hcf::community::ExportDot(build.graph, gn.best));
  WriteJson(run / "reports" / "communities.json", report);
  for (const char* out : {"graphs/embeddings.hcfe", "graphs/communities.json", "graphs/communities.dot",
                          "reports/communities.json"}) {
    manifest.Output(run / out);
  }
  manifest.Commit();
  std::cout << gn.best.communities.size() << " communities, modularity "
            << hcf::Round6(gn.best.modularity) << "\n";
  return 0;
}

int RunNeighbors(const Common& common, const std::string& id, size_t k, const std::string& model) {
  const auto cfg = ResolveConfig(common);
  const fs::path run = common.out;
  Manifest manifest(run, "neighbors", cfg);
  const fs::path path = CheckpointPath(run, model);
  if (!fs::exists(path)) throw hcf::NotFoundError("model not found: " + model + " (expected '" + path.string() + "')");
  manifest.Input(path);
  const auto embeddings = hcf::dcf::ExportEntityEmbeddings(hcf::dcf::LoadCheckpoint(path));
  const auto neighbors = hcf::community::TopNeighbors(embeddings, id, k);
  json list = json::array();
  for (const auto& n : neighbors) {
    list.push_back({{"id", n.id}, {"similarity", n.similarity}});
    std::printf("%s\t%.6f\n", n.id.c_str(), n.similarity);
  }
  const fs::path out = run / "reports" / ("neighbors_" + id + ".json");
  WriteJson(out, {{"id", id}, {"neighbors", list}});
  manifest.Output(out);
  manifest.Commit();
  return 0;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c == '\n' ? ' ' : c);
  }
  return out;
}

int Fail(const char* kind, const std::string& message, int code) {
  std::cerr << "error kind=" << kind << " message=\"" << Escape(message) << "\"\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid collaborative filtering pipeline"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  Paths paths;
  std::string models = "all";
  std::string model = "hcf";
  std::string neighbor_id;
  size_t neighbor_k = 10;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "RunConfig JSON file");
    sub->add_option("--set", common.overrides, "Config override key=value (repeatable)");
    sub->add_option("--seed", common.seed, "Master seed (overrides the config)");
    sub->add_option("--out", common.out, "Run directory")->capture_default_str();
  };

  auto* synth = app.add_subcommand("synth", "Generate synthetic interactions, corpus and ground truth");
  add_common(synth);

  auto* filter = app.add_subcommand("filter", "Apply the occurrence-density item filter");
  add_common(filter);
  filter->add_option("--interactions", paths.interactions, "Raw interactions file");

  auto* embed = app.add_subcommand("embed", "Build stage-1 entity embeddings from text");
  add_common(embed);
  embed->add_option("--interactions", paths.interactions, "Filtered interactions file");
  embed->add_option("--corpus", paths.corpus, "Entity corpus (JSON lines)");

  auto* train = app.add_subcommand("train", "Fit the requested models and save checkpoints");
  add_common(train);
  train->add_option("--interactions", paths.interactions, "Filtered interactions file");
  train->add_option("--embeddings", paths.embeddings, "Stage-1 HCFE file");
  train->add_option("--models", models, "Comma list of bpdm,memcf,stage1,stage2,hcf or 'all'")
      ->capture_default_str();

  auto* evaluate = app.add_subcommand("eval", "Evaluate saved checkpoints on the test split");
  add_common(evaluate);
  evaluate->add_option("--interactions", paths.interactions, "Filtered interactions file");
  evaluate->add_option("--embeddings", paths.embeddings, "Stage-1 HCFE file");
  evaluate->add_option("--models", models, "Comma list of models or 'all'")->capture_default_str();

  auto* ablate = app.add_subcommand("ablate", "Run the feature-set x item-cap ablation matrix");
  add_common(ablate);
  ablate->add_option("--interactions", paths.interactions, "Filtered interactions file");
  ablate->add_option("--corpus", paths.corpus, "Entity corpus");
  ablate->add_option("--items", paths.items, "Item description corpus");
  ablate->add_option("--jobs", common.jobs, "Parallel cell workers")->capture_default_str();

  auto* communities = app.add_subcommand("communities", "Detect communities over trained entity embeddings");
  add_common(communities);
  communities->add_option("--model", model, "Checkpoint to read (hcf or stage2)")->capture_default_str();

  auto* neighbors = app.add_subcommand("neighbors", "Most similar entities by trained embedding");
  add_common(neighbors);
  neighbors->add_option("--id", neighbor_id, "Entity id")->required();
  neighbors->add_option("--k", neighbor_k, "Number of neighbors")->capture_default_str();
  neighbors->add_option("--model", model, "Checkpoint to read")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) return RunSynth(common);
    if (*filter) return RunFilter(common, paths);
    if (*embed) return RunEmbed(common, paths);
    if (*train) return RunTrain(common, paths, models);
    if (*evaluate) return RunEval(common, paths, models);
    if (*ablate) return RunAblate(common, paths);
    if (*communities) return RunCommunities(common, model);
    if (*neighbors) return RunNeighbors(common, neighbor_id, neighbor_k, model);
  } catch (const hcf::NotFoundError& e) {
    return Fail("not_found", e.what(), kNotFound);
  } catch (const hcf::ParseError& e) {
    return Fail("parse", e.what(), kParseFailure);
  } catch (const hcf::NonFiniteError& e) {
    return Fail("non_finite", e.what(), kNonFinite);
  } catch (const std::exception& e) {
    return Fail("error", e.what(), kGenericError);
  }
  return kGenericError;
}
