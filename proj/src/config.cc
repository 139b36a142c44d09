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


#include "hcf/config.h"

#include <fstream>

#include "hcf/rng.h"
#include "hcf/util.h"

namespace hcf {
namespace {

using nlohmann::json;

void RejectUnknown(const json& section, const json& defaults, const std::string& name) {
  if (!section.is_object()) throw Error("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!defaults.contains(key)) throw Error("unknown config key '" + name + "." + key + "'");
  }
}

template <typename T>
void Read(const json& section, const char* key, T& field) {
  if (section.contains(key)) field = section.at(key).get<T>();
}

json WithoutSeed(json section) {
  section.erase("seed");
  return section;
}

// Section parsers for module configs that carry their own seed field.
template <typename T>
T FromSeededSection(const json& section, const std::string& name) {
  if (section.contains("seed")) {
    throw Error("config key '" + name + ".seed' is not allowed; set the top-level seed");
  }
  return T::FromJson(section);
}

}  // namespace

eval::ThresholdPolicy EvalSection::Policy() const {
  if (threshold == "max_f1") return eval::MaxF1{};
  if (threshold == "fixed") return eval::FixedThreshold{fixed_threshold};
  throw Error("eval.threshold must be 'max_f1' or 'fixed'");
}

community::ThresholdPolicy CommunitySection::Policy() const {
  if (threshold == "percentile") return community::PercentileThreshold{value};
  if (threshold == "absolute") return community::AbsoluteThreshold{value};
  throw Error("community.threshold must be 'percentile' or 'absolute'");
}

void RunConfig::Validate() const {
  synth.Validate();
  filter.Validate();
  split.Validate();
  hcf.Validate();
  if (embed.provider == "hashed") {
    if (embed.dim < 2) throw Error("embed.dim must be at least 2");
  } else if (embed.provider == "external") {
    if (embed.path.empty()) throw Error("embed.path is required for the external provider");
  } else {
    throw Error("embed.provider must be 'hashed' or 'external'");
  }
  if (bpdm.factors == 0) throw Error("bpdm.factors must be positive");
  if (eval.neg_ratio == 0) throw Error("eval.neg_ratio must be positive");
  (void)eval.Policy();
  (void)community.Policy();
  if (community.threshold == "percentile" && !(community.value > 0.0 && community.value <= 100.0)) {
    throw Error("community.value must lie in (0, 100] for a percentile threshold");
  }
  for (const auto& v : ablation.variants) {
    if (v != "CC" && v != "CC+TechDesc") throw Error("unknown ablation variant '" + v + "'");
  }
  for (const auto& model : ablation.models) {
    if (model != "bpdm" && model != "memcf" && model != "stage1" && model != "stage2" && model != "hcf") {
      throw Error("unknown ablation model '" + model + "'");
    }
  }
  for (size_t cap : ablation.caps) {
    if (cap == 0) throw Error("ablation caps must be positive");
  }
  if (ablation.seeds.empty()) throw Error("ablation.seeds must be nonempty");
}

json RunConfig::ToJson() const {
  return {
      {"seed", seed},
      {"synth", WithoutSeed(synth.ToJson())},
      {"filter", {{"rho_min", filter.rho_min}, {"rho_max", filter.rho_max}}},
      {"split", {{"train", split.train_frac}, {"val", split.val_frac}, {"test", split.test_frac}}},
      {"embed", {{"provider", embed.provider}, {"dim", embed.dim}, {"path", embed.path}}},
      {"hcf", WithoutSeed(hcf.ToJson())},
      {"bpdm", WithoutSeed(bpdm.ToJson())},
      {"memcf", memcf.ToJson()},
      {"eval",
       {{"neg_ratio", eval.neg_ratio},
        {"full_cross_product", eval.full_cross_product},
        {"threshold", eval.threshold},
        {"fixed_threshold", eval.fixed_threshold}}},
      {"community",
       {{"threshold", community.threshold},
        {"value", community.value},
        {"top_neighbors", community.top_neighbors},
        {"top_items", community.top_items}}},
      {"ablation",
       {{"variants", ablation.variants},
        {"caps", ablation.caps},
        {"models", ablation.models},
        {"seeds", ablation.seeds}}},
  };
}

RunConfig RunConfig::FromJson(const json& doc) {
  RunConfig cfg;
  const json defaults = cfg.ToJson();
  RejectUnknown(doc, defaults, "config");
  for (const auto& [name, section] : doc.items()) {
    if (name != "seed") RejectUnknown(section, defaults.at(name), name);
  }
  Read(doc, "seed", cfg.seed);
  if (doc.contains("synth")) cfg.synth = FromSeededSection<synth::SynthSpec>(doc["synth"], "synth");
  if (doc.contains("filter")) {
    Read(doc["filter"], "rho_min", cfg.filter.rho_min);
    Read(doc["filter"], "rho_max", cfg.filter.rho_max);
  }
  if (doc.contains("split")) {
    Read(doc["split"], "train", cfg.split.train_frac);
    Read(doc["split"], "val", cfg.split.val_frac);
    Read(doc["split"], "test", cfg.split.test_frac);
  }
  if (doc.contains("embed")) {
    Read(doc["embed"], "provider", cfg.embed.provider);
    Read(doc["embed"], "dim", cfg.embed.dim);
    Read(doc["embed"], "path", cfg.embed.path);
  }
  if (doc.contains("hcf")) cfg.hcf = FromSeededSection<dcf::HcfConfig>(doc["hcf"], "hcf");
  if (doc.contains("bpdm")) cfg.bpdm = FromSeededSection<baselines::BpdmParams>(doc["bpdm"], "bpdm");
  if (doc.contains("memcf")) cfg.memcf = baselines::MemCfParams::FromJson(doc["memcf"]);
  if (doc.contains("eval")) {
    const auto& s = doc["eval"];
    Read(s, "neg_ratio", cfg.eval.neg_ratio);
    Read(s, "full_cross_product", cfg.eval.full_cross_product);
    Read(s, "threshold", cfg.eval.threshold);
    Read(s, "fixed_threshold", cfg.eval.fixed_threshold);
  }
  if (doc.contains("community")) {
    const auto& s = doc["community"];
    Read(s, "threshold", cfg.community.threshold);
    Read(s, "value", cfg.community.value);
    Read(s, "top_neighbors", cfg.community.top_neighbors);
    Read(s, "top_items", cfg.community.top_items);
  }
  if (doc.contains("ablation")) {
    const auto& s = doc["ablation"];
    Read(s, "variants", cfg.ablation.variants);
    Read(s, "caps", cfg.ablation.caps);
    Read(s, "models", cfg.ablation.models);
    Read(s, "seeds", cfg.ablation.seeds);
  }
  cfg.Validate();
  return cfg;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("config file '" + path.string() + "' not found");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + path.string() + "': " + e.what(), 0);
  }
  return FromJson(doc);
}

std::string RunConfig::Hash() const { return JsonHash(ToJson()); }

RunConfig RunConfig::Seeded() const {
  RunConfig out = *this;
  out.synth.seed = DeriveSeed(seed, "synth");
  out.split.seed = DeriveSeed(seed, "split");
  out.hcf.seed = DeriveSeed(seed, "hcf");
  out.bpdm.seed = DeriveSeed(seed, "bpdm");
  return out;
}

RunConfig RunConfig::WithSeed(uint64_t new_seed) const {
  RunConfig out = *this;
  out.seed = new_seed;
  return out;
}

void ApplyOverride(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* node = &doc;
  size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw Error("unknown config key '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  *node = value;
}

}  // namespace hcf
