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
#include <string>
#include <vector>

#include "json.hpp"

#include "hcf/baselines.h"
#include "hcf/community.h"
#include "hcf/core.h"
#include "hcf/dcf.h"
#include "hcf/ingest.h"
#include "hcf/metrics.h"
#include "hcf/synth.h"

namespace hcf {

struct EmbedSection {
  std::string provider = "hashed";  // "hashed" | "external"
  size_t dim = 64;                  // hashed provider only
  std::string path;                 // external provider only
};

struct EvalSection {
  size_t neg_ratio = 4;
  bool full_cross_product = false;
  std::string threshold = "max_f1";  // "max_f1" | "fixed"
  double fixed_threshold = 0.5;

  eval::ThresholdPolicy Policy() const;
};

struct CommunitySection {
  std::string threshold = "percentile";  // "percentile" | "absolute"
  double value = 90.0;
  size_t top_neighbors = 10;
  size_t top_items = 5;

  community::ThresholdPolicy Policy() const;
};

struct AblationSection {
  std::vector<std::string> variants{"CC", "CC+TechDesc"};
  std::vector<size_t> caps{50, 100, 200};
  std::vector<std::string> models{"hcf"};
  std::vector<uint64_t> seeds{0, 1, 2};
};

// Every tunable of a run. Sections mirror the module configs; the single
// top-level seed feeds every component seed through DeriveSeed, so per-section
// "seed" keys are rejected.
struct RunConfig {
  uint64_t seed = 0;
  synth::SynthSpec synth;
  ingest::DensityFilterConfig filter;
  SplitSpec split;
  EmbedSection embed;
  dcf::HcfConfig hcf;
  baselines::BpdmParams bpdm;
  baselines::MemCfParams memcf;
  EvalSection eval;
  CommunitySection community;
  AblationSection ablation;

  void Validate() const;
  // Canonical form with every field present.
  nlohmann::json ToJson() const;
  // Missing keys keep defaults; unknown keys throw.
  static RunConfig FromJson(const nlohmann::json& json);
  static RunConfig Load(const std::filesystem::path& path);

  // Hash of the canonical JSON.
  std::string Hash() const;

  // Copy with every component seed derived from `seed`.
  RunConfig Seeded() const;
  RunConfig WithSeed(uint64_t new_seed) const;
};

// Applies "a.b.c=value" to `json`. The value is parsed as JSON when it parses,
// otherwise taken as a string. The key path must already exist.
void ApplyOverride(nlohmann::json& json, const std::string& assignment);

}  // namespace hcf
