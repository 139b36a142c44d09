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
#include <vector>

#include "json.hpp"

#include "hcf/core.h"
#include "hcf/ingest.h"

// Synthetic entity/item data with planted topic structure shared by the
// interactions and the entity text.
//
//   theta_c ~ normalized Gamma(concentration) over k topics, per entity
//   phi_i   = normalized Gamma draw with item_focus added on the item's
//             primary topic (i mod k)
//   a_c     ~ N(0, activity_spread^2), per entity
//   P(c, i) = sigmoid(sharpness * (theta_c . phi_i - mu) + a_c)
//
// Each sampled label is then flipped with probability `noise`. Entity text
// draws tokens_per_doc tokens: with probability background_rate a word from
// a shared background vocabulary, otherwise a topic z ~ theta_c and a word
// from that topic's vocabulary. Item descriptions use phi_i the same way.
namespace hcf::synth {

struct SynthSpec {
  size_t m = 500;
  size_t n = 200;
  size_t k_topics = 6;
  size_t vocab_per_topic = 40;
  size_t background_vocab = 200;
  size_t tokens_per_doc = 40;
  size_t item_tokens_per_doc = 20;
  double background_rate = 0.5;
  double concentration = 0.3;
  double item_focus = 3.0;
  double sharpness = 12.0;
  double mu = 0.55;
  double activity_spread = 0.0;
  double noise = 0.05;
  uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static SynthSpec FromJson(const nlohmann::json& json);
};

struct GroundTruth {
  std::vector<std::vector<double>> theta;  // m x k
  std::vector<std::vector<double>> phi;    // n x k
  std::vector<double> activity;            // per entity logit offset
  std::vector<uint32_t> entity_block;      // argmax theta_c, ties to lower topic
  std::vector<uint32_t> item_block;        // primary topic

  nlohmann::json ToJson(const InteractionMatrix& matrix) const;
};

struct SynthData {
  InteractionMatrix interactions;
  std::vector<ingest::CorpusRecord> corpus;  // entity text
  std::vector<ingest::CorpusRecord> item_corpus;
  GroundTruth truth;
};

// Entity ids are "c0000".., item ids "t000"..; every entity and item appears
// in the id maps even without interactions.
SynthData Generate(const SynthSpec& spec);

// Mean over all pairs of P(c, i) after label flips, given the latent draws.
double ExpectedDensity(const SynthSpec& spec, const GroundTruth& truth);

struct SynthPaths {
  std::filesystem::path interactions;
  std::filesystem::path corpus;
  std::filesystem::path item_corpus;
  std::filesystem::path truth;
};

// Writes interactions.csv, corpus.jsonl, items.jsonl and truth.json under `dir`.
SynthPaths WriteSynth(const SynthData& data, const std::filesystem::path& dir);

}  // namespace hcf::synth
