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


#include "hcf/synth.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hcf/dcf.h"
#include "hcf/rng.h"
#include "hcf/util.h"

namespace hcf::synth {
namespace {

std::vector<double> NormalizedGamma(Rng& rng, size_t k, double shape, size_t boost_index,
                                    double boost) {
  std::vector<double> out(k);
  double total = 0.0;
  for (size_t t = 0; t < k; ++t) {
    out[t] = rng.Gamma(shape) + (t == boost_index ? boost : 0.0);
    total += out[t];
  }
  if (total <= 0.0) {
    // All draws underflowed; fall back to the primary topic.
    std::fill(out.begin(), out.end(), 0.0);
    out[boost_index % k] = 1.0;
    return out;
  }
  for (double& v : out) v /= total;
  return out;
}

// Inverse-CDF draw from a discrete distribution.
size_t Categorical(Rng& rng, const std::vector<double>& weights) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (size_t t = 0; t < weights.size(); ++t) {
    acc += weights[t];
    if (u < acc) return t;
  }
  return weights.size() - 1;
}

std::string Document(Rng& rng, const SynthSpec& spec, const std::vector<double>& mixture,
                     size_t tokens) {
  std::string text;
  char word[32];
  for (size_t k = 0; k < tokens; ++k) {
    if (rng.Bernoulli(spec.background_rate)) {
      std::snprintf(word, sizeof(word), "bg%zu", static_cast<size_t>(rng.UniformIndex(spec.background_vocab)));
    } else {
      const size_t topic = Categorical(rng, mixture);
      std::snprintf(word, sizeof(word), "t%zuw%zu", topic,
                    static_cast<size_t>(rng.UniformIndex(spec.vocab_per_topic)));
    }
    if (!text.empty()) text.push_back(' ');
    text += word;
  }
  return text;
}

double Affinity(const std::vector<double>& theta, const std::vector<double>& phi) {
  double dot = 0.0;
  for (size_t t = 0; t < theta.size(); ++t) dot += theta[t] * phi[t];
  return dot;
}

std::string IndexedId(char prefix, size_t index, int width) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%c%0*zu", prefix, width, index);
  return buffer;
}

}  // namespace

void SynthSpec::Validate() const {
  if (m == 0 || n == 0 || k_topics == 0) throw Error("synth sizes must be positive");
  if (vocab_per_topic == 0 || background_vocab == 0) throw Error("synth vocabularies must be nonempty");
  if (!(noise >= 0.0 && noise < 1.0)) throw Error("synth.noise must lie in [0, 1)");
  if (!(background_rate >= 0.0 && background_rate <= 1.0)) {
    throw Error("synth.background_rate must lie in [0, 1]");
  }
  if (!(concentration > 0.0)) throw Error("synth.concentration must be positive");
  if (!(item_focus >= 0.0)) throw Error("synth.item_focus must be nonnegative");
  if (!(sharpness > 0.0)) throw Error("synth.sharpness must be positive");
  if (!(activity_spread >= 0.0)) throw Error("synth.activity_spread must be nonnegative");
}

nlohmann::json SynthSpec::ToJson() const {
  return {{"m", m},
          {"n", n},
          {"k_topics", k_topics},
          {"vocab_per_topic", vocab_per_topic},
          {"background_vocab", background_vocab},
          {"tokens_per_doc", tokens_per_doc},
          {"item_tokens_per_doc", item_tokens_per_doc},
          {"background_rate", background_rate},
          {"concentration", concentration},
          {"item_focus", item_focus},
          {"sharpness", sharpness},
          {"mu", mu},
          {"activity_spread", activity_spread},
          {"noise", noise},
          {"seed", seed}};
}

SynthSpec SynthSpec::FromJson(const nlohmann::json& json) {
  SynthSpec spec;
  const auto defaults = spec.ToJson();
  for (const auto& [key, value] : json.items()) {
    if (!defaults.contains(key)) throw Error("unknown synth config key '" + key + "'");
  }
  auto read = [&](const char* key, auto& field) {
    if (json.contains(key)) field = json.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("m", spec.m);
  read("n", spec.n);
  read("k_topics", spec.k_topics);
  read("vocab_per_topic", spec.vocab_per_topic);
  read("background_vocab", spec.background_vocab);
  read("tokens_per_doc", spec.tokens_per_doc);
  read("item_tokens_per_doc", spec.item_tokens_per_doc);
  read("background_rate", spec.background_rate);
  read("concentration", spec.concentration);
  read("item_focus", spec.item_focus);
  read("sharpness", spec.sharpness);
  read("mu", spec.mu);
  read("activity_spread", spec.activity_spread);
  read("noise", spec.noise);
  read("seed", spec.seed);
  return spec;
}

nlohmann::json GroundTruth::ToJson(const InteractionMatrix& matrix) const {
  nlohmann::json entities = nlohmann::json::array();
  for (size_t c = 0; c < theta.size(); ++c) {
    entities.push_back({{"id", matrix.entity_ids().Id(static_cast<uint32_t>(c))},
                        {"block", entity_block[c]},
                        {"activity", activity[c]},
                        {"theta", theta[c]}});
  }
  nlohmann::json items = nlohmann::json::array();
  for (size_t i = 0; i < phi.size(); ++i) {
    items.push_back({{"id", matrix.item_ids().Id(static_cast<uint32_t>(i))},
                     {"block", item_block[i]},
                     {"phi", phi[i]}});
  }
  return {{"entities", entities}, {"items", items}};
}

SynthData Generate(const SynthSpec& spec) {
  spec.Validate();
  const size_t k = spec.k_topics;
  Rng latent_rng(DeriveSeed(spec.seed, "synth_latent"));
  Rng label_rng(DeriveSeed(spec.seed, "synth_labels"));
  Rng text_rng(DeriveSeed(spec.seed, "synth_text"));

  GroundTruth truth;
  for (size_t c = 0; c < spec.m; ++c) {
    truth.theta.push_back(NormalizedGamma(latent_rng, k, spec.concentration, 0, 0.0));
    const auto& theta = truth.theta.back();
    truth.entity_block.push_back(
        static_cast<uint32_t>(std::max_element(theta.begin(), theta.end()) - theta.begin()));
  }
  for (size_t c = 0; c < spec.m; ++c) truth.activity.push_back(latent_rng.Normal(0.0, spec.activity_spread));
  for (size_t i = 0; i < spec.n; ++i) {
    truth.phi.push_back(NormalizedGamma(latent_rng, k, spec.concentration, i % k, spec.item_focus));
    truth.item_block.push_back(static_cast<uint32_t>(i % k));
  }

  auto entities = std::make_shared<IdMap>();
  auto items = std::make_shared<IdMap>();
  for (size_t c = 0; c < spec.m; ++c) entities->GetOrAdd(IndexedId('c', c, 4));
  for (size_t i = 0; i < spec.n; ++i) items->GetOrAdd(IndexedId('t', i, 3));

  std::vector<Interaction> entries;
  for (size_t c = 0; c < spec.m; ++c) {
    for (size_t i = 0; i < spec.n; ++i) {
      const double p = dcf::Sigmoid(
          spec.sharpness * (Affinity(truth.theta[c], truth.phi[i]) - spec.mu) + truth.activity[c]);
      bool label = label_rng.Uniform() < p;
      if (label_rng.Uniform() < spec.noise) label = !label;
      if (label) entries.push_back({static_cast<uint32_t>(c), static_cast<uint32_t>(i)});
    }
  }

  SynthData data;
  data.interactions = InteractionMatrix(entities, items, std::move(entries));
  for (size_t c = 0; c < spec.m; ++c) {
    data.corpus.push_back({entities->Id(static_cast<uint32_t>(c)),
                           Document(text_rng, spec, truth.theta[c], spec.tokens_per_doc)});
  }
  for (size_t i = 0; i < spec.n; ++i) {
    data.item_corpus.push_back({items->Id(static_cast<uint32_t>(i)),
                                Document(text_rng, spec, truth.phi[i], spec.item_tokens_per_doc)});
  }
  data.truth = std::move(truth);
  return data;
}

double ExpectedDensity(const SynthSpec& spec, const GroundTruth& truth) {
  double total = 0.0;
  for (size_t c = 0; c < truth.theta.size(); ++c) {
    for (const auto& phi : truth.phi) {
      const double p =
          dcf::Sigmoid(spec.sharpness * (Affinity(truth.theta[c], phi) - spec.mu) + truth.activity[c]);
      total += (1.0 - spec.noise) * p + spec.noise * (1.0 - p);
    }
  }
  return total / static_cast<double>(truth.theta.size() * truth.phi.size());
}

SynthPaths WriteSynth(const SynthData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SynthPaths paths{dir / "interactions.csv", dir / "corpus.jsonl", dir / "items.jsonl",
                   dir / "truth.json"};
  ingest::WriteInteractions(data.interactions, paths.interactions);
  ingest::WriteCorpus(data.corpus, paths.corpus);
  ingest::WriteCorpus(data.item_corpus, paths.item_corpus);
  std::ofstream out(paths.truth);
  if (!out) throw Error("cannot write '" + paths.truth.string() + "'");
  out << Round6(data.truth.ToJson(data.interactions)).dump(1) << "\n";
  return paths;
}

}  // namespace hcf::synth
