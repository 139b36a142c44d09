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
#include <string_view>
#include <vector>

namespace hcf {

// SplitMix64 (Steele, Lea, Flood 2014). The state is a Weyl counter advanced
// by 0x9E3779B97F4A7C15 per draw and each output is the counter passed through
// the Stafford "Mix13" finalizer, so output k of seed s is a pure function of
// s + (k + 1) * 0x9E3779B97F4A7C15. Every derived quantity below (uniform
// doubles, Box-Muller normals, Marsaglia-Tsang gammas, Lemire bounded
// integers) is specified in terms of Next() so a seed reproduces across
// languages.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t Next();

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

  // Unbiased integer in [0, bound). bound must be positive.
  uint64_t UniformIndex(uint64_t bound);

  // Standard normal via Box-Muller; the spare value is cached.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang, with the shape < 1 boost.
  double Gamma(double shape);

  bool Bernoulli(double p) { return Uniform() < p; }

  // Fisher-Yates shuffle driven by UniformIndex.
  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformIndex(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stafford Mix13 finalizer used by SplitMix64.
uint64_t Mix64(uint64_t x);

// Seed for an independent stream identified by `tag`, derived from `seed`.
uint64_t DeriveSeed(uint64_t seed, std::string_view tag);
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// 64-bit FNV-1a.
uint64_t Fnv1a(std::string_view bytes, uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace hcf
