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


#include "hcf/util.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hcf/rng.h"

namespace hcf {

double Round6(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return std::strtod(buffer, nullptr);
}

nlohmann::json Round6(const nlohmann::json& value) {
  if (value.is_number_float()) return Round6(value.get<double>());
  if (value.is_array() || value.is_object()) {
    nlohmann::json out = value;
    for (auto& element : out) element = Round6(element);
    return out;
  }
  return value;
}

std::string HashHex(std::string_view bytes) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(Fnv1a(bytes)));
  return buffer;
}

std::string JsonHash(const nlohmann::json& value) { return HashHex(value.dump()); }

}  // namespace hcf
