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
#include <string>
#include <string_view>

#include "json.hpp"

namespace hcf {

// Rounds to 6 significant digits so JSON output is stable text.
double Round6(double value);

// Recursively applies Round6 to every floating-point number in `value`.
nlohmann::json Round6(const nlohmann::json& value);

// 16 lowercase hex digits of the FNV-1a hash of `bytes`.
std::string HashHex(std::string_view bytes);

// Hash of the compact dump of `value` (keys are sorted by nlohmann::json).
std::string JsonHash(const nlohmann::json& value);

}  // namespace hcf
