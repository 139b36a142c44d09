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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace hcf {

struct Tensor {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;  // row-major
};

// Checkpoint container shared by every model kind:
//
//   bytes 0-7   magic "HCFCKPT\0"
//   u32         container version (1)
//   u64         length of the JSON header
//   ...         JSON header {"kind", "meta", "tensors": [{name, rows, cols}]}
//   ...         tensor payloads, float64 little-endian, in header order
//
// Tensors are stored at full double precision so a reload reproduces scores
// bit-for-bit.
class TensorArchive {
 public:
  explicit TensorArchive(std::string kind = "") : kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }
  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }

  void Put(const std::string& name, size_t rows, size_t cols, std::span<const double> data);
  bool Has(const std::string& name) const { return tensors_.count(name) > 0; }
  // Throws Error when absent or when the shape differs from (rows, cols).
  const Tensor& Get(const std::string& name) const;
  const Tensor& Get(const std::string& name, size_t rows, size_t cols) const;

  void Save(const std::filesystem::path& path) const;
  static TensorArchive Load(const std::filesystem::path& path);

 private:
  std::string kind_;
  nlohmann::json meta_ = nlohmann::json::object();
  std::vector<std::string> order_;
  std::map<std::string, Tensor> tensors_;
};

}  // namespace hcf
