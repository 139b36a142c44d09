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


#include "hcf/archive.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "hcf/core.h"

namespace hcf {
namespace {

constexpr char kMagic[8] = {'H', 'C', 'F', 'C', 'K', 'P', 'T', '\0'};
constexpr uint32_t kContainerVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are written in host order; big-endian hosts need swapping");

template <typename T>
void WritePod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error("truncated checkpoint");
  return value;
}

}  // namespace

void TensorArchive::Put(const std::string& name, size_t rows, size_t cols,
                        std::span<const double> data) {
  if (data.size() != rows * cols) throw Error("tensor '" + name + "' shape mismatch");
  if (!tensors_.count(name)) order_.push_back(name);
  tensors_[name] = Tensor{rows, cols, std::vector<double>(data.begin(), data.end())};
}

const Tensor& TensorArchive::Get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error("checkpoint has no tensor '" + name + "'");
  return it->second;
}

const Tensor& TensorArchive::Get(const std::string& name, size_t rows, size_t cols) const {
  const Tensor& t = Get(name);
  if (t.rows != rows || t.cols != cols) {
    throw Error("tensor '" + name + "' has shape " + std::to_string(t.rows) + "x" +
                std::to_string(t.cols) + ", expected " + std::to_string(rows) + "x" +
                std::to_string(cols));
  }
  return t;
}

void TensorArchive::Save(const std::filesystem::path& path) const {
  nlohmann::json header{{"kind", kind_}, {"meta", meta_}, {"tensors", nlohmann::json::array()}};
  for (const auto& name : order_) {
    const Tensor& t = tensors_.at(name);
    header["tensors"].push_back({{"name", name}, {"rows", t.rows}, {"cols", t.cols}});
  }
  const std::string text = header.dump();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(kMagic, sizeof(kMagic));
  WritePod(out, kContainerVersion);
  WritePod(out, static_cast<uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& name : order_) {
    const Tensor& t = tensors_.at(name);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

TensorArchive TensorArchive::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("'" + path.string() + "' is not an HCF checkpoint");
  }
  if (ReadPod<uint32_t>(in) != kContainerVersion) throw Error("unsupported checkpoint version");
  const auto header_len = ReadPod<uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw Error("truncated checkpoint header");
  const auto header = nlohmann::json::parse(text);
  TensorArchive archive(header.at("kind").get<std::string>());
  archive.meta_ = header.at("meta");
  for (const auto& entry : header.at("tensors")) {
    Tensor t;
    t.rows = entry.at("rows").get<size_t>();
    t.cols = entry.at("cols").get<size_t>();
    t.data.resize(t.rows * t.cols);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!in) throw Error("truncated checkpoint payload");
    const auto name = entry.at("name").get<std::string>();
    archive.order_.push_back(name);
    archive.tensors_[name] = std::move(t);
  }
  return archive;
}

}  // namespace hcf
