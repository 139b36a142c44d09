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


#include "hcf/embedding.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hcf {

EmbeddingSet::EmbeddingSet(size_t dim) : dim_(dim) {
  if (dim == 0) throw Error("embedding dim must be positive");
}

void EmbeddingSet::Add(std::string_view id, std::span<const double> values) {
  if (values.size() != dim_) {
    throw Error("embedding '" + std::string(id) + "' has " + std::to_string(values.size()) +
                " values, expected " + std::to_string(dim_));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("non-finite value in embedding '" + std::string(id) + "'");
  }
  if (ids_.Find(id)) throw Error("duplicate embedding id '" + std::string(id) + "'");
  ids_.GetOrAdd(id);
  values_.insert(values_.end(), values.begin(), values.end());
}

std::optional<std::span<const double>> EmbeddingSet::Find(std::string_view id) const {
  auto index = ids_.Find(id);
  if (!index) return std::nullopt;
  return Row(*index);
}

EmbeddingSet ParseEmbeddingFile(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty embedding file", 1);
  std::istringstream header(line);
  std::string magic;
  int version = 0;
  long long dim = 0;
  std::string trailing;
  if (!(header >> magic >> version >> dim) || magic != "HCFE" || (header >> trailing)) {
    throw ParseError("expected header 'HCFE <version> <dim>'", 1);
  }
  if (version != kHcfeVersion) {
    throw ParseError("unsupported HCFE version " + std::to_string(version), 1);
  }
  if (dim <= 0) throw ParseError("dimension must be positive", 1);
  EmbeddingSet set(static_cast<size_t>(dim));
  std::vector<double> values;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError("expected '<id>\\t<values>'", line_no);
    const std::string id = line.substr(0, tab);
    values.clear();
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec == std::errc::result_out_of_range) {
        throw ParseError("non-finite value for id '" + id + "'", line_no);
      }
      if (ec != std::errc() || (next < end && *next != ' ')) {
        throw ParseError("bad number for id '" + id + "'", line_no);
      }
      if (!std::isfinite(v)) throw ParseError("non-finite value for id '" + id + "'", line_no);
      values.push_back(v);
      p = next;
    }
    if (values.size() != set.dim()) {
      throw ParseError("expected " + std::to_string(set.dim()) + " values, got " +
                           std::to_string(values.size()),
                       line_no);
    }
    try {
      set.Add(id, values);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return set;
}

EmbeddingSet LoadEmbeddingFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  return ParseEmbeddingFile(in);
}

void WriteEmbeddingFile(const EmbeddingSet& set, std::ostream& out) {
  out << "HCFE " << kHcfeVersion << ' ' << set.dim() << '\n';
  char buffer[32];
  for (size_t r = 0; r < set.size(); ++r) {
    out << set.ids().Id(static_cast<uint32_t>(r)) << '\t';
    auto row = set.Row(r);
    for (size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buffer, sizeof(buffer), "%.9g", row[k]);
      if (k) out << ' ';
      out << buffer;
    }
    out << '\n';
  }
}

void WriteEmbeddingFile(const EmbeddingSet& set, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  WriteEmbeddingFile(set, out);
}

}  // namespace hcf
