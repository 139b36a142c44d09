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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hcf/dcf.h"
#include "hcf/embedding.h"

namespace hcf::community {

// a . b / (|a| |b|). Throws Error for a zero vector.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

struct Edge {
  uint32_t a;  // a < b
  uint32_t b;
  double weight;
};

// Undirected similarity graph over embedding ids. Edges are sorted by (a, b).
class CompanyGraph {
 public:
  CompanyGraph() = default;
  CompanyGraph(std::vector<std::string> nodes, std::vector<Edge> edges);

  size_t num_nodes() const { return nodes_.size(); }
  size_t num_edges() const { return edges_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // (neighbor, edge index) pairs, neighbors ascending.
  const std::vector<std::pair<uint32_t, uint32_t>>& Adjacent(uint32_t node) const {
    return adjacency_[node];
  }
  double TotalWeight() const { return total_weight_; }
  double WeightedDegree(uint32_t node) const { return degrees_[node]; }

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> adjacency_;
  std::vector<double> degrees_;
  double total_weight_ = 0.0;
};

struct AbsoluteThreshold {
  double value;
};
struct PercentileThreshold {
  double percentile = 90.0;  // in (0, 100]
};
using ThresholdPolicy = std::variant<AbsoluteThreshold, PercentileThreshold>;

// Nearest-rank percentile: the ceil(p/100 * N)-th smallest of `values`.
double NearestRankPercentile(std::vector<double> values, double percentile);

struct GraphBuild {
  CompanyGraph graph;
  double threshold = 0.0;
  std::vector<std::string> warnings;
};

// Edge (i, j) with weight sigma_ij iff sigma_ij > threshold (strict).
GraphBuild BuildGraph(const EmbeddingSet& embeddings, const ThresholdPolicy& policy);

// Unweighted (hop-count) edge betweenness via Brandes accumulation. Each
// unordered node pair contributes 1, split evenly across its shortest paths.
// `active` masks removed edges; mask[e] false means edge e is absent.
std::vector<double> EdgeBetweenness(const CompanyGraph& graph,
                                    const std::vector<bool>* active = nullptr);

struct Partition {
  std::vector<std::vector<uint32_t>> communities;  // sorted members, ordered by first member
  double modularity = 0.0;
};

// Connected components of the active subgraph.
std::vector<std::vector<uint32_t>> Components(const CompanyGraph& graph,
                                              const std::vector<bool>* active = nullptr);

// Weighted modularity of `communities` on the full graph:
// Q = sum_c [ L_c / W - (D_c / 2W)^2 ], 0 for an edgeless graph.
double Modularity(const CompanyGraph& graph, const std::vector<std::vector<uint32_t>>& communities);

struct Removal {
  uint32_t edge;
  double betweenness;
  size_t components;  // after removal
  double modularity;  // of the components after removal, on the original graph
};

struct GirvanNewmanResult {
  std::vector<Removal> removals;
  Partition best;
  // Number of removals that produced `best`, 0 = the starting components.
  size_t best_step = 0;
};

// Removes a maximum-betweenness edge until none remain, recomputing
// betweenness after every removal. Ties go to the edge with the
// lexicographically smallest (id_a, id_b). The starting components and the
// components after every removal are candidates for `best`, the highest
// modularity one with the earliest winning on ties.
GirvanNewmanResult GirvanNewman(const CompanyGraph& graph);

struct Neighbor {
  std::string id;
  double similarity;
};

// Highest-cosine neighbors of `id`, ties by id, excluding itself and
// zero vectors.
std::vector<Neighbor> TopNeighbors(const EmbeddingSet& embeddings, const std::string& id,
                                   size_t k = 10);

struct RankedItem {
  std::string id;
  double mean_score;
};

// Per community, items ranked by mean eval-mode score over its members
// (ties by item id). Members are looked up by id in the model.
std::vector<std::vector<RankedItem>> CommunityTopItems(const Partition& partition,
                                                       const CompanyGraph& graph,
                                                       const dcf::HcfModel& model, size_t k = 5);

// {nodes: [{id, community}], edges: [{a, b, weight}], modularity}
nlohmann::json ExportJson(const CompanyGraph& graph, const Partition& partition);
std::string ExportDot(const CompanyGraph& graph, const Partition& partition);

}  // namespace hcf::community
