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


#include "hcf/community.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "hcf/util.h"

namespace hcf::community {
namespace {

bool Active(const std::vector<bool>* active, uint32_t edge) {
  return active == nullptr || (*active)[edge];
}

// Adds the Brandes dependencies of every source in `sources` to `out`
// (ordered pairs, so each unordered pair is counted twice).
void Accumulate(const CompanyGraph& graph, const std::vector<bool>* active,
                std::span<const uint32_t> sources, std::vector<double>& out) {
  const size_t n = graph.num_nodes();
  std::vector<int64_t> distance(n);
  std::vector<double> paths(n);
  std::vector<double> dependency(n);
  std::vector<uint32_t> order;
  std::queue<uint32_t> frontier;
  for (uint32_t s : sources) {
    std::fill(distance.begin(), distance.end(), -1);
    std::fill(paths.begin(), paths.end(), 0.0);
    std::fill(dependency.begin(), dependency.end(), 0.0);
    order.clear();
    distance[s] = 0;
    paths[s] = 1.0;
    frontier.push(s);
    while (!frontier.empty()) {
      const uint32_t v = frontier.front();
      frontier.pop();
      order.push_back(v);
      for (const auto& [w, e] : graph.Adjacent(v)) {
        if (!Active(active, e)) continue;
        if (distance[w] < 0) {
          distance[w] = distance[v] + 1;
          frontier.push(w);
        }
        if (distance[w] == distance[v] + 1) paths[w] += paths[v];
      }
    }
    for (size_t k = order.size(); k-- > 0;) {
      const uint32_t w = order[k];
      for (const auto& [v, e] : graph.Adjacent(w)) {
        if (!Active(active, e) || distance[v] != distance[w] - 1) continue;
        const double share = paths[v] / paths[w] * (1.0 + dependency[w]);
        out[e] += share;
        dependency[v] += share;
      }
    }
  }
}

std::vector<std::vector<uint32_t>> Canonical(std::vector<std::vector<uint32_t>> communities) {
  for (auto& c : communities) std::sort(c.begin(), c.end());
  std::sort(communities.begin(), communities.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return communities;
}

std::vector<uint32_t> ComponentOf(const CompanyGraph& graph, const std::vector<bool>& active,
                                  uint32_t start) {
  std::vector<bool> seen(graph.num_nodes(), false);
  std::vector<uint32_t> members{start};
  seen[start] = true;
  for (size_t k = 0; k < members.size(); ++k) {
    for (const auto& [w, e] : graph.Adjacent(members[k])) {
      if (active[e] && !seen[w]) {
        seen[w] = true;
        members.push_back(w);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine similarity of vectors with different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) throw Error("cosine similarity of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

CompanyGraph::CompanyGraph(std::vector<std::string> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.a == e.b) throw Error("self-loop in company graph");
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.b >= nodes_.size()) throw Error("edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  for (size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].a == edges_[k - 1].a && edges_[k].b == edges_[k - 1].b) {
      throw Error("duplicate edge in company graph");
    }
  }
  adjacency_.resize(nodes_.size());
  degrees_.assign(nodes_.size(), 0.0);
  for (uint32_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    adjacency_[edge.a].emplace_back(edge.b, e);
    adjacency_[edge.b].emplace_back(edge.a, e);
    degrees_[edge.a] += edge.weight;
    degrees_[edge.b] += edge.weight;
    total_weight_ += edge.weight;
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

double NearestRankPercentile(std::vector<double> values, double percentile) {
  if (values.empty()) throw Error("percentile of an empty set");
  if (!(percentile > 0.0 && percentile <= 100.0)) throw Error("percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<size_t>(std::ceil(percentile / 100.0 * static_cast<double>(values.size()) - 1e-9));
  rank = std::clamp<size_t>(rank, 1, values.size());
  return values[rank - 1];
}

GraphBuild BuildGraph(const EmbeddingSet& embeddings, const ThresholdPolicy& policy) {
  const size_t n = embeddings.size();
  std::vector<double> norms(n);
  for (size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    for (double x : embeddings.Row(r)) sum += x * x;
    if (sum == 0.0) {
      throw Error("cosine similarity of a zero vector ('" +
                  embeddings.ids().Id(static_cast<uint32_t>(r)) + "')");
    }
    norms[r] = std::sqrt(sum);
  }
  std::vector<double> sims;
  sims.reserve(n * (n - 1) / 2);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      sims.push_back(CosineSimilarity(embeddings.Row(i), embeddings.Row(j)));
    }
  }
  GraphBuild build;
  if (const auto* absolute = std::get_if<AbsoluteThreshold>(&policy)) {
    build.threshold = absolute->value;
  } else if (sims.empty()) {
    build.threshold = 1.0;
  } else {
    build.threshold = NearestRankPercentile(sims, std::get<PercentileThreshold>(policy).percentile);
  }
  std::vector<Edge> edges;
  size_t k = 0;
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = i + 1; j < n; ++j, ++k) {
      if (sims[k] > build.threshold) edges.push_back({i, j, sims[k]});
    }
  }
  if (edges.empty()) build.warnings.push_back("similarity graph has no edges above the threshold");
  build.graph = CompanyGraph(embeddings.ids().ids(), std::move(edges));
  return build;
}

std::vector<double> EdgeBetweenness(const CompanyGraph& graph, const std::vector<bool>* active) {
  std::vector<uint32_t> sources(graph.num_nodes());
  std::iota(sources.begin(), sources.end(), 0u);
  std::vector<double> out(graph.num_edges(), 0.0);
  Accumulate(graph, active, sources, out);
  for (double& v : out) v *= 0.5;
  return out;
}

std::vector<std::vector<uint32_t>> Components(const CompanyGraph& graph,
                                              const std::vector<bool>* active) {
  const std::vector<bool> all(graph.num_edges(), true);
  const auto& mask = active ? *active : all;
  std::vector<bool> seen(graph.num_nodes(), false);
  std::vector<std::vector<uint32_t>> components;
  for (uint32_t v = 0; v < graph.num_nodes(); ++v) {
    if (seen[v]) continue;
    auto members = ComponentOf(graph, mask, v);
    for (uint32_t w : members) seen[w] = true;
    components.push_back(std::move(members));
  }
  return Canonical(std::move(components));
}

double Modularity(const CompanyGraph& graph, const std::vector<std::vector<uint32_t>>& communities) {
  const double total = graph.TotalWeight();
  if (total <= 0.0) return 0.0;
  std::vector<int64_t> label(graph.num_nodes(), -1);
  for (size_t c = 0; c < communities.size(); ++c) {
    for (uint32_t v : communities[c]) {
      if (label[v] >= 0) throw Error("communities overlap");
      label[v] = static_cast<int64_t>(c);
    }
  }
  if (std::any_of(label.begin(), label.end(), [](int64_t l) { return l < 0; })) {
    throw Error("communities do not cover every node");
  }
  std::vector<double> internal(communities.size(), 0.0);
  std::vector<double> degree(communities.size(), 0.0);
  for (const auto& e : graph.edges()) {
    if (label[e.a] == label[e.b]) internal[static_cast<size_t>(label[e.a])] += e.weight;
  }
  for (uint32_t v = 0; v < graph.num_nodes(); ++v) {
    degree[static_cast<size_t>(label[v])] += graph.WeightedDegree(v);
  }
  double q = 0.0;
  for (size_t c = 0; c < communities.size(); ++c) {
    const double share = degree[c] / (2.0 * total);
    q += internal[c] / total - share * share;
  }
  return q;
}

GirvanNewmanResult GirvanNewman(const CompanyGraph& graph) {
  const size_t edge_count = graph.num_edges();
  // Rank of each edge under lexicographic (id_a, id_b) with id_a < id_b.
  std::vector<std::pair<std::string, std::string>> keys(edge_count);
  for (uint32_t e = 0; e < edge_count; ++e) {
    const auto& x = graph.nodes()[graph.edges()[e].a];
    const auto& y = graph.nodes()[graph.edges()[e].b];
    keys[e] = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
  }
  std::vector<bool> active(edge_count, true);
  std::vector<double> betweenness = EdgeBetweenness(graph, &active);

  GirvanNewmanResult result;
  auto components = Components(graph, &active);
  result.best = Partition{components, Modularity(graph, components)};
  result.best_step = 0;
  double current_q = result.best.modularity;

  for (size_t step = 1; step <= edge_count; ++step) {
    int64_t chosen = -1;
    for (uint32_t e = 0; e < edge_count; ++e) {
      if (!active[e]) continue;
      if (chosen < 0) {
        chosen = e;
        continue;
      }
      const double best = betweenness[static_cast<size_t>(chosen)];
      const double tolerance = 1e-9 * std::max(1.0, std::abs(best));
      if (betweenness[e] > best + tolerance ||
          (std::abs(betweenness[e] - best) <= tolerance && keys[e] < keys[static_cast<size_t>(chosen)])) {
        chosen = e;
      }
    }
    const auto removed = static_cast<uint32_t>(chosen);
    const Edge& edge = graph.edges()[removed];
    Removal removal{removed, betweenness[removed], 0, 0.0};
    active[removed] = false;

    // Only the component(s) that held the removed edge change.
    auto side_a = ComponentOf(graph, active, edge.a);
    const bool split = !std::binary_search(side_a.begin(), side_a.end(), edge.b);
    std::vector<uint32_t> affected = side_a;
    if (split) {
      auto side_b = ComponentOf(graph, active, edge.b);
      affected.insert(affected.end(), side_b.begin(), side_b.end());
      std::sort(affected.begin(), affected.end());
      components = Components(graph, &active);
      current_q = Modularity(graph, components);
    }
    std::vector<bool> in_affected(graph.num_nodes(), false);
    for (uint32_t v : affected) in_affected[v] = true;
    std::vector<double> fresh(edge_count, 0.0);
    Accumulate(graph, &active, affected, fresh);
    for (uint32_t e = 0; e < edge_count; ++e) {
      if (in_affected[graph.edges()[e].a]) betweenness[e] = active[e] ? fresh[e] * 0.5 : 0.0;
    }

    removal.components = components.size();
    removal.modularity = current_q;
    result.removals.push_back(removal);
    if (current_q > result.best.modularity) {
      result.best = Partition{components, current_q};
      result.best_step = step;
    }
  }
  return result;
}

std::vector<Neighbor> TopNeighbors(const EmbeddingSet& embeddings, const std::string& id,
                                   size_t k) {
  const auto query_index = embeddings.ids().Find(id);
  if (!query_index) throw NotFoundError("unknown entity '" + id + "'");
  const auto query = embeddings.Row(*query_index);
  std::vector<Neighbor> ranked;
  for (uint32_t r = 0; r < embeddings.size(); ++r) {
    if (r == *query_index) continue;
    const auto row = embeddings.Row(r);
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) continue;
    ranked.push_back({embeddings.ids().Id(r), CosineSimilarity(query, row)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Neighbor& x, const Neighbor& y) {
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    return x.id < y.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<std::vector<RankedItem>> CommunityTopItems(const Partition& partition,
                                                       const CompanyGraph& graph,
                                                       const dcf::HcfModel& model, size_t k) {
  std::vector<uint32_t> all_items(model.num_items());
  std::iota(all_items.begin(), all_items.end(), 0u);
  std::vector<std::vector<RankedItem>> out;
  for (const auto& community : partition.communities) {
    std::vector<RankedItem> ranked;
    if (k == 0) {
      out.push_back(std::move(ranked));
      continue;
    }
    std::vector<uint32_t> members;
    for (uint32_t v : community) members.push_back(model.entity_ids->IndexOf(graph.nodes()[v]));
    const auto scores = dcf::ScoreAll(model, members, all_items);
    for (uint32_t i = 0; i < all_items.size(); ++i) {
      ranked.push_back({model.item_ids->Id(i), scores.col(i).mean()});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedItem& x, const RankedItem& y) {
      if (x.mean_score != y.mean_score) return x.mean_score > y.mean_score;
      return x.id < y.id;
    });
    if (ranked.size() > k) ranked.resize(k);
    out.push_back(std::move(ranked));
  }
  return out;
}

nlohmann::json ExportJson(const CompanyGraph& graph, const Partition& partition) {
  std::vector<size_t> label(graph.num_nodes(), 0);
  for (size_t c = 0; c < partition.communities.size(); ++c) {
    for (uint32_t v : partition.communities[c]) label[v] = c;
  }
  nlohmann::json nodes = nlohmann::json::array();
  for (uint32_t v = 0; v < graph.num_nodes(); ++v) {
    nodes.push_back({{"id", graph.nodes()[v]}, {"community", label[v]}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"a", graph.nodes()[e.a]}, {"b", graph.nodes()[e.b]}, {"weight", e.weight}});
  }
  return Round6(nlohmann::json{{"nodes", nodes}, {"edges", edges}, {"modularity", partition.modularity}});
}

std::string ExportDot(const CompanyGraph& graph, const Partition& partition) {
  std::vector<size_t> label(graph.num_nodes(), 0);
  for (size_t c = 0; c < partition.communities.size(); ++c) {
    for (uint32_t v : partition.communities[c]) label[v] = c;
  }
  auto quoted = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out + "\"";
  };
  std::ostringstream dot;
  dot << "graph companies {\n";
  for (uint32_t v = 0; v < graph.num_nodes(); ++v) {
    dot << "  " << quoted(graph.nodes()[v]) << " [community=" << label[v] << "];\n";
  }
  char weight[32];
  for (const auto& e : graph.edges()) {
    std::snprintf(weight, sizeof(weight), "%.6g", e.weight);
    dot << "  " << quoted(graph.nodes()[e.a]) << " -- " << quoted(graph.nodes()[e.b])
        << " [weight=" << weight << "];\n";
  }
  dot << "}\n";
  return dot.str();
}

}  // namespace hcf::community
