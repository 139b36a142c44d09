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


// Acceptance suite: one PASS/FAIL line per criterion. Tolerances, instance
// counts and time budgets are fixed here. Criteria may be selected by name on
// the command line (e.g. `hcf_acceptance A3 A9`); the exit status is nonzero
// when any selected criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hcf/community.h"
#include "hcf/config.h"
#include "hcf/dcf.h"
#include "hcf/harness.h"
#include "hcf/ingest.h"
#include "hcf/metrics.h"
#include "hcf/rng.h"
#include "oracles.h"
#include "test_util.h"

namespace {

using namespace hcf;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// A1: analytic gradients against central differences.
Outcome GradientCorrectness() {
  constexpr int kConfigs = 24;
  constexpr double kStep = 1e-5;
  constexpr double kTolerance = 1e-4;
  Rng rng(20260101);
  double worst = 0.0;
  size_t checked = 0, skipped = 0;
  for (int trial = 0; trial < kConfigs; ++trial) {
    auto c = oracle::RandomGradCase(rng, static_cast<uint64_t>(trial));
    const auto stats = oracle::CheckGradients(c.model, c.batch, 5000 + trial, kStep);
    if (stats.parameters != stats.analytic_size) return {false, "gradient layout mismatch"};
    worst = std::max(worst, stats.worst);
    checked += stats.checked;
    skipped += stats.skipped;
  }
  // Kink-crossing coordinates are skipped; most coordinates must still be checked.
  const bool pass = worst <= kTolerance && checked > 10 * skipped;
  return {pass, Format("%d configs, %zu coords checked, %zu skipped, worst rel err %.2e (tol %.0e)",
                       kConfigs, checked, skipped, worst, kTolerance)};
}

// A2: with a zero MLP, per-entity rankings equal raw dot-product rankings.
Outcome ZeroMlpReduction() {
  constexpr int kModels = 50;
  Rng rng(2);
  size_t rankings = 0;
  for (int trial = 0; trial < kModels; ++trial) {
    dcf::HcfConfig cfg;
    cfg.dim = 2 + rng.UniformIndex(7);
    cfg.hidden = {1 + rng.UniformIndex(6), 1 + rng.UniformIndex(4)};
    cfg.dropout = {0.3, 0.2};
    cfg.init_stddev = 0.1 + rng.Uniform();
    cfg.seed = static_cast<uint64_t>(trial);
    const size_t m = 2 + rng.UniformIndex(6), n = 5 + rng.UniformIndex(20);
    auto model = dcf::InitModel(cfg, testing::Ids('u', m), testing::Ids('i', n));
    model.ZeroMlp();
    std::vector<uint32_t> entities(m), items(n);
    std::iota(entities.begin(), entities.end(), 0u);
    std::iota(items.begin(), items.end(), 0u);
    const auto scores = dcf::ScoreAll(model, entities, items);
    for (uint32_t u = 0; u < m; ++u) {
      auto by_score = items, by_dot = items;
      std::stable_sort(by_score.begin(), by_score.end(),
                       [&](uint32_t a, uint32_t b) { return scores(u, a) > scores(u, b); });
      std::stable_sort(by_dot.begin(), by_dot.end(), [&](uint32_t a, uint32_t b) {
        return model.entity_emb.row(u).dot(model.item_emb.row(a)) >
               model.entity_emb.row(u).dot(model.item_emb.row(b));
      });
      if (by_score != by_dot) return {false, Format("model %d entity %u ranking differs", trial, u)};
      ++rankings;
    }
  }
  return {true, Format("%d models, %zu entity rankings identical", kModels, rankings)};
}

// A3: the three Huber branch examples.
Outcome HuberValues() {
  constexpr double kTolerance = 1e-12;
  const double values[3] = {dcf::HuberLoss(1.0, 1.0, 1.0), dcf::HuberLoss(1.0, 0.5, 1.0),
                            dcf::HuberLoss(0.0, 2.0, 1.0)};
  const double expected[3] = {0.0, 0.125, 1.5};
  double err = 0.0;
  for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(values[k] - expected[k]));
  return {err <= kTolerance, Format("L = %.15g, %.15g, %.15g; max err %.1e", values[0], values[1],
                                    values[2], err)};
}

// A4: first Adam step from zero moments.
Outcome AdamFirstStep() {
  constexpr double kTolerance = 1e-9;
  // m = (1 - b1) g, v = (1 - b2) g^2; bias correction restores g and g^2, so
  // the step is lr * g / (|g| + eps).
  const double g = 1.0, lr = 0.1, eps = 1e-8;
  const double expected = -lr * g / (std::abs(g) + eps);
  double param = 0.0, m = 0.0, v = 0.0;
  dcf::AdamUpdate(param, g, m, v, lr, 1);
  const double err = std::abs(param - expected);
  return {err <= kTolerance, Format("theta_1 = %.10f, expected %.10f", param, expected)};
}

// Item k is held by the first counts[k] entities.
InteractionMatrix WithCounts(size_t m, const std::vector<size_t>& counts) {
  std::vector<Interaction> entries;
  for (uint32_t i = 0; i < counts.size(); ++i) {
    for (uint32_t u = 0; u < counts[i]; ++u) entries.push_back({u, i});
  }
  return testing::Matrix(m, counts.size(), std::move(entries));
}

// A5: density filter boundaries, idempotence and monotonicity.
Outcome DensityFilter() {
  const ingest::DensityFilterConfig defaults;
  const auto boundary = ingest::FilterItems(WithCounts(100, {9, 10, 85, 90}), defaults);
  const std::vector<std::string> expected_kept{"i1", "i2"};
  if (boundary.report.kept != expected_kept) return {false, "boundary items not kept as expected"};
  constexpr int kTrials = 100;
  Rng rng(5);
  int checked = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const size_t m = 5 + rng.UniformIndex(40), n = 2 + rng.UniformIndex(30);
    const auto matrix = testing::RandomMatrix(rng, m, n, rng.Uniform());
    const ingest::DensityFilterConfig cfg{0.3 * rng.Uniform(), 0.5 + 0.5 * rng.Uniform()};
    const ingest::DensityFilterConfig wider{cfg.rho_min * rng.Uniform(),
                                            cfg.rho_max + (1.0 - cfg.rho_max) * rng.Uniform()};
    ingest::FilterResult once, widened;
    try {
      once = ingest::FilterItems(matrix, cfg);
    } catch (const Error&) {
      continue;  // every item dropped
    }
    widened = ingest::FilterItems(matrix, wider);
    if (!(ingest::FilterItems(once.matrix, cfg).matrix == once.matrix)) {
      return {false, Format("trial %d not idempotent", trial)};
    }
    const std::set<std::string> superset(widened.report.kept.begin(), widened.report.kept.end());
    for (const auto& id : once.report.kept) {
      if (!superset.count(id)) return {false, Format("trial %d not monotone", trial)};
    }
    ++checked;
  }
  return {checked >= 50, Format("rho 0.09/0.1/0.85/0.9 -> drop/keep/keep/drop; %d/%d random "
                                "matrices idempotent and monotone", checked, kTrials)};
}

// A6: PR-AUC and ROC-AUC against brute-force rational enumeration.
Outcome AucOracle() {
  constexpr int kInstances = 1000;
  constexpr double kTolerance = 1e-12;  // double rounding of the rational oracle
  Rng rng(6);
  int compared = 0;
  double worst = 0.0;
  while (compared < kInstances) {
    const size_t size = 2 + rng.UniformIndex(11);
    std::vector<double> scores(size);
    std::vector<int> labels(size);
    const size_t levels = 1 + rng.UniformIndex(8);
    for (size_t k = 0; k < size; ++k) {
      scores[k] = static_cast<double>(rng.UniformIndex(levels)) / static_cast<double>(levels);
      labels[k] = rng.Bernoulli(0.4);
    }
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || positives == static_cast<long>(size)) continue;
    worst = std::max(worst, std::abs(eval::PrAuc(scores, labels) -
                                     oracle::BruteForcePrAuc(scores, labels).ToDouble()));
    worst = std::max(worst, std::abs(eval::RocAuc(scores, labels) -
                                     oracle::BruteForceRocAuc(scores, labels).ToDouble()));
    ++compared;
  }
  return {worst <= kTolerance,
          Format("%d instances of <= 12 pairs, max |diff| %.1e (tol %.0e)", compared, worst, kTolerance)};
}

community::CompanyGraph Unweighted(size_t nodes, const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
  std::vector<std::string> ids;
  for (size_t k = 0; k < nodes; ++k) ids.push_back("n" + std::to_string(k));
  std::vector<community::Edge> list;
  for (auto [a, b] : edges) list.push_back({a, b, 1.0});
  return community::CompanyGraph(ids, list);
}

// A7: Brandes betweenness against path enumeration; the bridge goes first.
Outcome BetweennessOracle() {
  constexpr int kGraphs = 50;
  constexpr double kTolerance = 1e-12;
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < kGraphs; ++trial) {
    const size_t nodes = 2 + rng.UniformIndex(7);
    const double p = 0.2 + 0.6 * rng.Uniform();
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t a = 0; a < nodes; ++a) {
      for (uint32_t b = a + 1; b < nodes; ++b) {
        if (rng.Bernoulli(p)) edges.emplace_back(a, b);
      }
    }
    const auto graph = Unweighted(nodes, edges);
    const auto values = community::EdgeBetweenness(graph);
    const auto expected = oracle::PathEnumerationBetweenness(nodes, edges);
    for (size_t e = 0; e < graph.num_edges(); ++e) {
      const auto& edge = graph.edges()[e];
      worst = std::max(worst, std::abs(values[e] - expected.at({edge.a, edge.b}).ToDouble()));
    }
  }
  const auto triangles = Unweighted(6, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}});
  const auto gn = community::GirvanNewman(triangles);
  const auto& first = triangles.edges()[gn.removals.front().edge];
  const bool bridge = first.a == 2 && first.b == 3;
  return {worst <= kTolerance && bridge,
          Format("%d graphs <= 8 nodes, max |diff| %.1e; first removal %u-%u (betweenness %.0f)",
                 kGraphs, worst, first.a, first.b, gn.removals.front().betweenness)};
}

// A8: planted two-block recovery at weight separation >= 4.
Outcome PlantedCommunities() {
  constexpr int kSeeds = 10;
  std::vector<uint32_t> first(10), second(10);
  std::iota(first.begin(), first.end(), 0u);
  std::iota(second.begin(), second.end(), 10u);
  const std::vector<std::vector<uint32_t>> truth{first, second};
  int recovered = 0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(800 + seed);
    std::vector<std::string> ids;
    for (size_t k = 0; k < 20; ++k) ids.push_back("c" + std::to_string(k));
    std::vector<community::Edge> edges;
    for (uint32_t a = 0; a < 20; ++a) {
      for (uint32_t b = a + 1; b < 20; ++b) {
        const bool same = (a < 10) == (b < 10);
        // Intra weights 0.8..1.0, inter 0.1..0.2: ratio >= 4.
        if (rng.Bernoulli(same ? 0.9 : 0.08)) {
          edges.push_back({a, b, same ? 0.8 + 0.2 * rng.Uniform() : 0.1 + 0.1 * rng.Uniform()});
        }
      }
    }
    const auto gn = community::GirvanNewman(community::CompanyGraph(ids, edges));
    recovered += gn.best.communities == truth;
  }
  return {recovered == kSeeds, Format("%d/%d seeds recovered both blocks exactly", recovered, kSeeds)};
}

// Shared synthetic setting for A9 and A10.
RunConfig DeskScaleConfig() {
  RunConfig cfg;
  cfg.synth.m = 500;
  cfg.synth.n = 200;
  cfg.synth.k_topics = 6;
  cfg.synth.noise = 0.05;
  // Nearly single-topic entities with long, topical descriptions.
  cfg.synth.concentration = 0.15;
  cfg.synth.sharpness = 30.0;
  cfg.synth.mu = 0.6;
  cfg.synth.tokens_per_doc = 150;
  cfg.synth.background_rate = 0.2;
  // Item densities average about 12%; the default 10% floor would drop many.
  cfg.filter.rho_min = 0.01;
  return cfg;
}

// A9: mean test PR-AUC over 5 seeds, HCF ahead of every baseline by >= 0.03.
Outcome QualitativeOrdering() {
  constexpr double kMargin = 0.03;
  const std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<double> mean(harness::kAllModels.size(), 0.0);
  for (uint64_t seed : seeds) {
    const auto cfg = DeskScaleConfig().WithSeed(seed);
    const auto result = harness::RunComparison(harness::SynthDataset(cfg), harness::kAllModels, cfg);
    for (size_t k = 0; k < mean.size(); ++k) {
      mean[k] += result.reports[k].pr_auc / static_cast<double>(seeds.size());
    }
  }
  const double hcf = mean.back();
  const double best_baseline = *std::max_element(mean.begin(), mean.end() - 1);
  std::string detail;
  for (size_t k = 0; k < mean.size(); ++k) {
    detail += Format("%s%s %.4f", k ? ", " : "", harness::DisplayName(harness::kAllModels[k]).c_str(),
                     mean[k]);
  }
  detail += Format("; margin %.4f (need %.2f)", hcf - best_baseline, kMargin);
  return {hcf - best_baseline >= kMargin, detail};
}

// A10: HCF PR-AUC non-decreasing over item caps, within noise.
Outcome AblationTrend() {
  constexpr double kNoise = 0.02;
  auto cfg = DeskScaleConfig();
  cfg.ablation.variants = {"CC"};
  cfg.ablation.caps = {50, 100, 200};
  cfg.ablation.models = {"hcf"};
  cfg.ablation.seeds = {0, 1, 2};
  const auto result = harness::RunAblation(harness::SynthDataset(cfg), cfg);
  bool pass = true;
  std::string detail;
  for (size_t k = 0; k < result.rows.size(); ++k) {
    detail += Format("%scap %zu: %.4f", k ? ", " : "", result.rows[k].cap, result.rows[k].pr_auc);
    if (k > 0 && result.rows[k].pr_auc < result.rows[k - 1].pr_auc - kNoise) pass = false;
  }
  return {pass, detail + Format(" (tol %.2f, %zu seeds)", kNoise, cfg.ablation.seeds.size())};
}

int RunCli(const std::string& args) {
  const std::string command = std::string(HCF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// A11: the full CLI pipeline twice gives byte-identical JSON reports.
Outcome Determinism() {
  const std::string settings =
      " --seed 11 --set synth.m=150 --set synth.n=80 --set hcf.epochs=5 --set bpdm.epochs=10";
  const std::vector<std::string> steps{"synth", "filter", "embed", "train --models all",
                                       "eval --models all", "communities"};
  std::vector<fs::path> runs{testing::TempDir("accept_run_a"), testing::TempDir("accept_run_b")};
  for (const auto& run : runs) {
    for (const auto& step : steps) {
      const int code = RunCli(step + " --out " + run.string() + settings);
      if (code != 0) return {false, Format("'%s' exited with %d", step.c_str(), code)};
    }
  }
  size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(runs[0] / "reports")) {
    if (entry.path().extension() != ".json") continue;
    const auto other = runs[1] / "reports" / entry.path().filename();
    if (!fs::exists(other) || Slurp(entry.path()) != Slurp(other)) {
      return {false, "report differs: " + entry.path().filename().string()};
    }
    ++compared;
  }
  const bool has_all = fs::exists(runs[0] / "reports" / "comparison.json") &&
                       fs::exists(runs[0] / "reports" / "communities.json");
  return {has_all && compared > 0,
          Format("%zu JSON reports byte-identical across two runs", compared)};
}

// A12: checkpoint save/load reproduces scores.
Outcome CheckpointRoundTrip() {
  constexpr size_t kPairs = 1000;
  constexpr double kTolerance = 1e-6;
  dcf::HcfConfig cfg;
  cfg.dim = 16;
  cfg.hidden = {32, 16, 8};
  cfg.dropout = {0.3, 0.2, 0.1};
  cfg.init_stddev = 0.3;
  cfg.seed = 12;
  const size_t m = 60, n = 40;
  const auto model = dcf::InitModel(cfg, testing::Ids('u', m), testing::Ids('i', n));
  const auto path = testing::TempDir("accept_ckpt") / "model.ckpt";
  dcf::SaveCheckpoint(model, path, true);
  const auto loaded = dcf::LoadCheckpoint(path);
  Rng rng(12);
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  for (size_t k = 0; k < kPairs; ++k) {
    pairs.emplace_back(static_cast<uint32_t>(rng.UniformIndex(m)),
                       static_cast<uint32_t>(rng.UniformIndex(n)));
  }
  const auto before = dcf::ScorePairs(model, pairs);
  const auto after = dcf::ScorePairs(loaded, pairs);
  double worst = 0.0;
  for (size_t k = 0; k < kPairs; ++k) worst = std::max(worst, std::abs(before[k] - after[k]));
  return {worst <= kTolerance, Format("%zu pairs, max |diff| %.1e (tol %.0e)", kPairs, worst, kTolerance)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"A1", "gradient correctness", 60, GradientCorrectness},
      {"A2", "zero-MLP dot-product reduction", 10, ZeroMlpReduction},
      {"A3", "Huber unit values", 1, HuberValues},
      {"A4", "Adam single step", 1, AdamFirstStep},
      {"A5", "density filter", 10, DensityFilter},
      {"A6", "AUC oracle", 60, AucOracle},
      {"A7", "betweenness oracle", 60, BetweennessOracle},
      {"A8", "planted-community recovery", 60, PlantedCommunities},
      {"A9", "qualitative model ordering", 900, QualitativeOrdering},
      {"A10", "ablation cap trend", 1200, AblationTrend},
      {"A11", "pipeline determinism", 720, Determinism},
      {"A12", "checkpoint round-trip", 10, CheckpointRoundTrip},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = seconds <= c.budget_seconds;
    const bool pass = outcome.pass && in_budget;
    failures += !pass;
    std::printf("%-4s %s  %s: %s [%.1fs / %.0fs budget%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                outcome.detail.c_str(), seconds, c.budget_seconds, in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
