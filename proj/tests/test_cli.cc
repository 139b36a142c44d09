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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

#include "test_util.h"

namespace {

namespace fs = std::filesystem;

// Small enough that a full pipeline runs in seconds.
const char* const kSmall =
    " --set synth.m=60 --set synth.n=30 --set hcf.hidden=[8,4] --set hcf.dropout=[0.2] --set hcf.dim=8"
    " --set hcf.epochs=2 --set embed.dim=16 --set bpdm.epochs=2";

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

TEST(Cli, HelpAndUnknownCommand) {
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_NE(RunCli("frobnicate"), 0);
}

TEST(Cli, EvalWithoutCheckpointsIsNotFound) {
  const auto dir = hcf::testing::TempDir("cli_missing");
  EXPECT_EQ(RunCli("synth --out " + dir.string() + kSmall), 0);
  EXPECT_EQ(RunCli("filter --out " + dir.string() + kSmall), 0);
  EXPECT_EQ(RunCli("eval --models hcf --out " + dir.string() + kSmall), 2);
}

TEST(Cli, MissingInputIsNotFound) {
  const auto dir = hcf::testing::TempDir("cli_noinput");
  EXPECT_EQ(RunCli("filter --interactions /nonexistent.csv --out " + dir.string()), 2);
}

TEST(Cli, MalformedInputIsParseFailure) {
  const auto dir = hcf::testing::TempDir("cli_bad");
  hcf::testing::WriteFile(dir / "bad.csv", "a,b\nbroken\n");
  EXPECT_EQ(RunCli("filter --interactions " + (dir / "bad.csv").string() + " --out " + dir.string()), 3);
}

TEST(Cli, UnknownOverrideFails) {
  const auto dir = hcf::testing::TempDir("cli_override");
  EXPECT_EQ(RunCli("synth --set synth.bogus=1 --out " + dir.string()), 1);
}

nlohmann::json Pipeline(const fs::path& dir) {
  const std::string common = " --out " + dir.string() + kSmall;
  for (const char* step : {"synth", "filter", "embed", "train --models all", "eval --models all"}) {
    EXPECT_EQ(RunCli(std::string(step) + common), 0) << step;
  }
  return nlohmann::json::parse(Slurp(dir / "manifest.json"));
}

TEST(Cli, RepeatedRunsGiveIdenticalHashes) {
  const auto dir_a = hcf::testing::TempDir("cli_a");
  const auto dir_b = hcf::testing::TempDir("cli_b");
  const auto a = Pipeline(dir_a);
  const auto b = Pipeline(dir_b);
  ASSERT_TRUE(a.contains("commands"));
  for (const auto& [command, entry] : a["commands"].items()) {
    const auto& other = b["commands"][command];
    EXPECT_EQ(entry["config_hash"], other["config_hash"]) << command;
    // Paths differ between the two run directories; the hashes must not.
    std::vector<std::string> ha, hb;
    for (const auto& [path, hash] : entry["outputs"].items()) ha.push_back(hash);
    for (const auto& [path, hash] : other["outputs"].items()) hb.push_back(hash);
    EXPECT_EQ(ha, hb) << command;
    EXPECT_FALSE(ha.empty()) << command;
  }
  EXPECT_EQ(Slurp(dir_a / "reports" / "comparison.json"), Slurp(dir_b / "reports" / "comparison.json"));
}

}  // namespace
