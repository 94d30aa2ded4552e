/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sgdrift;

namespace {

struct Result {
  int code;
  std::string out;
};

Result sh(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + SGDRIFT_CLI + std::string(" ") + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sgdrift_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream os(path);
  for (const auto& l : lines) os << l << '\n';
}

std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> positions(const std::string& jsonl) {
  std::istringstream is(jsonl);
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> out;
  for (const auto& s : read_signals(is)) out.emplace_back(std::string(to_string(s.mode)), s.t, s.W);
  return out;
}

}  // namespace

TEST_F(Cli, GenerateUsesSeriesNaming) {
  auto r = sh("generate --pattern gradual --delta 100000 --n 201000 --seed 7 --out-dir " + dir_.string());
  ASSERT_EQ(r.code, 0);
  for (auto ext : {".sgr", ".truth", ".manifest.json"}) EXPECT_TRUE(fs::exists(p(std::string("G_1") + ext))) << ext;
  auto m = load(p("G_1.manifest.json"));
  EXPECT_EQ(m["subcommand"], "generate");
  EXPECT_EQ(m["seed"], 7);
  EXPECT_EQ(m["cd_indices"], json::array({1000, 200000}));
  EXPECT_EQ(m["stream_id"].get<std::string>().size(), 16u);

  ASSERT_EQ(sh("generate --pattern recurring --delta 200000 --n 1500 --out-dir " + dir_.string()).code, 0);
  EXPECT_TRUE(fs::exists(p("R_2.sgr")));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(sh("generate --n 2000 --out-dir " + dir_.string()).code, 1);
  EXPECT_EQ(sh("generate --pattern sudden").code, 1);
  EXPECT_EQ(sh("generate --pattern gradual --n 500 --prefix 1000").code, 1);
  EXPECT_EQ(sh("").code, 1);
  EXPECT_EQ(sh("frobnicate").code, 1);
  EXPECT_EQ(sh("detect --mode nope --input x").code, 1);
  EXPECT_EQ(sh("detect --input x --f-schedule 0,3").code, 1);
  EXPECT_EQ(sh("--help").code, 0);
  EXPECT_EQ(sh("detect --input /nonexistent/file").code, 2);
}

TEST_F(Cli, EnvironmentOverridesDefaults) {
  ASSERT_EQ(sh("generate --pattern gradual --delta 1000 --n 3000 --out-dir " + dir_.string(), "SGDRIFT_SEED=5").code,
            0);
  EXPECT_EQ(load(p("G_d1000.manifest.json"))["seed"], 5);
}

TEST_F(Cli, BatchFamily) {
  ASSERT_EQ(sh("generate --batch --delta 1000 --n 3000 --instances 2 --out-dir " + dir_.string()).code, 0);
  std::set<std::string> ids;
  for (auto prefix : {"G_", "R_"}) {
    for (auto ab : {"11", "12", "21", "22"}) {
      auto name = std::string(prefix) + ab;
      ASSERT_TRUE(fs::exists(p(name + ".sgr"))) << name;
      ids.insert(load(p(name + ".manifest.json"))["stream_id"].get<std::string>());
    }
  }
  EXPECT_EQ(ids.size(), 8u);
  EXPECT_EQ(load(p("R_21.manifest.json"))["config"]["delta"], 2000);
}

TEST_F(Cli, ConstantBurstStreamIsSilent) {
  std::vector<std::string> lines;
  for (int k = 1; k <= 500; ++k) lines.push_back("u" + std::to_string(k) + ",v" + std::to_string(k) + ",1," + std::to_string(k));
  write_lines(p("flat.sgr"), lines);
  auto r = sh("detect --mode sgdp --input " + p("flat.sgr"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
}

TEST_F(Cli, BothModesInterleaveIndependentDetectors) {
  ASSERT_EQ(sh("generate --pattern gradual --delta 4000 --n 20000 --seed 3 --name s --out-dir " + dir_.string()).code, 0);
  auto both = sh("detect --mode both --input " + p("s.sgr"));
  auto sgdp = sh("detect --mode sgdp --input " + p("s.sgr"));
  auto sgdd = sh("detect --mode sgdd --input " + p("s.sgr"));
  ASSERT_EQ(both.code, 0);
  auto all = positions(both.out);
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> onlyP, onlyD;
  for (const auto& x : all) (std::get<0>(x) == "sgdp" ? onlyP : onlyD).push_back(x);
  EXPECT_EQ(onlyP, positions(sgdp.out));
  EXPECT_EQ(onlyD, positions(sgdd.out));
  EXPECT_FALSE(onlyP.empty());
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end(),
                             [](const auto& a, const auto& b) { return std::get<1>(a) < std::get<1>(b); }));
}

TEST_F(Cli, StdinPipeline) {
  ASSERT_EQ(sh("generate --pattern gradual --delta 2000 --n 8000 --name s --out-dir " + dir_.string()).code, 0);
  auto viaFile = sh("detect --mode sgdp --input " + p("s.sgr"));
  auto viaPipe = sh("detect --mode sgdp --input - < " + p("s.sgr"));
  ASSERT_EQ(viaPipe.code, 0);
  EXPECT_EQ(positions(viaPipe.out), positions(viaFile.out));
}

TEST_F(Cli, MalformedLines) {
  write_lines(p("bad.sgr"), {"a,b,1,1", "a,c,1,1", "a,b,oops,2", "a,d,1,3"});
  std::string cmd = std::string(SGDRIFT_CLI) + " detect --input " + p("bad.sgr") + " 2>&1 >/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  char buf[512] = {};
  std::size_t n = fread(buf, 1, sizeof buf - 1, f);
  int status = pclose(f);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(std::string(buf, n).find("line 3"), std::string::npos) << buf;

  auto r = sh("detect --on-error skip --input " + p("bad.sgr") + " --output " + p("out.jsonl"));
  EXPECT_EQ(r.code, 0);
  auto m = load(p("out.jsonl.manifest.json"));
  EXPECT_EQ(m["skipped_lines"], 1);
  EXPECT_EQ(m["records"], 3);
}

TEST_F(Cli, CustomDelimiter) {
  write_lines(p("tab.sgr"), {"a;b;1;1", "c;d;1;2"});
  EXPECT_EQ(sh("detect --delimiter ';' --input " + p("tab.sgr")).code, 0);
  EXPECT_EQ(sh("detect --input " + p("tab.sgr")).code, 2);
}

TEST_F(Cli, EvalFixture) {
  write_lines(p("sig.jsonl"), {R"({"mode":"sgdp","t":900,"W":9,"wall_ms":1.0,"params":{}})",
                               R"({"mode":"sgdp","t":995,"W":10,"wall_ms":2.0,"params":{}})"});
  {
    std::ofstream os(p("fx.truth"));
    write_truth(os, GroundTruth{{1000}, {77}, 0});
  }
  auto r = sh("eval --signals " + p("sig.jsonl") + " --truth " + p("fx.truth") + " --json " + p("rep.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sgdp\t-/100\t-/5"), std::string::npos) << r.out;
  auto rep = report_from_json(load(p("rep.json"))["sgdp"]);
  EXPECT_EQ(rep.cds[0].firstSgr, 100u);
  EXPECT_EQ(rep.cds[0].lastSgr, 5u);
  EXPECT_TRUE(fs::exists(p("rep.json.manifest.json")));
}

TEST_F(Cli, EvalEmptyTruth) {
  write_lines(p("sig.jsonl"), {});
  write_lines(p("empty.truth"), {});
  EXPECT_EQ(sh("eval --signals " + p("sig.jsonl") + " --truth " + p("empty.truth")).code, 2);
}

TEST_F(Cli, EvalRejectsMismatchedStreams) {
  ASSERT_EQ(sh("generate --pattern gradual --delta 1000 --n 4000 --seed 1 --name a --out-dir " + dir_.string()).code, 0);
  ASSERT_EQ(sh("generate --pattern gradual --delta 1000 --n 4000 --seed 2 --name b --out-dir " + dir_.string()).code, 0);
  ASSERT_EQ(sh("detect --mode sgdp --input " + p("a.sgr") + " --output " + p("a.jsonl")).code, 0);
  EXPECT_EQ(load(p("a.jsonl.manifest.json"))["stream_id"], load(p("a.manifest.json"))["stream_id"]);
  EXPECT_EQ(sh("eval --signals " + p("a.jsonl") + " --truth " + p("a.truth")).code, 0);
  EXPECT_EQ(sh("eval --signals " + p("a.jsonl") + " --truth " + p("b.truth")).code, 2);
  EXPECT_EQ(sh("eval --repeat 2 --batches 1 --mode sgdp --stream " + p("a.sgr") + " --truth " + p("b.truth")).code, 2);
}

TEST_F(Cli, RepeatProtocol) {
  ASSERT_EQ(sh("generate --pattern gradual --delta 1000 --n 4000 --name s --out-dir " + dir_.string()).code, 0);
  auto r = sh("eval --repeat 100 --batches 10 --mode sgdp --stream " + p("s.sgr") + " --truth " + p("s.truth") +
              " --json " + p("t.json"));
  ASSERT_EQ(r.code, 0);
  auto j = load(p("t.json"))["sgdp"];
  EXPECT_EQ(j["runs"], 100);
  auto m = load(p("t.json.manifest.json"));
  EXPECT_EQ(m["repeat"], 100);
  EXPECT_EQ(m["batches"], 10);
  EXPECT_EQ(sh("eval --repeat 10 --batches 3 --mode sgdp --stream " + p("s.sgr") + " --truth " + p("s.truth")).code, 1);
  EXPECT_EQ(sh("eval --repeat 10 --stream " + p("s.sgr") + " --truth " + p("s.truth")).code, 1);
}

TEST_F(Cli, GenerateDetectEvalCompose) {
  ASSERT_EQ(sh("generate --pattern gradual --delta 3000 --n 15000 --seed 9 --name s --out-dir " + dir_.string()).code, 0);
  ASSERT_EQ(sh("detect --mode both --input - --output " + p("s.jsonl") + " < " + p("s.sgr")).code, 0);
  ASSERT_EQ(sh("eval --signals " + p("s.jsonl") + " --truth " + p("s.truth") + " --json " + p("r.json")).code, 0);

  // Same numbers as running everything in-process.
  GeneratorConfig cfg;
  cfg.seed = 9;
  auto g = generate(cfg, {DriftPattern::gradual, 3000}, 15000);
  SgdpDetector det;
  auto run = run_detector(det, g.records, g.truth);
  auto expect = distances(run.signals, g.truth);
  auto got = report_from_json(load(p("r.json"))["sgdp"]);
  ASSERT_EQ(got.cds.size(), expect.cds.size());
  for (std::size_t k = 0; k < got.cds.size(); ++k) {
    EXPECT_EQ(got.cds[k].firstSgr, expect.cds[k].firstSgr);
    EXPECT_EQ(got.cds[k].lastSgr, expect.cds[k].lastSgr);
  }
}

TEST_F(Cli, ManifestReproducesRun) {
  ASSERT_EQ(sh("generate --pattern recurring --delta 2000 --n 8000 --name s --out-dir " + dir_.string()).code, 0);
  ASSERT_EQ(sh("detect --mode both --seed 4 --x 0.3 --input " + p("s.sgr") + " --output " + p("one.jsonl")).code, 0);
  auto m = load(p("one.jsonl.manifest.json"));
  EXPECT_EQ(m["seed"], 4);
  EXPECT_EQ(m["config"]["x"], 0.3);
  // Replay from the recorded argv.
  std::string args;
  auto argv = m["argv"].get<std::vector<std::string>>();
  for (std::size_t k = 1; k < argv.size(); ++k) {
    std::string a = argv[k] == p("one.jsonl") ? p("two.jsonl") : argv[k];
    args += " '" + a + "'";
  }
  ASSERT_EQ(sh(args).code, 0);
  EXPECT_EQ(positions(slurp(p("one.jsonl"))), positions(slurp(p("two.jsonl"))));
}
