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

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace sgdrift;

namespace {

std::vector<std::pair<std::uint64_t, std::uint64_t>> run(std::span<const Sgr> records, SgddConfig cfg = {}) {
  SgddDetector det(cfg);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& r : records) {
    if (auto s = det.step(r)) out.emplace_back(s->t, s->W);
  }
  return out;
}

GeneratedStream small_stream(std::uint64_t seed = 3) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  return generate(cfg, {DriftPattern::gradual, 4000}, 20000);
}

}  // namespace

TEST(CdcButterfly, GapOfFiveBlocks) {
  std::vector<std::uint64_t> Wd{0, 10};
  std::vector<double> O1(20, 0.5), O2(20, 0.5);
  O2.back() = 0.1;
  EXPECT_FALSE(cdc_butterfly(10, 100, O1, O2, 1, 15, Wd));
  EXPECT_EQ(Wd.size(), 2u);
}

TEST(CdcButterfly, ConstructedSignal) {
  // maxB=100, Bbar=10, d=1: S = 2, S' = 2.
  std::vector<std::uint64_t> Wd{0};
  std::vector<double> O1{0.3, 0.3, 0.3}, O2{0.9, 0.9, 0.5};
  auto s = cdc_butterfly(10, 100, O1, O2, 77, 11, Wd);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->params.at("S"), 2);
  EXPECT_EQ(s->params.at("Sprime"), 2);
  EXPECT_EQ(s->params.at("Nmore"), 2);
  EXPECT_EQ(s->params.at("alpha"), 3);
  EXPECT_EQ(s->t, 77u);
  EXPECT_EQ(s->W, 11u);
  EXPECT_EQ(s->mode, DetectorMode::sgdd);
  EXPECT_EQ(Wd, (std::vector<std::uint64_t>{0, 11}));
}

TEST(CdcButterfly, EachConditionIsNecessary) {
  std::vector<double> O1{0.3, 0.3, 0.3}, O2{0.9, 0.9, 0.5};
  std::vector<std::uint64_t> Wd{0};
  EXPECT_FALSE(cdc_butterfly(10, 100, O1, O2, 1, 10, Wd));  // C3: 10 - 0 is not > 10
  std::vector<double> drift{0.3, 0.3, 0.31};
  EXPECT_FALSE(cdc_butterfly(10, 100, drift, O2, 1, 11, Wd));  // C1
  std::vector<double> mixed{0.9, 0.2, 0.5};
  EXPECT_FALSE(cdc_butterfly(10, 100, O1, mixed, 1, 11, Wd));  // C2: one more, one less
  std::vector<double> shortO2{0.9, 0.5};
  EXPECT_FALSE(cdc_butterfly(10, 100, O1, shortO2, 1, 11, Wd));  // fewer than S earlier entries
  EXPECT_EQ(Wd.size(), 1u);
}

TEST(CdcButterfly, ToleranceTightensWithDetections) {
  std::vector<double> O1(40, 0.3), O2(40, 0.9);
  O2.back() = 0.1;
  O1.back() = 0.3 + 5e-4;  // within 1e-3, outside 1e-4
  std::vector<std::uint64_t> Wd{0};
  ASSERT_TRUE(cdc_butterfly(10, 100, O1, O2, 1, 11, Wd));
  EXPECT_FALSE(cdc_butterfly(10, 100, O1, O2, 2, 30, Wd));
}

TEST(CdcButterfly, LiteralStrategyUsesRawThreshold) {
  // d = 1: (1 - d) S = 0, so C2 always holds and C1 averages one entry.
  std::vector<std::uint64_t> Wd{0};
  std::vector<double> O1{0.3, 0.3, 0.3}, O2{0.5, 0.5, 0.5};
  auto s = cdc_butterfly(10, 100, O1, O2, 1, 11, Wd, SuffixVariant::alternating, SPrimeStrategy::literal);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->params.at("Sprime"), 0);
  std::vector<std::uint64_t> Wd2{0};
  EXPECT_FALSE(cdc_butterfly(10, 100, O1, O2, 1, 11, Wd2));
}

TEST(CdcButterfly, RandomSeriesMatchOracle) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> len(1, 8), level(0, 3), dd(1, 3), gap(5, 30);
  std::uniform_real_distribution<double> maxLog(1.5, 4.5), bbarLog(0.0, 2.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> O1(len(rng)), O2(len(rng));
    double base = 0.25 * level(rng);
    for (auto& x : O1) x = std::bernoulli_distribution(0.7)(rng) ? base : base + 0.01;
    for (auto& x : O2) x = 0.2 * level(rng);
    std::vector<std::uint64_t> Wd(dd(rng));
    for (std::size_t k = 0; k < Wd.size(); ++k) Wd[k] = 3 * k;
    std::uint64_t W = Wd.back() + gap(rng);
    double Bbar = std::pow(10, bbarLog(rng)), maxB = std::pow(10, maxLog(rng));
    auto WdCopy = Wd;
    bool fired = cdc_butterfly(Bbar, maxB, O1, O2, 1, W, Wd).has_value();
    ASSERT_EQ(fired, oracle::cdc_fires(O1, O2, Bbar, maxB, W, WdCopy)) << trial;
  }
}

TEST(SgddStep, FirstTwoRecordsOpenNoWindow) {
  SgddDetector det;
  EXPECT_FALSE(det.step(fixture::rec("a", "b", 1)));
  EXPECT_FALSE(det.step(fixture::rec("a", "c", 2)));
  EXPECT_EQ(det.window(), 1u);
  EXPECT_TRUE(det.o1().empty());
}

TEST(SgddStep, WorkedExampleOneWindowNoSignal) {
  SgddConfig cfg;
  cfg.youngFraction = 0.5;
  SgddDetector det(cfg);
  for (const auto& r : fixture::worked_example_stream()) EXPECT_FALSE(det.step(r));
  EXPECT_EQ(det.window(), 2u);
  EXPECT_EQ(det.last_young_count(), 8u);
  EXPECT_EQ(det.graph().vertex_count(), 8u);
  EXPECT_EQ(det.graph().edge_count(), 8u);
  EXPECT_TRUE(det.open_window().empty());
  ASSERT_EQ(det.o1().size(), 1u);
  ASSERT_EQ(det.o2().size(), 1u);
  EXPECT_EQ(det.drift_windows(), (std::vector<std::uint64_t>{0}));

  // O1 and O2 against the straight-line references.
  const auto& g = det.graph();
  auto theta = g.phases();
  EXPECT_NEAR(det.o1()[0], oracle::order(theta), 1e-12);
  std::vector<std::vector<double>> W(8, std::vector<double>(8, 0.0));
  std::vector<double> omega;
  for (std::size_t v = 0; v < 8; ++v) {
    omega.push_back(g.vertex(v).omega);
    for (const auto& c : g.neighbors(v)) W[v][c.neighbor] = c.weight;
  }
  EXPECT_NEAR(det.o2()[0], oracle::order(oracle::rk4_dense(W, theta, omega, 0.01)), 1e-12);
}

TEST(SgddStep, EmptyWindowsCarryValuesForward) {
  // Every burst touches distinct vertices, so no butterflies appear.
  SgddDetector det;
  for (int k = 0; k < 100; ++k) det.step(fixture::rec("i" + std::to_string(k), "j" + std::to_string(k), k / 2));
  ASSERT_FALSE(det.o1().empty());
  for (double v : det.o1()) EXPECT_EQ(v, 0.0);
  for (double v : det.o2()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(det.graph().vertex_count(), 0u);
}

TEST(SgddStep, RejectsBadConfig) {
  SgddConfig c;
  c.youngFraction = 0;
  EXPECT_THROW(SgddDetector{c}, std::invalid_argument);
  c = {};
  c.h = 0;
  EXPECT_THROW(SgddDetector{c}, std::invalid_argument);
}

TEST(SgddProperty, ReplayDeterminism) {
  auto gen = small_stream();
  EXPECT_EQ(run(gen.records), run(gen.records));
  SgddConfig other;
  other.seed = 99;
  SgddDetector a, b(other);
  for (const auto& r : gen.records) {
    a.step(r);
    b.step(r);
  }
  EXPECT_EQ(a.o1(), b.o1());  // phases do not depend on the seed
}

TEST(SgddProperty, SeriesAndLogInvariants) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto gen = small_stream(seed);
    SgddDetector det;
    std::vector<DriftSignal> signals;
    for (const auto& r : gen.records) {
      if (auto s = det.step(r)) signals.push_back(*s);
    }
    EXPECT_EQ(det.o1().size(), det.window() - 1);
    EXPECT_EQ(det.o2().size(), det.window() - 1);
    for (double v : det.o1()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    const auto& Wd = det.drift_windows();
    for (std::size_t k = 1; k < Wd.size(); ++k) EXPECT_GT(Wd[k] - Wd[k - 1], 10u);
    for (std::size_t k = 1; k < signals.size(); ++k) {
      EXPECT_GT(signals[k].W - signals[k - 1].W, 10u);
      EXPECT_GT(signals[k].params.at("alpha"), signals[k - 1].params.at("alpha"));
    }
  }
}
