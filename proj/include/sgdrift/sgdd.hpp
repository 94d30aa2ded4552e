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
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgdrift/butterfly.hpp"
#include "sgdrift/signal.hpp"
#include "sgdrift/stream_model.hpp"
#include "sgdrift/uwgo.hpp"

namespace sgdrift {

/// How the O1 averaging length S' follows from S and the detection count d.
enum class SPrimeStrategy {
  decreasing,  ///< max(1, ceil(S/d)), shrinking as detections accumulate (default)
  literal,     ///< (1-d)*S as printed; non-positive for every d >= 1
};

inline SPrimeStrategy parse_sprime_strategy(std::string_view s) {
  if (s == "decreasing") return SPrimeStrategy::decreasing;
  if (s == "literal") return SPrimeStrategy::literal;
  throw std::invalid_argument("unknown S' strategy: " + std::string(s));
}

inline std::string_view to_string(SPrimeStrategy s) {
  return s == SPrimeStrategy::decreasing ? "decreasing" : "literal";
}

struct SgddConfig {
  double youngFraction = 0.25;
  double sigma = 1.0;
  double h = 0.01;
  std::uint64_t seed = 1;
  /// Minimum window distance from the last detection (C3).
  std::uint64_t minGap = 10;
  SuffixVariant variant = SuffixVariant::alternating;
  SPrimeStrategy sprime = SPrimeStrategy::decreasing;
};

/// Butterfly-interconnectivity drift check over the O1/O2 series, each ending with the
/// current window's value. Signals when
///   C1: |mean(S' entries of O1 before O1[W]) - O1[W]| < 10^-alpha, alpha = d + 2
///   C2: Nless >= S' or Nmore >= S' over the S entries of O2 before O2[W]
///   C3: W - Wd.last > minGap
/// and appends W to Wd.
inline std::optional<DriftSignal> cdc_butterfly(double Bbar, double maxB, std::span<const double> O1,
                                                std::span<const double> O2, std::uint64_t t, std::uint64_t W,
                                                std::vector<std::uint64_t>& Wd,
                                                SuffixVariant variant = SuffixVariant::alternating,
                                                SPrimeStrategy sprime = SPrimeStrategy::decreasing,
                                                std::uint64_t minGap = 10) {
  if (O1.empty() || O2.empty()) throw std::invalid_argument("order-parameter series must be non-empty");
  if (Wd.empty()) throw std::invalid_argument("drift log must start with an entry");

  if (!(W > Wd.back() && W - Wd.back() > minGap)) return std::nullopt;

  const std::uint64_t d = Wd.size();
  const std::uint64_t S = suffix_size(maxB, Bbar, d, variant);
  // C2 threshold and mu1 averaging length.
  double sprimeThreshold = 0.0;
  std::uint64_t meanLength = 1;
  if (sprime == SPrimeStrategy::decreasing) {
    auto sp = static_cast<std::uint64_t>(std::ceil(static_cast<double>(S) / static_cast<double>(d)));
    meanLength = std::max<std::uint64_t>(1, sp);
    sprimeThreshold = static_cast<double>(meanLength);
  } else {
    const double raw = (1.0 - static_cast<double>(d)) * static_cast<double>(S);
    sprimeThreshold = raw;
    meanLength = raw >= 1.0 ? static_cast<std::uint64_t>(raw) : 1;
  }

  if (O2.size() < S + 1 || O1.size() < meanLength + 1) return std::nullopt;

  const double o1 = O1.back();
  const double o2 = O2.back();
  auto o1prior = O1.subspan(O1.size() - 1 - meanLength, meanLength);
  const double mu1 = std::accumulate(o1prior.begin(), o1prior.end(), 0.0) / static_cast<double>(meanLength);

  std::uint64_t more = 0, less = 0;
  for (double v : O2.subspan(O2.size() - 1 - S, S)) {
    if (v > o2) ++more;
    else if (v < o2) ++less;
  }

  const double alpha = static_cast<double>(d) + 2.0;
  const bool c1 = std::fabs(mu1 - o1) < std::pow(10.0, -alpha);
  const bool c2 = static_cast<double>(less) >= sprimeThreshold || static_cast<double>(more) >= sprimeThreshold;
  if (!(c1 && c2)) return std::nullopt;

  Wd.push_back(W);
  DriftSignal sig;
  sig.mode = DetectorMode::sgdd;
  sig.t = t;
  sig.W = W;
  sig.params = {{"S", static_cast<double>(S)}, {"Sprime", sprimeThreshold}, {"alpha", alpha},
                {"mu1", mu1},                  {"O1", o1},                   {"O2", o2},
                {"Nmore", static_cast<double>(more)},
                {"Nless", static_cast<double>(less)},
                {"Bbar", Bbar},                {"Bmax", maxB},               {"d", static_cast<double>(d)}};
  return sig;
}

/// The butterfly-phase drift detector: burst-tumbled bipartite windows projected onto a
/// cumulative oscillator graph, whose order parameters drive cdc_butterfly().
class SgddDetector {
 public:
  explicit SgddDetector(SgddConfig cfg = {}) : cfg_(cfg), rng_(cfg.seed) {
    if (!(cfg_.youngFraction > 0.0 && cfg_.youngFraction <= 1.0)) {
      throw std::invalid_argument("young fraction must be in (0, 1]");
    }
    if (!(cfg_.h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (!(cfg_.sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  }

  std::optional<DriftSignal> step(const Sgr& r) {
    ++t_;
    IngestEvent ev = ingest(profile_, r.tau);
    window_.add_edge(left_.intern(r.i), right_.intern(r.j), r.tau);
    if (!ev.startsWindow) return std::nullopt;

    auto young = enumerate_young(window_, [this](Timestamp tau) {
      return is_young(profile_.seen, tau, cfg_.youngFraction);
    });
    lastYoungCount_ = young.size();
    graph_.project(young);
    window_.clear();

    if (young.empty() || graph_.empty()) {
      O1_.push_back(O1_.empty() ? 0.0 : O1_.back());
      O2_.push_back(O2_.empty() ? 0.0 : O2_.back());
    } else {
      graph_.assign_phases(rng_, cfg_.sigma);
      auto theta = graph_.phases();
      O1_.push_back(order_parameter(theta));
      auto delta = rk4_step(graph_, theta, cfg_.h);
      O2_.push_back(order_parameter(delta));
    }

    auto sig = cdc_butterfly(profile_.Bbar, static_cast<double>(profile_.Bmax), O1_, O2_, t_, W_, Wd_,
                             cfg_.variant, cfg_.sprime, cfg_.minGap);
    if (sig) sig->wall_ms = clock_.elapsed_ms();
    ++W_;
    return sig;
  }

  const BurstProfile& profile() const { return profile_; }
  const OscillatorGraph& graph() const { return graph_; }
  const BipartiteWindow& open_window() const { return window_; }
  const std::vector<double>& o1() const { return O1_; }
  const std::vector<double>& o2() const { return O2_; }
  const std::vector<std::uint64_t>& drift_windows() const { return Wd_; }
  std::uint64_t window() const { return W_; }
  std::uint64_t records() const { return t_; }
  std::size_t last_young_count() const { return lastYoungCount_; }
  const VertexInterner& left_vertices() const { return left_; }
  const VertexInterner& right_vertices() const { return right_; }
  const WallClock& clock() const { return clock_; }

 private:
  SgddConfig cfg_;
  std::mt19937_64 rng_;
  BurstProfile profile_;
  VertexInterner left_, right_;
  BipartiteWindow window_;
  OscillatorGraph graph_;
  std::vector<double> O1_, O2_;
  std::vector<std::uint64_t> Wd_{0};
  std::uint64_t W_ = 1;
  std::uint64_t t_ = 0;
  std::size_t lastYoungCount_ = 0;
  WallClock clock_;
};

}  // namespace sgdrift
