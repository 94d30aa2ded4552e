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

#include <algorithm>
#include <cstdint>
#include <concepts>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgdrift/stream_model.hpp"

namespace sgdrift {

/// Generative parameters of one regime: burst connection probability and walk-length range.
struct RegimeParams {
  double rho = 0.4;
  std::uint32_t Lmin = 1;
  std::uint32_t Lmax = 4;

  friend bool operator==(const RegimeParams&, const RegimeParams&) = default;
};

inline constexpr RegimeParams kBaseRegime{0.4, 1, 4};
inline constexpr RegimeParams kRaisedRegime{0.6, 3, 4};

struct GeneratorConfig {
  /// Regime used for the prefix [0, prefixLen).
  double rho = 0.3;
  std::uint32_t Lmin = 1;
  std::uint32_t Lmax = 2;
  /// Recency horizon in generation batches.
  std::uint32_t beta = 5;
  /// Edges per generation batch.
  std::uint32_t M = 10;
  std::uint64_t seed = 1;
  std::uint64_t prefixLen = 1000;

  RegimeParams prefix_regime() const { return {rho, Lmin, Lmax}; }

  void validate() const {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must be in (0, 1)");
    if (Lmin == 0 || Lmin > Lmax) throw std::invalid_argument("walk lengths need 1 <= Lmin <= Lmax");
    if (beta == 0 || M == 0) throw std::invalid_argument("beta and M must be positive");
  }
};

enum class DriftPattern { gradual, recurring };

inline DriftPattern parse_pattern(std::string_view s) {
  if (s == "gradual") return DriftPattern::gradual;
  if (s == "recurring") return DriftPattern::recurring;
  throw std::invalid_argument("unknown drift pattern: " + std::string(s));
}

inline std::string_view to_string(DriftPattern p) { return p == DriftPattern::gradual ? "gradual" : "recurring"; }

struct Regime {
  std::uint64_t start = 0;
  RegimeParams params;
};

struct DriftSchedule {
  DriftPattern pattern = DriftPattern::gradual;
  std::uint64_t deltaR = 100000;

  /// Regimes after the prefix: base until 2dR, then alternating at each multiple of dR.
  std::vector<Regime> regimes() const {
    if (deltaR == 0) throw std::invalid_argument("drift interval must be positive");
    std::vector<Regime> out{{0, kBaseRegime}, {2 * deltaR, kRaisedRegime}, {3 * deltaR, kBaseRegime}};
    if (pattern == DriftPattern::gradual) out.push_back({4 * deltaR, kRaisedRegime});
    return out;
  }

  /// Indices where parameters change.
  std::vector<std::uint64_t> boundaries() const {
    std::vector<std::uint64_t> out;
    for (const auto& r : regimes()) {
      if (r.start > 0) out.push_back(r.start);
    }
    return out;
  }
};

/// Parameters active at a 0-based SGR index under the schedule alone (prefix not applied).
inline RegimeParams schedule_params(const DriftSchedule& schedule, std::uint64_t index) {
  RegimeParams p = kBaseRegime;
  for (const auto& r : schedule.regimes()) {
    if (index >= r.start) p = r.params;
  }
  return p;
}

/// Parameters used by the generator at an index: the prefix regime, then the schedule.
inline RegimeParams regime_at(const GeneratorConfig& cfg, const DriftSchedule& schedule, std::uint64_t index) {
  return index < cfg.prefixLen ? cfg.prefix_regime() : schedule_params(schedule, index);
}

/// CD positions: records with 0-based index >= cdIndices[k] follow the new regime.
struct GroundTruth {
  std::vector<std::uint64_t> cdIndices;
  std::vector<Timestamp> cdTimestamps;
  std::uint64_t deltaR = 0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

inline std::vector<std::uint64_t> cd_indices(const GeneratorConfig& cfg, const DriftSchedule& schedule,
                                             std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (cfg.prefixLen < n) out.push_back(cfg.prefixLen);
  for (auto b : schedule.boundaries()) {
    if (b > cfg.prefixLen && b < n) out.push_back(b);
  }
  return out;
}

/// Minimal preferential-closure burst generator.
///
/// Each burst carries one fresh tau and consists of 1 + Geometric(rho) walks. A walk starts
/// at a recent i-vertex with probability rho (otherwise a fresh one) and emits L ~ U[Lmin,Lmax]
/// edges. Each edge after the first tries, with probability rho, to close a wedge
/// i - j_prev - i' - j' inside the current burst, which adds a butterfly. Otherwise it
/// attaches to a burst-local j (probability rho), a recent j, or a fresh j. Bursts are cut
/// at regime boundaries so each regime starts on a new timestamp.
template <typename Sink>
  requires std::invocable<Sink&, const Sgr&>
GroundTruth generate_to(const GeneratorConfig& cfg, const DriftSchedule& schedule, std::uint64_t n, Sink&& sink) {
  cfg.validate();
  if (n <= cfg.prefixLen) throw std::invalid_argument("stream length must exceed the prefix length");

  GroundTruth truth;
  truth.deltaR = schedule.deltaR;
  truth.cdIndices = cd_indices(cfg, schedule, n);

  std::vector<std::uint64_t> cuts = truth.cdIndices;
  for (auto b : schedule.boundaries()) cuts.push_back(b);
  cuts.push_back(n);
  std::sort(cuts.begin(), cuts.end());

  std::mt19937_64 rng(cfg.seed);
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto pick = [&](std::size_t size) { return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng); };

  const std::size_t recentCap = static_cast<std::size_t>(cfg.beta) * cfg.M;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> recent;
  std::size_t recentHead = 0;
  auto remember = [&](std::uint64_t i, std::uint64_t j) {
    if (recent.size() < recentCap) {
      recent.emplace_back(i, j);
    } else {
      recent[recentHead] = {i, j};
      recentHead = (recentHead + 1) % recentCap;
    }
  };

  std::uint64_t nextI = 0, nextJ = 0;
  std::uint64_t emitted = 0;
  Timestamp tau = 0;
  std::size_t cdCursor = 0;

  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> localJ;  // j -> i
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> localI;  // i -> j
  std::vector<std::uint64_t> localJs;

  while (emitted < n) {
    const RegimeParams p = regime_at(cfg, schedule, emitted);
    const std::uint64_t limit = *std::upper_bound(cuts.begin(), cuts.end(), emitted);
    ++tau;
    if (cdCursor < truth.cdIndices.size() && truth.cdIndices[cdCursor] == emitted) {
      truth.cdTimestamps.push_back(tau);
      ++cdCursor;
    }
    localJ.clear();
    localI.clear();
    localJs.clear();

    const int steps = 1 + std::geometric_distribution<int>(1.0 - p.rho)(rng);
    for (int s = 0; s < steps && emitted < limit; ++s) {
      const auto L = std::uniform_int_distribution<std::uint32_t>(p.Lmin, p.Lmax)(rng);
      const std::uint64_t i = (!recent.empty() && coin(p.rho)) ? recent[pick(recent.size())].first : nextI++;
      std::uint64_t jprev = 0;
      for (std::uint32_t k = 0; k < L && emitted < limit; ++k) {
        std::optional<std::uint64_t> j;
        if (k > 0 && coin(p.rho)) {
          const auto& mates = localJ[jprev];
          if (!mates.empty()) {
            std::uint64_t other = mates[pick(mates.size())];
            if (other != i) {
              const auto& reach = localI[other];
              std::uint64_t cand = reach[pick(reach.size())];
              if (cand != jprev) j = cand;
            }
          }
        }
        if (!j && !localJs.empty() && coin(p.rho)) j = localJs[pick(localJs.size())];
        if (!j && !recent.empty() && coin(0.5)) j = recent[pick(recent.size())].second;
        if (!j) j = nextJ++;

        sink(Sgr{std::to_string(i), std::to_string(*j), 1.0, tau, emitted + 1});
        ++emitted;
        if (localJ.find(*j) == localJ.end()) localJs.push_back(*j);
        localJ[*j].push_back(i);
        localI[i].push_back(*j);
        remember(i, *j);
        jprev = *j;
      }
    }
  }
  return truth;
}

struct GeneratedStream {
  std::vector<Sgr> records;
  GroundTruth truth;
};

inline GeneratedStream generate(const GeneratorConfig& cfg, const DriftSchedule& schedule, std::uint64_t n) {
  GeneratedStream out;
  out.records.reserve(n);
  out.truth = generate_to(cfg, schedule, n, [&](const Sgr& r) { out.records.push_back(r); });
  return out;
}

/// "i,j,omega,tau" line, the stream file format.
inline void write_sgr(std::ostream& os, const Sgr& r, char delim = ',') {
  os << r.i << delim << r.j << delim << r.omega << delim << r.tau << '\n';
}

/// Ground-truth file: a "# delta_r=<n>" header, then one "index,tau" line per CD.
inline void write_truth(std::ostream& os, const GroundTruth& truth) {
  os << "# delta_r=" << truth.deltaR << '\n';
  for (std::size_t k = 0; k < truth.cdIndices.size(); ++k) {
    os << truth.cdIndices[k] << ',' << truth.cdTimestamps.at(k) << '\n';
  }
}

inline GroundTruth read_truth(std::istream& is) {
  GroundTruth truth;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    auto s = detail::trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      auto pos = s.find("delta_r=");
      if (pos != std::string_view::npos) {
        auto v = detail::parse_int(detail::trim(s.substr(pos + 8)));
        if (!v || *v < 0) throw std::runtime_error("truth line " + std::to_string(lineNo) + ": bad delta_r");
        truth.deltaR = static_cast<std::uint64_t>(*v);
      }
      continue;
    }
    auto fields = detail::split(s, ',');
    auto idx = fields.size() == 2 ? detail::parse_int(fields[0]) : std::nullopt;
    auto ts = fields.size() == 2 ? detail::parse_int(fields[1]) : std::nullopt;
    if (!idx || !ts || *idx < 0) {
      throw std::runtime_error("truth line " + std::to_string(lineNo) + ": expected 'index,tau'");
    }
    truth.cdIndices.push_back(static_cast<std::uint64_t>(*idx));
    truth.cdTimestamps.push_back(*ts);
  }
  return truth;
}

/// Stream family name: G_ab / R_ab (pattern, interval multiplier a, instance b).
inline std::string stream_name(DriftPattern pattern, unsigned a, unsigned b) {
  return std::string(pattern == DriftPattern::gradual ? "G_" : "R_") + std::to_string(a) + std::to_string(b);
}

}  // namespace sgdrift
