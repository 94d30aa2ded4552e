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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgdrift/signal.hpp"
#include "sgdrift/stream_model.hpp"

namespace sgdrift {

/// Full threshold-factor schedule; the default run uses only 0.3.
inline const std::vector<double> kFullFSchedule = {1.0, 0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6, 0.5};

struct SgdpConfig {
  std::vector<double> fSchedule = {0.3};
  SuffixVariant variant = SuffixVariant::alternating;
};

/// Burst-size drift check. `series` ends with the current Bbar; the suffix examined is the
/// S entries before it. Signals (and appends W to Wd) when the count of suffix entries
/// strictly greater, or strictly less, than Bbar reaches ceil(S*f).
inline std::optional<DriftSignal> cds_bursts(double Bmax, double Bbar, std::span<const double> series,
                                             std::uint64_t W, std::uint64_t t, std::vector<std::uint64_t>& Wd,
                                             double f, SuffixVariant variant = SuffixVariant::alternating) {
  if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("threshold factor must be in (0, 1]");
  const std::uint64_t d = Wd.size();
  const std::uint64_t S = suffix_size(Bmax, Bbar, d, variant);
  if (series.size() < S + 1) return std::nullopt;

  auto suffix = series.subspan(series.size() - 1 - S, S);
  std::uint64_t greater = 0, less = 0;
  for (double b : suffix) {
    if (b > Bbar) ++greater;
    else if (b < Bbar) ++less;
  }
  const std::uint64_t threshold = ceil_product(static_cast<double>(S), f);
  if (greater < threshold && less < threshold) return std::nullopt;

  Wd.push_back(W);
  DriftSignal sig;
  sig.mode = DetectorMode::sgdp;
  sig.t = t;
  sig.W = W;
  sig.params = {{"f", f},
                {"S", static_cast<double>(S)},
                {"threshold", static_cast<double>(threshold)},
                {"Ngreater", static_cast<double>(greater)},
                {"Nless", static_cast<double>(less)},
                {"Bbar", Bbar},
                {"Bmax", Bmax},
                {"d", static_cast<double>(d)}};
  return sig;
}

/// Payload-free drift predictor. Only the timestamp of each record is consumed.
class SgdpDetector {
 public:
  explicit SgdpDetector(SgdpConfig cfg = {}) : cfg_(std::move(cfg)) {
    for (double f : cfg_.fSchedule) {
      if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("threshold factor must be in (0, 1]");
    }
  }

  std::vector<DriftSignal> step(Timestamp tau) {
    ++t_;
    std::vector<DriftSignal> fired;
    IngestEvent ev = ingest(profile_, tau);
    if (!ev.startsWindow) return fired;

    series_.push_back(profile_.Bbar);
    for (double f : cfg_.fSchedule) {
      if (static_cast<double>(W_) - static_cast<double>(Wd_.back()) > profile_.Bbar) {
        auto sig = cds_bursts(static_cast<double>(profile_.Bmax), profile_.Bbar, series_, W_, t_, Wd_, f,
                              cfg_.variant);
        if (sig) {
          sig->wall_ms = clock_.elapsed_ms();
          fired.push_back(std::move(*sig));
        }
      }
    }
    ++W_;
    return fired;
  }

  std::vector<DriftSignal> step(const Sgr& r) { return step(r.tau); }

  const BurstProfile& profile() const { return profile_; }
  const std::vector<double>& bbar_series() const { return series_; }
  const std::vector<std::uint64_t>& drift_windows() const { return Wd_; }
  std::uint64_t window() const { return W_; }
  std::uint64_t records() const { return t_; }
  const WallClock& clock() const { return clock_; }

 private:
  SgdpConfig cfg_;
  BurstProfile profile_;
  std::vector<double> series_;
  std::vector<std::uint64_t> Wd_{0};
  std::uint64_t W_ = 1;
  std::uint64_t t_ = 0;
  WallClock clock_;
};

}  // namespace sgdrift
