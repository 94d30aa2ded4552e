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
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "sgdrift/genstream.hpp"
#include "sgdrift/signal.hpp"
#include "sgdrift/stream_model.hpp"

namespace sgdrift {

class DeterminismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeStat {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stddev = std::numeric_limits<double>::quiet_NaN();

  bool known() const { return !std::isnan(mean); }
};

/// Distances between one CD and the first/last signal attributed to it.
struct CdReport {
  std::uint64_t index = 0;
  std::size_t signals = 0;
  std::optional<std::uint64_t> firstSgr, lastSgr;
  TimeStat firstMs, lastMs;

  bool missed() const { return signals == 0; }
};

/// Signals within one drift interval after the final CD, measured forward from it.
struct AfterReport {
  std::size_t signals = 0;
  std::optional<std::uint64_t> firstSgr, lastSgr;
  TimeStat firstMs, lastMs;
};

struct EvalReport {
  std::vector<CdReport> cds;
  AfterReport after;
  std::size_t falsePositives = 0;
  std::size_t falseNegatives = 0;
  std::size_t runs = 1;
};

/// Attributes each signal to the next CD: CD k collects signals with t in (c_{k-1}, c_k].
/// Signals past the last CD count in `after` up to one drift interval, then as false positives
/// (all go to `after` when the interval is unknown). `cdWallMs`, when given, holds the
/// clock reading at ingestion of each CD record and fills the single-run ms distances.
inline EvalReport distances(std::span<const DriftSignal> signals, const GroundTruth& truth,
                            std::span<const double> cdWallMs = {}) {
  if (truth.cdIndices.empty()) throw std::invalid_argument("ground truth has no CDs");
  for (std::size_t k = 1; k < signals.size(); ++k) {
    if (signals[k].t < signals[k - 1].t) throw std::invalid_argument("signals are not sorted by t");
  }
  for (std::size_t k = 1; k < truth.cdIndices.size(); ++k) {
    if (truth.cdIndices[k] <= truth.cdIndices[k - 1]) throw std::invalid_argument("CD indices are not increasing");
  }
  const bool timed = !cdWallMs.empty();
  if (timed && cdWallMs.size() != truth.cdIndices.size()) {
    throw std::invalid_argument("one wall-clock reading per CD expected");
  }

  EvalReport rep;
  std::size_t s = 0;
  for (std::size_t k = 0; k < truth.cdIndices.size(); ++k) {
    CdReport cd;
    cd.index = truth.cdIndices[k];
    const DriftSignal* first = nullptr;
    const DriftSignal* last = nullptr;
    // Earlier buckets consumed everything up to c_{k-1}.
    while (s < signals.size() && signals[s].t <= cd.index) {
      if (!first) first = &signals[s];
      last = &signals[s];
      ++cd.signals;
      ++s;
    }
    if (first) {
      cd.firstSgr = cd.index - first->t;
      cd.lastSgr = cd.index - last->t;
      if (timed) {
        cd.firstMs = {cdWallMs[k] - first->wall_ms, 0.0};
        cd.lastMs = {cdWallMs[k] - last->wall_ms, 0.0};
      }
    } else {
      ++rep.falseNegatives;
    }
    rep.cds.push_back(cd);
  }

  const std::uint64_t lastCd = truth.cdIndices.back();
  for (; s < signals.size(); ++s) {
    const auto& sig = signals[s];
    const std::uint64_t ahead = sig.t - lastCd;
    if (truth.deltaR != 0 && ahead > truth.deltaR) {
      ++rep.falsePositives;
      continue;
    }
    if (rep.after.signals == 0) {
      rep.after.firstSgr = ahead;
      if (timed) rep.after.firstMs = {sig.wall_ms - cdWallMs.back(), 0.0};
    }
    rep.after.lastSgr = ahead;
    if (timed) rep.after.lastMs = {sig.wall_ms - cdWallMs.back(), 0.0};
    ++rep.after.signals;
  }
  return rep;
}

/// Output of one end-to-end detector execution.
struct RunRecord {
  std::vector<DriftSignal> signals;
  std::vector<double> cdWallMs;
};

/// Feeds records to a detector, reading its clock right after each CD record (0-based index
/// c, arrival t = c + 1) is ingested. `hook` runs after every record.
template <typename Detector, typename Hook = void (*)(const Sgr&)>
RunRecord run_detector(Detector& detector, std::span<const Sgr> records, const GroundTruth& truth,
                       Hook hook = [](const Sgr&) {}) {
  RunRecord out;
  std::size_t nextCd = 0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    auto fired = detector.step(records[k]);
    if constexpr (std::is_same_v<decltype(fired), std::optional<DriftSignal>>) {
      if (fired) out.signals.push_back(std::move(*fired));
    } else {
      for (auto& f : fired) out.signals.push_back(std::move(f));
    }
    while (nextCd < truth.cdIndices.size() && truth.cdIndices[nextCd] == k) {
      out.cdWallMs.push_back(detector.clock().elapsed_ms());
      ++nextCd;
    }
    hook(records[k]);
  }
  while (out.cdWallMs.size() < truth.cdIndices.size()) out.cdWallMs.push_back(detector.clock().elapsed_ms());
  return out;
}

namespace detail {

inline bool same_sgr_distances(const EvalReport& a, const EvalReport& b) {
  if (a.cds.size() != b.cds.size()) return false;
  for (std::size_t k = 0; k < a.cds.size(); ++k) {
    const auto &x = a.cds[k], &y = b.cds[k];
    if (x.signals != y.signals || x.firstSgr != y.firstSgr || x.lastSgr != y.lastSgr) return false;
  }
  return a.after.signals == b.after.signals && a.after.firstSgr == b.after.firstSgr &&
         a.after.lastSgr == b.after.lastSgr && a.falsePositives == b.falsePositives;
}

struct Accumulator {
  std::vector<double> samples;

  void add(const TimeStat& s) {
    if (s.known()) samples.push_back(s.mean);
  }
  TimeStat stat() const {
    if (samples.empty()) return {};
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    double sd = samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0;
    return {mean, sd};
  }
};

}  // namespace detail

/// Runs the detector `runs` times in `batches` equal batches, each preceded by one discarded
/// warm-up execution, and aggregates ms distances (mean, sample std). SGR distances must be
/// identical across runs; a mismatch throws DeterminismError.
inline EvalReport repeated_timing(const std::function<RunRecord()>& runner, const GroundTruth& truth,
                                  std::size_t runs = 100, std::size_t batches = 10) {
  if (runs == 0 || batches == 0 || runs % batches != 0) {
    throw std::invalid_argument("runs must be a positive multiple of batches");
  }
  const std::size_t perBatch = runs / batches;
  std::optional<EvalReport> reference;
  std::vector<detail::Accumulator> first, last;
  detail::Accumulator afterFirst, afterLast;

  for (std::size_t b = 0; b < batches; ++b) {
    (void)runner();
    for (std::size_t r = 0; r < perBatch; ++r) {
      RunRecord rec = runner();
      EvalReport rep = distances(rec.signals, truth, rec.cdWallMs);
      if (!reference) {
        reference = rep;
        first.resize(rep.cds.size());
        last.resize(rep.cds.size());
      } else if (!detail::same_sgr_distances(*reference, rep)) {
        throw DeterminismError("SGR-count distances differ between runs (batch " + std::to_string(b + 1) +
                               ", run " + std::to_string(r + 1) + ")");
      }
      for (std::size_t k = 0; k < rep.cds.size(); ++k) {
        first[k].add(rep.cds[k].firstMs);
        last[k].add(rep.cds[k].lastMs);
      }
      afterFirst.add(rep.after.firstMs);
      afterLast.add(rep.after.lastMs);
    }
  }

  EvalReport out = *reference;
  out.runs = runs;
  for (std::size_t k = 0; k < out.cds.size(); ++k) {
    out.cds[k].firstMs = first[k].stat();
    out.cds[k].lastMs = last[k].stat();
  }
  out.after.firstMs = afterFirst.stat();
  out.after.lastMs = afterLast.stat();
  return out;
}

// --- serialization -------------------------------------------------------------------------

namespace detail {

inline nlohmann::json opt_json(const std::optional<std::uint64_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
inline std::optional<std::uint64_t> opt_u64(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::uint64_t>();
}
inline nlohmann::json stat_json(const TimeStat& s) {
  if (!s.known()) return nullptr;
  return {{"mean", s.mean}, {"std", s.stddev}};
}
inline TimeStat stat_from(const nlohmann::json& j) {
  if (j.is_null()) return {};
  return {j.at("mean").get<double>(), j.at("std").get<double>()};
}

}  // namespace detail

inline nlohmann::json to_json(const EvalReport& rep) {
  nlohmann::json cds = nlohmann::json::array();
  for (const auto& cd : rep.cds) {
    cds.push_back({{"index", cd.index},
                   {"signals", cd.signals},
                   {"first_sgr", detail::opt_json(cd.firstSgr)},
                   {"last_sgr", detail::opt_json(cd.lastSgr)},
                   {"first_ms", detail::stat_json(cd.firstMs)},
                   {"last_ms", detail::stat_json(cd.lastMs)}});
  }
  return {{"runs", rep.runs},
          {"cds", cds},
          {"after",
           {{"signals", rep.after.signals},
            {"first_sgr", detail::opt_json(rep.after.firstSgr)},
            {"last_sgr", detail::opt_json(rep.after.lastSgr)},
            {"first_ms", detail::stat_json(rep.after.firstMs)},
            {"last_ms", detail::stat_json(rep.after.lastMs)}}},
          {"false_positives", rep.falsePositives},
          {"false_negatives", rep.falseNegatives}};
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport rep;
  rep.runs = j.at("runs").get<std::size_t>();
  for (const auto& c : j.at("cds")) {
    CdReport cd;
    cd.index = c.at("index").get<std::uint64_t>();
    cd.signals = c.at("signals").get<std::size_t>();
    cd.firstSgr = detail::opt_u64(c.at("first_sgr"));
    cd.lastSgr = detail::opt_u64(c.at("last_sgr"));
    cd.firstMs = detail::stat_from(c.at("first_ms"));
    cd.lastMs = detail::stat_from(c.at("last_ms"));
    rep.cds.push_back(cd);
  }
  const auto& a = j.at("after");
  rep.after.signals = a.at("signals").get<std::size_t>();
  rep.after.firstSgr = detail::opt_u64(a.at("first_sgr"));
  rep.after.lastSgr = detail::opt_u64(a.at("last_sgr"));
  rep.after.firstMs = detail::stat_from(a.at("first_ms"));
  rep.after.lastMs = detail::stat_from(a.at("last_ms"));
  rep.falsePositives = j.at("false_positives").get<std::size_t>();
  rep.falseNegatives = j.at("false_negatives").get<std::size_t>();
  return rep;
}

namespace detail {

inline std::string cell(const TimeStat& ms, const std::optional<std::uint64_t>& sgr) {
  if (!sgr) return "";
  std::ostringstream os;
  if (ms.known()) {
    os << std::fixed << std::setprecision(2) << ms.mean;
  } else {
    os << '-';
  }
  os << '/' << *sgr;
  return os.str();
}

}  // namespace detail

/// Tab-separated "ms/SGR" table: one row, columns d_kf, d_kl per CD, then the after-last pair.
/// Empty cells mark CDs without signals; '-' marks unknown ms.
inline void write_table(std::ostream& os, const EvalReport& rep, const std::string& rowLabel = "stream") {
  os << "ms/SGR";
  for (std::size_t k = 1; k <= rep.cds.size(); ++k) os << "\td_" << k << "f\td_" << k << "l";
  os << "\tafter_f\tafter_l\tfp\tfn\n";
  os << rowLabel;
  for (const auto& cd : rep.cds) {
    os << '\t' << detail::cell(cd.firstMs, cd.firstSgr) << '\t' << detail::cell(cd.lastMs, cd.lastSgr);
  }
  os << '\t' << detail::cell(rep.after.firstMs, rep.after.firstSgr) << '\t'
     << detail::cell(rep.after.lastMs, rep.after.lastSgr) << '\t' << rep.falsePositives << '\t'
     << rep.falseNegatives << '\n';
}

}  // namespace sgdrift
