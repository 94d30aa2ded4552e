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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sgdrift {

/// Source-assigned generation timestamp. Opaque: only equality and first-seen order matter.
using Timestamp = std::int64_t;

/// One streaming graph record: edge (i, j, omega) generated at tau, arriving as the t-th record.
struct Sgr {
  std::string i;
  std::string j;
  double omega = 0.0;
  Timestamp tau = 0;
  std::uint64_t t = 0;

  friend bool operator==(const Sgr&, const Sgr&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int field, const std::string& what)
      : std::runtime_error(what), field_(field) {}

  /// 1-based field number, 0 when the record shape itself is wrong.
  int field() const noexcept { return field_; }

 private:
  int field_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  // from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses "i,j,omega,tau". Returns nullopt for blank lines; throws ParseError naming the bad field.
/// The arrival index t is left for the caller's counter.
inline std::optional<Sgr> parse_sgr(std::string_view line, char delim = ',') {
  if (detail::trim(line).empty()) return std::nullopt;
  auto fields = detail::split(line, delim);
  if (fields.size() != 4) {
    throw ParseError(0, "expected 4 fields, got " + std::to_string(fields.size()));
  }
  if (fields[0].empty()) throw ParseError(1, "field 1 (i): empty vertex id");
  if (fields[1].empty()) throw ParseError(2, "field 2 (j): empty vertex id");
  auto omega = detail::parse_double(fields[2]);
  if (!omega) throw ParseError(3, "field 3 (omega): not a real number: '" + std::string(fields[2]) + "'");
  auto tau = detail::parse_int(fields[3]);
  if (!tau) throw ParseError(4, "field 4 (tau): not an integer: '" + std::string(fields[3]) + "'");
  return Sgr{std::string(fields[0]), std::string(fields[1]), *omega, *tau, 0};
}

/// Unique timestamps in first-seen order with O(1) membership and position lookup.
class TimestampHistory {
 public:
  bool contains(Timestamp tau) const { return position_.contains(tau); }

  /// Inserts tau if unseen; returns true when it was new.
  bool insert(Timestamp tau) {
    auto [it, fresh] = position_.try_emplace(tau, offset_ + order_.size());
    if (fresh) order_.push_back(tau);
    return fresh;
  }

  std::size_t size() const { return order_.size(); }
  const std::vector<Timestamp>& ordered() const { return order_; }

  /// First-seen rank of tau over the whole history (including compacted entries).
  std::optional<std::size_t> rank(Timestamp tau) const {
    auto it = position_.find(tau);
    if (it == position_.end()) return std::nullopt;
    return it->second;
  }

  /// Total timestamps ever inserted.
  std::size_t total() const { return offset_ + order_.size(); }

  /// Compaction hook: forget all but the newest `keep` timestamps. Off unless called.
  /// A forgotten timestamp arriving again is treated as new.
  void compact(std::size_t keep) {
    if (order_.size() <= keep) return;
    std::size_t drop = order_.size() - keep;
    for (std::size_t k = 0; k < drop; ++k) position_.erase(order_[k]);
    order_.erase(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(drop));
    offset_ += drop;
  }

 private:
  std::vector<Timestamp> order_;
  std::unordered_map<Timestamp, std::size_t> position_;
  std::size_t offset_ = 0;
};

/// Online burstiness state. Starts at B=1, Bbar=0, Bmax=0, Bcount=0.
struct BurstProfile {
  std::uint64_t B = 1;
  double Bbar = 0.0;
  std::uint64_t Bmax = 0;
  std::uint64_t Bcount = 0;
  TimestampHistory seen;
};

struct ProfileSnapshot {
  std::uint64_t B = 1;
  double Bbar = 0.0;
  std::uint64_t Bmax = 0;
  std::uint64_t Bcount = 0;

  friend bool operator==(const ProfileSnapshot&, const ProfileSnapshot&) = default;
};

struct IngestEvent {
  bool newTimestamp = false;
  /// tau unseen and more than one timestamp seen before this record.
  bool startsWindow = false;
  ProfileSnapshot profile;

  friend bool operator==(const IngestEvent&, const IngestEvent&) = default;
};

/// One step of the burst-profile update. Bcount is the history size before this record;
/// a late arrival of an old tau grows the current burst counter. tau is recorded in the
/// history before returning.
inline IngestEvent ingest(BurstProfile& p, Timestamp tau) {
  p.Bcount = p.seen.size();
  const bool fresh = !p.seen.contains(tau);
  if (!fresh) {
    ++p.B;
  } else {
    const double n = static_cast<double>(p.Bcount);
    p.Bbar = (p.Bbar * n + static_cast<double>(p.B)) / (n + 1.0);
    p.B = 1;
  }
  if (p.B > p.Bmax) p.Bmax = p.B;
  p.seen.insert(tau);

  IngestEvent ev;
  ev.newTimestamp = fresh;
  ev.startsWindow = fresh && p.Bcount > 1;
  ev.profile = {p.B, p.Bbar, p.Bmax, p.Bcount};
  return ev;
}

inline IngestEvent ingest(BurstProfile& p, const Sgr& r) { return ingest(p, r.tau); }

/// A record labelled with its arrival time point, for offline burst segmentation.
struct TimedRecord {
  Sgr record;
  std::int64_t arrival = 0;
};

struct Burst {
  Timestamp tau = 0;
  std::int64_t arrival = 0;
  std::vector<Sgr> records;
};

/// Groups records sharing (tau, arrival time); groups are ordered by their first member.
/// Offline oracle for burst boundaries; the online path uses ingest().
inline std::vector<Burst> segment_bursts(const std::vector<TimedRecord>& records) {
  struct PairHash {
    std::size_t operator()(const std::pair<Timestamp, std::int64_t>& k) const noexcept {
      return std::hash<std::int64_t>{}(k.first * 1000003 ^ k.second);
    }
  };
  std::unordered_map<std::pair<Timestamp, std::int64_t>, std::size_t, PairHash> slot;
  std::vector<Burst> bursts;
  for (const auto& tr : records) {
    auto key = std::make_pair(tr.record.tau, tr.arrival);
    auto [it, fresh] = slot.try_emplace(key, bursts.size());
    if (fresh) bursts.push_back(Burst{tr.record.tau, tr.arrival, {}});
    bursts[it->second].records.push_back(tr.record);
  }
  return bursts;
}

}  // namespace sgdrift
