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
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sgdrift/stream_model.hpp"

namespace sgdrift {

/// Dense id of a vertex within one partition, assigned in first-arrival order.
struct VertexId {
  std::uint32_t value = 0;

  friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

/// Maps vertex tokens of one partition to dense ids. Ids never change once assigned.
class VertexInterner {
 public:
  VertexId intern(std::string_view token) {
    auto it = ids_.find(std::string(token));
    if (it != ids_.end()) return it->second;
    VertexId id{static_cast<std::uint32_t>(tokens_.size())};
    tokens_.emplace_back(token);
    ids_.emplace(tokens_.back(), id);
    return id;
  }

  const std::string& token(VertexId id) const { return tokens_.at(id.value); }
  std::size_t size() const { return tokens_.size(); }

 private:
  std::unordered_map<std::string, VertexId> ids_;
  std::vector<std::string> tokens_;
};

/// Canonical (2,2)-biclique {i_lo,i_hi} x {j_lo,j_hi}. Ordered by the j-pair first.
struct ButterflyKey {
  VertexId i_lo, i_hi;
  VertexId j_lo, j_hi;

  static ButterflyKey make(VertexId ia, VertexId ib, VertexId ja, VertexId jb) {
    if (ib < ia) std::swap(ia, ib);
    if (jb < ja) std::swap(ja, jb);
    return {ia, ib, ja, jb};
  }

  friend bool operator==(const ButterflyKey&, const ButterflyKey&) = default;
  friend auto operator<=>(const ButterflyKey& a, const ButterflyKey& b) {
    if (auto c = a.j_lo <=> b.j_lo; c != 0) return c;
    if (auto c = a.j_hi <=> b.j_hi; c != 0) return c;
    if (auto c = a.i_lo <=> b.i_lo; c != 0) return c;
    return a.i_hi <=> b.i_hi;
  }
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seed-free 32-bit hash of a key: splitmix64 over (i_lo,i_hi) then (j_lo,j_hi), xor-folded.
/// Distinct keys may collide.
constexpr std::uint32_t butterfly_hash(const ButterflyKey& k) {
  std::uint64_t ipair = (std::uint64_t{k.i_lo.value} << 32) | k.i_hi.value;
  std::uint64_t jpair = (std::uint64_t{k.j_lo.value} << 32) | k.j_hi.value;
  std::uint64_t h = detail::splitmix64(detail::splitmix64(ipair) ^ jpair);
  return static_cast<std::uint32_t>(h ^ (h >> 32));
}

struct ButterflyKeyHash {
  std::size_t operator()(const ButterflyKey& k) const noexcept {
    std::uint64_t ipair = (std::uint64_t{k.i_lo.value} << 32) | k.i_hi.value;
    std::uint64_t jpair = (std::uint64_t{k.j_lo.value} << 32) | k.j_hi.value;
    return static_cast<std::size_t>(detail::splitmix64(detail::splitmix64(ipair) ^ jpair));
  }
};

/// Number of timestamps in the young suffix: ceil(x * n), at least one when n > 0.
inline std::size_t young_suffix_length(std::size_t n, double x) {
  if (n == 0) return 0;
  auto k = static_cast<std::size_t>(std::ceil(x * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

/// The last ceil(x*n) timestamps of a first-seen ordered history.
inline std::unordered_set<Timestamp> young_timestamps(const std::vector<Timestamp>& orderedUnique, double x) {
  std::size_t k = young_suffix_length(orderedUnique.size(), x);
  return {orderedUnique.end() - static_cast<std::ptrdiff_t>(k), orderedUnique.end()};
}

/// Youth test against a live history without materializing the suffix set.
inline bool is_young(const TimestampHistory& history, Timestamp tau, double x) {
  auto r = history.rank(tau);
  if (!r) return false;
  std::size_t n = history.total();
  return *r >= n - young_suffix_length(n, x);
}

/// Burst-tumbled bipartite window: deduplicated (i,j) edges plus the tau of the latest
/// record touching each j-vertex.
class BipartiteWindow {
 public:
  /// Returns false when (i,j) was already present; the j timestamp is refreshed either way.
  bool add_edge(VertexId i, VertexId j, Timestamp tau) {
    jTimestamp_[j.value] = tau;
    std::uint64_t code = (std::uint64_t{i.value} << 32) | j.value;
    if (!edges_.insert(code).second) return false;
    jNeighbors_[j.value].push_back(i);
    iNeighbors_[i.value].push_back(j);
    return true;
  }

  bool contains(VertexId i, VertexId j) const {
    return edges_.contains((std::uint64_t{i.value} << 32) | j.value);
  }

  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  std::optional<Timestamp> j_timestamp(VertexId j) const {
    auto it = jTimestamp_.find(j.value);
    if (it == jTimestamp_.end()) return std::nullopt;
    return it->second;
  }

  /// Drops all contents and releases their storage.
  void clear() {
    BipartiteWindow empty;
    std::swap(*this, empty);
  }

  const std::unordered_map<std::uint32_t, std::vector<VertexId>>& j_neighbors() const { return jNeighbors_; }
  const std::unordered_map<std::uint32_t, std::vector<VertexId>>& i_neighbors() const { return iNeighbors_; }

 private:
  std::unordered_set<std::uint64_t> edges_;
  std::unordered_map<std::uint32_t, std::vector<VertexId>> jNeighbors_;
  std::unordered_map<std::uint32_t, std::vector<VertexId>> iNeighbors_;
  std::unordered_map<std::uint32_t, Timestamp> jTimestamp_;
};

/// Enumerates every butterfly whose two j-vertices are young, in sorted canonical order.
/// Wedge-based: for each young j_a, walk i in N(j_a) and j_b in N(i) with j_b > j_a to
/// collect common neighbours, then emit one key per common-neighbour pair.
template <typename YoungPredicate>
  requires std::predicate<YoungPredicate&, Timestamp>
std::vector<ButterflyKey> enumerate_young(const BipartiteWindow& window, YoungPredicate&& young) {
  std::unordered_map<std::uint32_t, bool> youth;
  auto is_young_j = [&](std::uint32_t j) {
    auto [it, fresh] = youth.try_emplace(j, false);
    if (fresh) {
      auto ts = window.j_timestamp(VertexId{j});
      it->second = ts && young(*ts);
    }
    return it->second;
  };

  std::vector<ButterflyKey> out;
  std::unordered_map<std::uint32_t, std::vector<VertexId>> common;
  for (const auto& [ja, ineigh] : window.j_neighbors()) {
    if (ineigh.size() < 2 || !is_young_j(ja)) continue;
    common.clear();
    for (VertexId i : ineigh) {
      for (VertexId jb : window.i_neighbors().at(i.value)) {
        if (jb.value <= ja) continue;
        common[jb.value].push_back(i);
      }
    }
    for (auto& [jb, shared] : common) {
      if (shared.size() < 2 || !is_young_j(jb)) continue;
      for (std::size_t a = 0; a < shared.size(); ++a) {
        for (std::size_t b = a + 1; b < shared.size(); ++b) {
          out.push_back(ButterflyKey::make(shared[a], shared[b], VertexId{ja}, VertexId{jb}));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<ButterflyKey> enumerate_young(const BipartiteWindow& window,
                                                 const std::unordered_set<Timestamp>& young) {
  return enumerate_young(window, [&](Timestamp tau) { return young.contains(tau); });
}

}  // namespace sgdrift
