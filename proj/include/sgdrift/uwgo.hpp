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
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sgdrift/butterfly.hpp"

namespace sgdrift {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle into [0, 2pi).
inline double wrap_phase(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

struct Oscillator {
  ButterflyKey key;
  std::uint32_t id = 0;
  double theta = 0.0;
  double omega = 0.0;
};

struct Coupling {
  std::size_t neighbor = 0;
  double weight = 0.0;
};

/// Unipartite weighted graph of oscillators, one vertex per young butterfly.
/// Cumulative across windows; only vertex attributes are refreshed per window.
class OscillatorGraph {
 public:
  /// Returns the vertex index for key, creating it with theta = omega = 0 when absent.
  std::size_t add_vertex(const ButterflyKey& key) {
    auto [it, fresh] = index_.try_emplace(key, vertices_.size());
    if (fresh) {
      vertices_.push_back(Oscillator{key, butterfly_hash(key), 0.0, 0.0});
      adjacency_.emplace_back();
    }
    return it->second;
  }

  /// Undirected edge; ignored (returns false) for self-loops and existing edges.
  bool add_edge(std::size_t u, std::size_t v, double weight) {
    if (u == v) return false;
    std::uint64_t code = u < v ? (std::uint64_t{u} << 32 | v) : (std::uint64_t{v} << 32 | u);
    if (!edges_.insert(code).second) return false;
    adjacency_[u].push_back({v, weight});
    adjacency_[v].push_back({u, weight});
    return true;
  }

  std::optional<std::size_t> find(const ButterflyKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> weight(std::size_t u, std::size_t v) const {
    for (const auto& c : adjacency_.at(u)) {
      if (c.neighbor == v) return c.weight;
    }
    return std::nullopt;
  }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return vertices_.empty(); }

  const Oscillator& vertex(std::size_t v) const { return vertices_.at(v); }
  Oscillator& vertex(std::size_t v) { return vertices_.at(v); }
  std::span<const Oscillator> vertices() const { return vertices_; }
  std::span<const Coupling> neighbors(std::size_t v) const { return adjacency_.at(v); }

  std::vector<double> phases() const {
    std::vector<double> out;
    out.reserve(vertices_.size());
    for (const auto& o : vertices_) out.push_back(o.theta);
    return out;
  }

  /// Links each butterfly, in the given order, to the earlier butterflies of the same batch
  /// that share a j-vertex with it. L = those neighbours plus itself; every new edge gets
  /// static weight |L|. Returns the vertex index of each butterfly.
  std::vector<std::size_t> project(std::span<const ButterflyKey> young) {
    std::vector<std::size_t> placed;
    placed.reserve(young.size());
    std::unordered_map<std::uint32_t, std::vector<std::size_t>> byJ;
    std::vector<std::size_t> linked;
    for (const auto& key : young) {
      std::size_t v = add_vertex(key);
      linked.clear();
      for (VertexId j : {key.j_lo, key.j_hi}) {
        if (auto it = byJ.find(j.value); it != byJ.end()) {
          linked.insert(linked.end(), it->second.begin(), it->second.end());
        }
      }
      std::sort(linked.begin(), linked.end());
      linked.erase(std::unique(linked.begin(), linked.end()), linked.end());
      std::erase(linked, v);
      const double w = static_cast<double>(linked.size() + 1);
      for (std::size_t u : linked) add_edge(u, v, w);
      byJ[key.j_lo.value].push_back(v);
      byJ[key.j_hi.value].push_back(v);
      placed.push_back(v);
    }
    return placed;
  }

  /// theta_v = (sum of neighbour ids) mod 2pi; omega_v ~ N(0, sigma), drawn in vertex order.
  template <typename Rng>
  void assign_phases(Rng& rng, double sigma) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      std::uint64_t sum = 0;
      for (const auto& c : adjacency_[v]) sum += vertices_[c.neighbor].id;
      vertices_[v].theta = wrap_phase(static_cast<double>(sum));
      vertices_[v].omega = gauss(rng);
    }
  }

  /// Optional debug dump: one "v_id,u_id,weight" line per undirected edge.
  void write_edge_list(std::ostream& os) const {
    for (std::size_t v = 0; v < adjacency_.size(); ++v) {
      for (const auto& c : adjacency_[v]) {
        if (c.neighbor > v) {
          os << vertices_[v].id << ',' << vertices_[c.neighbor].id << ',' << c.weight << '\n';
        }
      }
    }
  }

 private:
  std::vector<Oscillator> vertices_;
  std::vector<std::vector<Coupling>> adjacency_;
  std::unordered_map<ButterflyKey, std::size_t, ButterflyKeyHash> index_;
  std::unordered_set<std::uint64_t> edges_;
};

/// |sum of e^{i theta}| / n. Throws std::invalid_argument on an empty set.
inline double order_parameter(std::span<const double> phases) {
  if (phases.empty()) throw std::invalid_argument("order parameter of an empty phase set");
  double s = 0.0, c = 0.0;
  for (double th : phases) {
    s += std::sin(th);
    c += std::cos(th);
  }
  double r = std::sqrt(s * s + c * c) / static_cast<double>(phases.size());
  return std::min(r, 1.0);
}

/// One classical RK4 step of d(theta_v)/dt = omega_v + sum_n w_vn sin(theta_n - theta_v)
/// from the given phases. Returns the per-vertex increment; the graph is not touched.
inline std::vector<double> rk4_step(const OscillatorGraph& g, std::span<const double> theta, double h) {
  const std::size_t n = g.vertex_count();
  if (theta.size() != n) throw std::invalid_argument("phase vector size does not match graph");
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");

  std::vector<double> k1(n), k2(n), k3(n), k4(n), shifted(n);
  auto rate = [&](std::span<const double> phi, std::vector<double>& k) {
    for (std::size_t v = 0; v < n; ++v) k[v] = g.vertex(v).omega;
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& c : g.neighbors(v)) {
        if (c.neighbor <= v) continue;
        double s = c.weight * std::sin(phi[c.neighbor] - phi[v]);
        k[v] += s;
        k[c.neighbor] -= s;
      }
    }
  };
  auto advance = [&](const std::vector<double>& k, double scale) {
    for (std::size_t v = 0; v < n; ++v) shifted[v] = theta[v] + scale * k[v];
  };

  rate(theta, k1);
  advance(k1, h / 2.0);
  rate(shifted, k2);
  advance(k2, h / 2.0);
  rate(shifted, k3);
  advance(k3, h);
  rate(shifted, k4);

  std::vector<double> delta(n);
  for (std::size_t v = 0; v < n; ++v) {
    delta[v] = h / 6.0 * (k1[v] + 2.0 * k2[v] + 2.0 * k3[v] + k4[v]);
  }
  return delta;
}

inline std::vector<double> rk4_step(const OscillatorGraph& g, double h = 0.01) {
  auto theta = g.phases();
  return rk4_step(g, theta, h);
}

}  // namespace sgdrift
