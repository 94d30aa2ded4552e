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

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sgdrift/sgdrift.hpp"

namespace fixture {

inline sgdrift::Sgr rec(std::string i, std::string j, sgdrift::Timestamp tau) {
  return sgdrift::Sgr{std::move(i), std::move(j), 1.0, tau, 0};
}

/// The worked projection example: j0 is touched only at tau=1 (stale at x=0.5), the drawn
/// window at tau=2, and one fresh record at tau=3 closes the window.
inline std::vector<sgdrift::Sgr> worked_example_stream() {
  std::vector<sgdrift::Sgr> s{rec("i2", "j0", 1), rec("i3", "j0", 1)};
  const std::vector<std::pair<const char*, const char*>> drawn = {
      {"i2", "j1"},   {"i2", "j2"},   {"i3", "j1"},   {"i3", "j2"},   {"i4", "j1"},  {"i4", "j2"},  {"i5", "j2"},
      {"i5", "j3"},   {"i6", "j2"},   {"i6", "j3"},   {"i7", "j4"},   {"i8", "j5"},  {"i8", "j4"},  {"i7", "j5"},
      {"i9", "j5"},   {"i10", "j5"},  {"i10", "j6"},  {"i9", "j6"},   {"i11", "j6"}, {"i11", "j7"}, {"i12", "j6"},
      {"i12", "j7"},  {"i13", "j8"},  {"i14", "j9"},  {"i13", "j9"},  {"i14", "j8"}, {"i13", "j7"}, {"i7", "j3"}};
  for (auto [i, j] : drawn) s.push_back(rec(i, j, 2));
  s.push_back(rec("i99", "j99", 3));
  return s;
}

/// Expected young butterflies v1..v8 as (j_lo, j_hi, i_lo, i_hi) tokens.
inline const std::vector<std::array<std::string, 4>> kWorkedButterflies = {
    {"j1", "j2", "i2", "i3"},   {"j1", "j2", "i2", "i4"}, {"j1", "j2", "i3", "i4"},   {"j2", "j3", "i5", "i6"},
    {"j4", "j5", "i7", "i8"},   {"j5", "j6", "i9", "i10"}, {"j6", "j7", "i11", "i12"}, {"j8", "j9", "i13", "i14"}};

/// Random tau sequence with bursts of size 1..maxBurst and optional late arrivals.
inline std::vector<sgdrift::Timestamp> random_taus(std::mt19937_64& rng, std::size_t n, int maxBurst,
                                                   double lateProb = 0.0) {
  std::vector<sgdrift::Timestamp> out;
  std::uniform_int_distribution<int> size(1, maxBurst);
  std::bernoulli_distribution late(lateProb);
  sgdrift::Timestamp tau = 0;
  while (out.size() < n) {
    ++tau;
    int b = size(rng);
    for (int k = 0; k < b && out.size() < n; ++k) {
      if (tau > 1 && late(rng)) {
        out.push_back(std::uniform_int_distribution<sgdrift::Timestamp>(1, tau - 1)(rng));
      } else {
        out.push_back(tau);
      }
    }
  }
  return out;
}

/// Records over the given taus with random payloads drawn from small vertex pools.
inline std::vector<sgdrift::Sgr> random_records(std::mt19937_64& rng, const std::vector<sgdrift::Timestamp>& taus,
                                                int pool = 20) {
  std::uniform_int_distribution<int> v(0, pool - 1);
  std::vector<sgdrift::Sgr> out;
  for (auto tau : taus) out.push_back(rec("i" + std::to_string(v(rng)), "j" + std::to_string(v(rng)), tau));
  return out;
}

}  // namespace fixture
