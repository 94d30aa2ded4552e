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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sgdrift {

enum class DetectorMode { sgdp, sgdd };

inline std::string_view to_string(DetectorMode m) { return m == DetectorMode::sgdp ? "sgdp" : "sgdd"; }

inline DetectorMode parse_mode(std::string_view s) {
  if (s == "sgdp") return DetectorMode::sgdp;
  if (s == "sgdd") return DetectorMode::sgdd;
  throw std::invalid_argument("unknown detector mode: " + std::string(s));
}

/// One emitted drift signal. t and W are reproducible; wall_ms is not.
struct DriftSignal {
  DetectorMode mode = DetectorMode::sgdp;
  std::uint64_t t = 0;
  std::uint64_t W = 0;
  double wall_ms = 0.0;
  std::map<std::string, double> params;

  /// Equality on everything except wall-clock time.
  bool same_position(const DriftSignal& o) const {
    return mode == o.mode && t == o.t && W == o.W && params == o.params;
  }
};

/// Exponent choice for the suffix size.
enum class SuffixVariant {
  alternating,  ///< ratio^{(-1)^{d+1}}: the detector-check form (default)
  flipped,      ///< ratio^{(-1)^{d}}: exponent sign reversed
};

inline SuffixVariant parse_suffix_variant(std::string_view s) {
  if (s == "alternating" || s == "default") return SuffixVariant::alternating;
  if (s == "flipped") return SuffixVariant::flipped;
  throw std::invalid_argument("unknown suffix variant: " + std::string(s));
}

inline std::string_view to_string(SuffixVariant v) {
  return v == SuffixVariant::alternating ? "alternating" : "flipped";
}

/// S = ceil( (floor(log10 max(maxB,100)) / floor(log10 max(Bbar,10)))^e ), clamped to >= 1,
/// where e = (-1)^{d+1} (alternating) or (-1)^d (flipped). d is the drift-log size.
inline std::uint64_t suffix_size(double maxB, double Bbar, std::uint64_t d,
                                 SuffixVariant variant = SuffixVariant::alternating) {
  const double num = std::floor(std::log10(std::max(maxB, 100.0)));
  const double den = std::floor(std::log10(std::max(Bbar, 10.0)));
  const bool even = (d % 2) == 0;
  // (-1)^{d+1} is +1 for odd d.
  const bool positive = variant == SuffixVariant::alternating ? !even : even;
  const double ratio = positive ? num / den : den / num;
  const double s = std::ceil(ratio - 1e-9);
  return s < 1.0 ? 1 : static_cast<std::uint64_t>(s);
}

/// ceil(a*b), tolerant of products that land a hair above an integer.
inline std::uint64_t ceil_product(double a, double b) {
  double p = std::ceil(a * b - 1e-9);
  return p < 0.0 ? 0 : static_cast<std::uint64_t>(p);
}

/// Milliseconds since a detector's construction.
class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }
  std::chrono::steady_clock::time_point start() const { return start_; }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sgdrift
