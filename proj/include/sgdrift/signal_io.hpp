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

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdrift/signal.hpp"

namespace sgdrift {

// JSON-lines signal format: {"mode":..,"t":..,"W":..,"wall_ms":..,"params":{..}}

inline nlohmann::json to_json(const DriftSignal& s) {
  return {{"mode", std::string(to_string(s.mode))}, {"t", s.t}, {"W", s.W}, {"wall_ms", s.wall_ms},
          {"params", s.params}};
}

inline DriftSignal signal_from_json(const nlohmann::json& j) {
  DriftSignal s;
  s.mode = parse_mode(j.at("mode").get<std::string>());
  s.t = j.at("t").get<std::uint64_t>();
  s.W = j.at("W").get<std::uint64_t>();
  s.wall_ms = j.value("wall_ms", 0.0);
  if (j.contains("params")) s.params = j.at("params").get<std::map<std::string, double>>();
  return s;
}

inline std::string to_json_line(const DriftSignal& s) { return to_json(s).dump(); }

/// Reads a JSON-lines signal file; blank lines are skipped.
inline std::vector<DriftSignal> read_signals(std::istream& is) {
  std::vector<DriftSignal> out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(signal_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("signal line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sgdrift
