// Generates a short gradual-drift stream in memory and runs both detectors over it.
#include <iostream>

#include "sgdrift/sgdrift.hpp"

int main() {
  sgdrift::GeneratorConfig gen;
  gen.seed = 7;
  sgdrift::DriftSchedule schedule{sgdrift::DriftPattern::gradual, 5000};
  auto stream = sgdrift::generate(gen, schedule, 25000);

  sgdrift::SgdpDetector sgdp;
  sgdrift::SgddDetector sgdd;
  std::size_t predicted = 0, detected = 0;
  for (const auto& r : stream.records) {
    for (const auto& s : sgdp.step(r)) {
      ++predicted;
      std::cout << sgdrift::to_json_line(s) << '\n';
    }
    if (auto s = sgdd.step(r)) {
      ++detected;
      std::cout << sgdrift::to_json_line(*s) << '\n';
    }
  }
  std::cout << "CDs at:";
  for (auto c : stream.truth.cdIndices) std::cout << ' ' << c;
  std::cout << "\nsgdp signals: " << predicted << ", sgdd signals: " << detected
            << ", oscillators: " << sgdd.graph().vertex_count() << '\n';
}
