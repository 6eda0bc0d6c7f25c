#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace frem {

// Finite-difference verification of every hand-written gradient path.
// `corruption`, when nonzero, is added to one analytic gradient entry so
// the harness itself can be tested.
struct GradCheckReport {
  struct Component {
    std::string name;
    double max_relative_error = 0.0;
  };
  std::vector<Component> components;
  double tolerance = 1e-4;

  [[nodiscard]] bool passed() const {
    for (const auto& c : components) {
      if (!(c.max_relative_error < tolerance)) return false;
    }
    return true;
  }
};

GradCheckReport run_gradient_checks(std::uint64_t seed, int num_seeds = 10,
                                    double corruption = 0.0);

}  // namespace frem
