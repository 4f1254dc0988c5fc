#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "infoshare/game.hpp"

namespace testing {

inline infoshare::ActionProfile P(std::vector<std::uint8_t> bits) { return infoshare::ActionProfile(std::move(bits)); }

inline infoshare::GameSpec example_two_firm(double alpha = 0.9, double epsilon = 0.1, double discount = 0.9) {
  return infoshare::linear_game(2, 3.0, 1.0, alpha, epsilon, discount);
}

/// Random (alpha, epsilon) with alpha - epsilon >= min_gap.
inline std::pair<double, double> random_accuracy(std::mt19937_64& rng, double min_gap = 0.05) {
  std::uniform_real_distribution<double> eps(0.01, 0.49);
  std::uniform_real_distribution<double> alp(0.51, 0.99);
  for (;;) {
    double a = alp(rng), e = eps(rng);
    if (a - e >= min_gap) return {a, e};
  }
}

}  // namespace testing
