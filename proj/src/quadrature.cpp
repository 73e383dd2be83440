// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace lsfem {

QuadratureRule QuadratureRule::gauss(int points_per_axis) {
  // Gauss-Legendre nodes/weights on [-1,1].
  std::vector<double> xi, w;
  switch (points_per_axis) {
    case 1:
      xi = {0.0};
      w = {2.0};
      break;
    case 2:
      xi = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
      w = {1.0, 1.0};
      break;
    case 3:
      xi = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      xi = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    default:
      throw std::invalid_argument("QuadratureRule::gauss: 1..4 points per axis");
  }

  QuadratureRule rule;
  rule.degree = 2 * points_per_axis - 1;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      // map [-1,1] -> [0,1]; the 1/2 per axis scales the weights to sum to 1
      rule.points.emplace_back(0.5 * (1.0 + xi[i]), 0.5 * (1.0 + xi[j]));
      rule.weights.push_back(0.25 * w[i] * w[j]);
    }
  }
  return rule;
}

}  // namespace lsfem
