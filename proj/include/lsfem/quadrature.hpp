// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "lsfem/types.hpp"

namespace lsfem {

// Tensor-product Gauss rule on the reference cell [0,1]^2. Weights sum to
// one (the reference-cell area); physical integrals scale by h^2.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;  // highest per-axis polynomial degree integrated exactly

  std::size_t size() const { return points.size(); }

  // n Gauss points per axis, n in [1,4].
  static QuadratureRule gauss(int points_per_axis);
};

}  // namespace lsfem
