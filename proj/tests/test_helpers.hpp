// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the test suite: circular level sets, sampling helpers
// and small dense reference solves used as oracles.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "lsfem/level_set.hpp"
#include "lsfem/mesh.hpp"
#include "lsfem/types.hpp"

namespace lsfem::testing {

// Signed distance to a circle, positive inside.
inline double circle_sdf(const Vec2& x, const Vec2& c, double r) {
  return r - (x - c).norm();
}

inline LevelSetField circle_analytic(const Vec2& c, double r) {
  return LevelSetField::analytic(
      [c, r](const Vec2& x, double) { return r - (x - c).norm(); },
      [c](const Vec2& x, double) {
        const Vec2 d = x - c;
        const double rho = d.norm();
        return rho < 1e-30 ? Vec2(0, 0) : Vec2(-d / rho);
      },
      0.0);
}

inline LevelSetField circle_interpolated(const UniformQuadMesh& mesh,
                                         const Vec2& c, double r) {
  return LevelSetField::interpolated(
      mesh, [c, r](const Vec2& x, double) { return r - (x - c).norm(); },
      [c](const Vec2& x, double) {
        const Vec2 d = x - c;
        const double rho = d.norm();
        return rho < 1e-30 ? Vec2(0, 0) : Vec2(-d / rho);
      },
      0.0);
}

// Uniform point in the open unit square.
inline Vec2 random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = u(rng);
  const double b = u(rng);
  return {a, b};
}

// Draws points in the square until |phi| <= band around the r-circle.
inline Vec2 random_band_point(std::mt19937& rng, const Vec2& c, double r,
                              double band) {
  for (;;) {
    const Vec2 x = random_point(rng);
    if (std::fabs(circle_sdf(x, c, r)) <= band) return x;
  }
}

}  // namespace lsfem::testing
