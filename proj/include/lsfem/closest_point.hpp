// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "lsfem/level_set.hpp"
#include "lsfem/mesh.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

enum class CpStatus {
  kOk,
  kDegenerateNormal,  // |q(x)| too small to define a direction
  kNoInterface,       // ray left the domain without a sign change
  kSearchFailure,     // step budget exhausted / no bracket found
  kOutsideDomain,     // query point not in the mesh
};

// Result of projecting a query point onto the zero level set along the
// navigation direction. With n = -q(x)/|q(x)| the ray is
//
//   x(s) = x_query + s * sign(phi(x_query)) * n,   s >= 0,
//
// and x_interface = x(xi) is its first interface crossing. x_shifted is the
// interior evaluation point x_interface - eps * normal.
struct ClosestPointResult {
  Vec2 x_query = Vec2::Zero();
  Vec2 x_interface = Vec2::Zero();
  Vec2 normal = Vec2::Zero();  // unit, points out of the phi > 0 region
  Vec2 x_shifted = Vec2::Zero();
  double xi = 0;
  int steps = 0;
  CpStatus status = CpStatus::kOk;

  bool ok() const { return status == CpStatus::kOk; }
};

// Cell-to-cell marching: follows the ray through the mesh and solves for the
// crossing inside the first cell where the level set changes sign. On a
// discrete field the restriction to a straight segment is quadratic and is
// solved in closed form (smaller root on a double crossing); on an analytic
// field the bracket is bisected 30 times.
ClosestPointResult closest_point_traversal(const LevelSetField& ls,
                                           const UniformQuadMesh& mesh,
                                           const Vec2& x_query, double eps);

// Bracketing along the same ray: starting from the level set value as a
// distance estimate, brackets [s* - m h, s* + m h] grow until the sign
// changes, then bisection reduces the interval below 1e-12.
ClosestPointResult closest_point_bisection(const LevelSetField& ls,
                                           const UniformQuadMesh& mesh,
                                           const Vec2& x_query, double eps);

enum class SearchAlgo { kTraversal, kBisection };

inline ClosestPointResult closest_point(SearchAlgo algo,
                                        const LevelSetField& ls,
                                        const UniformQuadMesh& mesh,
                                        const Vec2& x_query, double eps) {
  return algo == SearchAlgo::kTraversal
             ? closest_point_traversal(ls, mesh, x_query, eps)
             : closest_point_bisection(ls, mesh, x_query, eps);
}

// Geometry attached to a successful search that downstream evaluations reuse
// per query point: pre-located evaluation points and the interface tangent
// (the normal rotated 90 degrees counterclockwise).
struct CachedPoint {
  ClosestPointResult cp;
  Vec2 tangent = Vec2::Zero();
  std::optional<Located> at_interface;  // x_interface
  std::optional<Located> at_shifted;    // x_shifted
  std::optional<Located> at_stencil_m;  // x_shifted - eps/2 * tangent
  std::optional<Located> at_stencil_p;  // x_shifted + eps/2 * tangent
};

// Exact-coordinate memo of search results. Entries stay valid as long as the
// level set epoch is unchanged; reset(epoch) clears on mismatch. Assembly
// loops recompute quadrature point coordinates identically, so bit-exact
// keys hit reliably.
class ClosestPointCache {
 public:
  const CachedPoint* find(const Vec2& x) const;
  const CachedPoint& insert(const Vec2& x, CachedPoint entry);
  void reset(std::uint64_t epoch);
  std::size_t size() const { return map_.size(); }

 private:
  struct Key {
    std::uint64_t x;
    std::uint64_t y;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = k.x * 0x9e3779b97f4a7c15ull;
      h ^= k.y + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };
  static Key make_key(const Vec2& x);

  std::unordered_map<Key, CachedPoint, KeyHash> map_;
  std::uint64_t epoch_ = ~0ull;
};

}  // namespace lsfem
