// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>

#include "lsfem/types.hpp"

namespace lsfem {

struct CellIndex {
  int ix = 0;
  int iy = 0;
  bool operator==(const CellIndex&) const = default;
};

// Result of point location: the containing cell and local coordinates in
// [0,1]^2. Points on shared edges are assigned deterministically (see
// UniformQuadMesh::locate).
struct Located {
  int ix = 0;
  int iy = 0;
  double sx = 0;
  double sy = 0;
};

// One step of cell-to-cell ray marching: the exit point on the boundary of
// the current cell and the neighbor the ray continues into. `next` is empty
// when the ray leaves the domain.
struct RayExit {
  Vec2 point = Vec2::Zero();
  double t = 0;  // distance from the ray origin (direction is unit length)
  std::optional<CellIndex> next;
};

// Uniform mesh of square Q1 cells over an axis-aligned box. Nodes are
// numbered lexicographically with the x index running fastest; cells
// likewise. All geometry is derived from (origin, h, nx, ny), so meshes of
// the same parameters are bit-identical.
class UniformQuadMesh {
 public:
  UniformQuadMesh(int nx, int ny, const Vec2& origin, double h);

  // (0,1)^2 with nx cells per side.
  static UniformQuadMesh unit(int nx);
  // Square box [origin, origin+extent]^2 with nx cells per side.
  static UniformQuadMesh box(int nx, const Vec2& origin, double extent);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  const Vec2& origin() const { return origin_; }
  Vec2 upper() const { return origin_ + Vec2(nx_ * h_, ny_ * h_); }

  int num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  int num_cells() const { return nx_ * ny_; }

  int node_id(int i, int j) const { return j * (nx_ + 1) + i; }
  Vec2 node_pos(int i, int j) const {
    return origin_ + Vec2(i * h_, j * h_);
  }
  Vec2 node_pos(int id) const {
    return node_pos(id % (nx_ + 1), id / (nx_ + 1));
  }

  int cell_id(int ix, int iy) const { return iy * nx_ + ix; }
  Vec2 cell_origin(int ix, int iy) const {
    return origin_ + Vec2(ix * h_, iy * h_);
  }
  // Global node ids of a cell's corners in local order
  // (0,0), (1,0), (0,1), (1,1).
  std::array<int, 4> cell_nodes(int ix, int iy) const {
    const int n0 = node_id(ix, iy);
    return {n0, n0 + 1, n0 + (nx_ + 1), n0 + (nx_ + 2)};
  }

  bool contains(const Vec2& x) const;

  // Locates the cell containing x. Coordinates within 1e-12 (in units of h)
  // of a grid line are snapped onto it; a snapped point belongs to the cell
  // where its local coordinate is 0, except on the upper domain boundary
  // where it clamps into the last cell. Returns nullopt outside the domain.
  std::optional<Located> locate(const Vec2& x) const;

  // Marches a ray (unit direction) out of the given cell: returns the exit
  // point at the smallest non-negative parameter and the neighbor entered.
  // Corner hits advance diagonally, which matches nudging the parameter by
  // +1e-12 before the neighbor lookup.
  RayExit ray_exit(const CellIndex& cell, const Vec2& origin,
                   const Vec2& direction) const;

 private:
  int nx_;
  int ny_;
  Vec2 origin_;
  double h_;
};

}  // namespace lsfem
