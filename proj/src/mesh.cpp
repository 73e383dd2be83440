// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/mesh.hpp"

#include <cmath>
#include <limits>

namespace lsfem {

namespace {
// Snap tolerance for grid-line coordinates, in units of h.
constexpr double kSnapTol = 1e-12;
}  // namespace

UniformQuadMesh::UniformQuadMesh(int nx, int ny, const Vec2& origin, double h)
    : nx_(nx), ny_(ny), origin_(origin), h_(h) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("UniformQuadMesh: need at least 2x2 cells");
  if (!(h > 0))
    throw std::invalid_argument("UniformQuadMesh: cell size must be positive");
}

UniformQuadMesh UniformQuadMesh::unit(int nx) {
  return UniformQuadMesh(nx, nx, Vec2(0, 0), 1.0 / nx);
}

UniformQuadMesh UniformQuadMesh::box(int nx, const Vec2& origin,
                                     double extent) {
  if (!(extent > 0))
    throw std::invalid_argument("UniformQuadMesh::box: extent must be positive");
  return UniformQuadMesh(nx, nx, origin, extent / nx);
}

bool UniformQuadMesh::contains(const Vec2& x) const {
  const double sx = (x.x() - origin_.x()) / h_;
  const double sy = (x.y() - origin_.y()) / h_;
  return sx >= -kSnapTol && sy >= -kSnapTol && sx <= nx_ + kSnapTol &&
         sy <= ny_ + kSnapTol;
}

std::optional<Located> UniformQuadMesh::locate(const Vec2& x) const {
  auto snapped = [](double s) {
    const double r = std::round(s);
    return std::abs(s - r) <= kSnapTol ? r : s;
  };
  const double sx = snapped((x.x() - origin_.x()) / h_);
  const double sy = snapped((x.y() - origin_.y()) / h_);
  if (sx < 0 || sy < 0 || sx > nx_ || sy > ny_) return std::nullopt;

  // floor() assigns a grid-line coordinate to the cell that sees it at local
  // coordinate 0; at the upper boundary it clamps into the last cell.
  const int ix = std::min(static_cast<int>(std::floor(sx)), nx_ - 1);
  const int iy = std::min(static_cast<int>(std::floor(sy)), ny_ - 1);
  return Located{ix, iy, sx - ix, sy - iy};
}

RayExit UniformQuadMesh::ray_exit(const CellIndex& cell, const Vec2& origin,
                                  const Vec2& direction) const {
  const double x0 = origin_.x() + cell.ix * h_;
  const double y0 = origin_.y() + cell.iy * h_;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  double tx = kInf, ty = kInf;
  int step_x = 0, step_y = 0;
  if (direction.x() > 0) {
    tx = (x0 + h_ - origin.x()) / direction.x();
    step_x = 1;
  } else if (direction.x() < 0) {
    tx = (x0 - origin.x()) / direction.x();
    step_x = -1;
  }
  if (direction.y() > 0) {
    ty = (y0 + h_ - origin.y()) / direction.y();
    step_y = 1;
  } else if (direction.y() < 0) {
    ty = (y0 - origin.y()) / direction.y();
    step_y = -1;
  }

  const double t = std::max(0.0, std::min(tx, ty));

  RayExit out;
  out.t = t;
  out.point = origin + t * direction;

  // Step across the crossed face; an exact corner hit steps across both,
  // which is where a +1e-12 nudge of the parameter would land the ray.
  int nix = cell.ix, niy = cell.iy;
  if (tx <= ty) nix += step_x;
  if (ty <= tx) niy += step_y;

  if (nix >= 0 && nix < nx_ && niy >= 0 && niy < ny_)
    out.next = CellIndex{nix, niy};
  return out;
}

}  // namespace lsfem
