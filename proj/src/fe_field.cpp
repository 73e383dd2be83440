// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/fe_field.hpp"

#include <string>

namespace lsfem {

namespace {
[[noreturn]] void outside(const Vec2& x) {
  throw std::domain_error("FEField: point (" + std::to_string(x.x()) + ", " +
                          std::to_string(x.y()) + ") outside the mesh");
}
}  // namespace

double FEField::eval(const Vec2& x) const {
  const auto loc = mesh_->locate(x);
  if (!loc) outside(x);
  return eval_at(*loc);
}

Vec2 FEField::eval_grad(const Vec2& x) const {
  const auto loc = mesh_->locate(x);
  if (!loc) outside(x);
  return eval_grad_at(*loc);
}

double FEField::eval_at(const Located& loc) const {
  const auto n = mesh_->cell_nodes(loc.ix, loc.iy);
  const double v00 = coeffs_[n[0]], v10 = coeffs_[n[1]];
  const double v01 = coeffs_[n[2]], v11 = coeffs_[n[3]];
  const double s = loc.sx, t = loc.sy;
  return v00 * (1 - s) * (1 - t) + v10 * s * (1 - t) + v01 * (1 - s) * t +
         v11 * s * t;
}

Vec2 FEField::eval_grad_at(const Located& loc) const {
  const auto n = mesh_->cell_nodes(loc.ix, loc.iy);
  const double v00 = coeffs_[n[0]], v10 = coeffs_[n[1]];
  const double v01 = coeffs_[n[2]], v11 = coeffs_[n[3]];
  const double s = loc.sx, t = loc.sy;
  const double inv_h = 1.0 / mesh_->h();
  return Vec2(((v10 - v00) * (1 - t) + (v11 - v01) * t) * inv_h,
              ((v01 - v00) * (1 - s) + (v11 - v10) * s) * inv_h);
}

}  // namespace lsfem
