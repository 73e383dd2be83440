// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "lsfem/fe_field.hpp"
#include "lsfem/quadrature.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

// Nodal approximation of the normalized level set gradient, computed with
// lumped weighted averages:
//
//   q_j = ( ∫ grad(phi_h) w_j dx ) / ( ∫ sqrt(|grad(phi_h)|^2 + sigma^2) w_j dx )
//
// The sigma floor keeps the denominator positive where grad(phi_h) vanishes;
// away from critical points |q_j| <= 1 up to O(sigma).
struct AveragedGradient {
  Eigen::Matrix<double, Eigen::Dynamic, 2> q;
  double sigma = 1e-3;
  const UniformQuadMesh* mesh = nullptr;

  Vec2 eval(const Vec2& x) const;
  Vec2 eval_at(const Located& loc) const;
};

AveragedGradient averaged_gradient(const FEField& phi, double sigma,
                                   const QuadratureRule& quad);

// A level set description of the embedded geometry: phi > 0 inside the
// physical domain. Three flavours share one interface:
//
//  - analytic:       phi and its gradient given in closed form;
//  - interpolated:   closed form plus a maintained nodal interpolant, so
//                    root solves along rays act on the discrete field while
//                    integrand weights use the exact values;
//  - finite_element: a purely discrete field (e.g. advected numerically),
//                    with the navigation direction q from averaged_gradient.
//
// epoch() changes whenever the observable field changes; caches key on it.
class LevelSetField {
 public:
  using ScalarFn = std::function<double(const Vec2&, double)>;
  using VectorFn = std::function<Vec2(const Vec2&, double)>;

  static LevelSetField analytic(ScalarFn phi, VectorFn grad_phi, double t0);
  static LevelSetField interpolated(const UniformQuadMesh& mesh, ScalarFn phi,
                                    VectorFn grad_phi, double t0);
  static LevelSetField finite_element(FEField phi_h, double sigma,
                                      const QuadratureRule& quad,
                                      double t0 = 0);

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  // Navigation direction: the normalized exact gradient when available,
  // otherwise the interpolated averaged gradient (not normalized).
  Vec2 q(const Vec2& x) const;

  // Value used by root solves along rays: the discrete field when one is
  // maintained (its zero level set is what searches must hit), else the
  // analytic value.
  double cp_value(const Vec2& x) const;
  double cp_value_at(const Located& loc) const;

  bool has_fe() const { return static_cast<bool>(fe_); }
  const FEField& fe() const { return *fe_; }
  const AveragedGradient* averaged() const {
    return avg_q_ ? &*avg_q_ : nullptr;
  }
  const UniformQuadMesh* mesh() const;

  double time() const { return time_; }
  std::uint64_t epoch() const { return epoch_; }

  // Moves an analytic/interpolated field to a new time level (the
  // interpolant is refreshed). Not meaningful for finite_element fields.
  void set_time(double t);

  // Replaces the discrete field (finite_element mode), recomputing q.
  void replace_field(FEField phi_h, const QuadratureRule& quad);

 private:
  LevelSetField() = default;
  void bump_epoch();

  ScalarFn phi_;
  VectorFn grad_phi_;
  std::shared_ptr<FEField> fe_;
  std::shared_ptr<AveragedGradient> avg_q_;
  double sigma_ = 1e-3;
  double time_ = 0;
  std::uint64_t epoch_ = 0;
};

// ∫ delta_eps(phi) |grad(phi)| dx over the mesh: the regularized measure of
// the zero level set.
double interface_measure(const LevelSetField& ls, const UniformQuadMesh& mesh,
                         double eps, const QuadratureRule& quad);

}  // namespace lsfem
