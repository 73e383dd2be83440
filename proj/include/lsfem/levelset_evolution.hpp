// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "lsfem/closest_point.hpp"
#include "lsfem/fe_field.hpp"
#include "lsfem/level_set.hpp"
#include "lsfem/quadrature.hpp"
#include "lsfem/solver.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

// Parameters of the conservative level set update. The evolved equation is
//
//   d/dt S_eps(phi) + v . grad S_eps(phi) - lambda div(grad phi - q) = 0,
//
// whose penalty term relaxes phi toward a signed distance profile (grad phi
// ~ q with |q| ~ 1) while the sign function is transported.
struct EvolutionParams {
  double eps = 0;               // interface thickness
  double dt = 0;                // time step
  double lambda = 0;            // distance-penalty coefficient (h is typical)
  double sigma = 1e-3;          // averaged-gradient floor
  double mass_floor = 1e-3;     // time-term weight floor, in units of 1/eps
};

struct LevelSetState {
  FEField phi;
  AveragedGradient q;
  double t = 0;
};

LevelSetState make_level_set_state(FEField phi, double sigma,
                                   const QuadratureRule& quad, double t = 0);

// Semi-implicit step: the time term is linearized by the chain rule around
// the old field (lumped weighted mass with nodal weights
// max(2 delta_eps(phi_i), mass_floor/eps)), advection of S_eps(phi) is
// explicit, and the distance penalty is implicit with the lagged q. The
// resulting SPD system is solved with conjugate gradients.
class LevelSetEvolver {
 public:
  LevelSetEvolver(const UniformQuadMesh& mesh, QuadratureRule quad,
                  EvolutionParams params);

  LevelSetState evolve_step(const LevelSetState& state,
                            const std::function<Vec2(const Vec2&)>& velocity,
                            const SolverOptions& lin = {});

  const EvolutionParams& params() const { return params_; }

 private:
  const UniformQuadMesh& mesh_;
  QuadratureRule quad_;
  EvolutionParams params_;
  SpMat stiffness_;   // plain Q1 stiffness
  VecX lumped_mass_;  // plain lumped mass
};

// Interface velocity for the shrinking/expanding-band motion law: at band
// points the interface speed V = speed_scale * phi(x_shifted)/eps (a
// difference quotient of the level set normal derivative) is extended as
// v(x) = -V q(x). Outside the delta-kernel band the velocity is zero.
std::function<Vec2(const Vec2&)> build_interface_velocity(
    const LevelSetState& state, const UniformQuadMesh& mesh, double eps,
    double speed_scale, SearchAlgo algo);

// ∫ H_eps(phi) dx: the regularized measure of the phi > 0 region.
double volume(const LevelSetState& state, const UniformQuadMesh& mesh,
              double eps, const QuadratureRule& quad);

}  // namespace lsfem
