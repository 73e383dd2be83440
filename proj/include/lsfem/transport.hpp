// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lsfem/extrapolation.hpp"
#include "lsfem/fe_field.hpp"
#include "lsfem/level_set.hpp"
#include "lsfem/quadrature.hpp"
#include "lsfem/solver.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

// Scalar transport problem posed on the embedded domain {phi > 0}:
//
//   d/dt u + div(v u) - kappa Laplace(u) = 0,
//
// with data imposed on the interface through flux and penalty terms.
struct ProblemSpec {
  double kappa = 0;
  std::function<Vec2(const Vec2&)> velocity;  // inviscid advection field
  BoundaryData boundary;
  std::function<double(const Vec2&)> initial;
  std::function<double(const Vec2&, double)> exact;  // for error studies
};

struct GhostPenaltyConfig {
  enum class Kind { kDirichlet, kNeumann };
  Kind kind = Kind::kDirichlet;
  double gamma = 0;
  bool damped = false;
  bool lumped_lhs = false;

  static GhostPenaltyConfig dirichlet(double h, bool damped,
                                      bool lumped = false) {
    return {Kind::kDirichlet, 1.0 / h, damped, lumped};
  }
  static GhostPenaltyConfig neumann(double h, bool damped) {
    return {Kind::kNeumann, h, damped, false};
  }
};

struct TransientState {
  FEField u;
  double t = 0;
};

// Assembles the operators of the regularized weak form; all signs are chosen
// so the semi-discrete system reads
//
//   M du/dt = -(K + C) u - P_lhs u + P_rhs + b,
//
// with M the H_eps-weighted mass, K the weighted stiffness (kappa included),
// C the advection operator, (P_lhs, P_rhs) the ghost penalty pair and b the
// interface flux load. Methods take the level set explicitly so one
// assembler can serve several geometry snapshots (old/midpoint/new time
// levels); the closest-point cache keys on the level set epoch.
class TransportAssembler {
 public:
  TransportAssembler(const UniformQuadMesh& mesh, QuadratureRule quad,
                     const ProblemSpec& prob, GhostPenaltyConfig gp,
                     ExtrapolationOptions opts);

  SpMat assemble_weighted_mass(const LevelSetField& ls) const;
  SpMat assemble_stiffness(const LevelSetField& ls) const;
  SpMat assemble_advection(const LevelSetField& ls) const;

  // Geometry-independent penalty matrix: gamma-scaled plain mass
  // (optionally row-lumped) for Dirichlet, plain stiffness for Neumann.
  SpMat penalty_lhs() const;

  // b_i = -∫ w_i G delta_eps(phi) |grad phi| dx; contributions below 1e-12
  // in the surface weight are skipped.
  VecX assemble_interface_rhs(const LevelSetField& ls, const FEField& u,
                              double t);

  // Penalty load from the lagged solution:
  // Dirichlet: gamma ∫ w_i u_O(x) dx, Neumann: gamma ∫ grad w_i . g_O dx.
  // The ghost quantity splits into a weighted-operator part acting on the
  // coefficients (H_eps-weighted mass resp. stiffness) plus an extension
  // integral supported near the interface; callers that already hold the
  // weighted operator pass it to skip the full-mesh sweep.
  VecX assemble_ghost_rhs(const LevelSetField& ls, const FEField& u_lagged,
                          double t, const SpMat* weighted_op = nullptr);

  // Affine representation of a load: load(u) = constant + jacobian * u.
  struct AffineLoad {
    SpMat jacobian;
    VecX constant;
  };

  // Linearizations of the two loads above in the coefficients of the
  // solution they are evaluated at: for any u,
  //   assemble_interface_rhs(ls, u, t) == constant + jacobian * u
  // up to rounding (same quadrature, same skip gates), and likewise for the
  // ghost load. These let implicit steppers treat the extrapolation
  // feedback exactly — as part of a (nonsymmetric) system matrix — instead
  // of lagging it, which is unconditionally stable where lagging is not.
  AffineLoad assemble_interface_linearized(const LevelSetField& ls, double t);
  AffineLoad assemble_ghost_linearized(const LevelSetField& ls, double t);

  std::pair<SpMat, VecX> assemble_ghost_penalty(const LevelSetField& ls,
                                                const FEField& u_lagged,
                                                double t) {
    return {penalty_lhs(), assemble_ghost_rhs(ls, u_lagged, t)};
  }

  const UniformQuadMesh& mesh() const { return mesh_; }
  const QuadratureRule& quad() const { return quad_; }
  const GhostPenaltyConfig& penalty_config() const { return gp_; }
  const ExtrapolationOptions& extrapolation_options() const { return opts_; }
  ClosestPointCache& cache() { return cache_; }

 private:
  ExtrapolationField bind(const LevelSetField& ls);
  template <typename Weight>
  SpMat assemble_matrix(Weight&& w) const;  // w(x) -> local scale
  template <typename Weight>
  SpMat assemble_grad_matrix(Weight&& w) const;  // grad-grad variant

  // Cells whose quadrature points carry resolvable interface terms: the
  // delta-kernel support (surface loads) and the region where the extension
  // weight exceeds the skip threshold (ghost loads). Rebuilt when the level
  // set epoch changes.
  struct BandLists {
    std::uint64_t epoch = ~0ull;
    std::vector<int> surface;
    std::vector<int> ghost;
    std::vector<std::uint8_t> surface_flag;  // per-cell membership
    std::vector<std::uint8_t> ghost_flag;
  };
  const BandLists& bands(const LevelSetField& ls) const;

  const UniformQuadMesh& mesh_;
  QuadratureRule quad_;
  const ProblemSpec& prob_;
  GhostPenaltyConfig gp_;
  ExtrapolationOptions opts_;
  ClosestPointCache cache_;
  mutable BandLists bands_;

  // Basis values/derivatives tabulated at the quadrature points.
  Eigen::Matrix<double, Eigen::Dynamic, 4> shp_;
  Eigen::Matrix<double, Eigen::Dynamic, 4> dshp_dx_;
  Eigen::Matrix<double, Eigen::Dynamic, 4> dshp_dy_;
};

// Classic two-stage second-order update u -> u + dt/2 (f(u) + f(u*)),
// u* = u + dt f(u); exposed for direct use on plain ODE systems.
template <typename Rhs>
VecX heun_update(const VecX& u, double t, double dt, Rhs&& f) {
  VecX k1 = f(u, t);
  VecX u_star = u + dt * k1;
  VecX k2 = f(u_star, t + dt);
  return u + 0.5 * dt * (k1 + k2);
}

// Time integration driver. Holds the state and the assembled operators,
// refreshing geometry-dependent pieces as the interface moves.
class TransportSolver {
 public:
  TransportSolver(const UniformQuadMesh& mesh, LevelSetField& ls,
                  const ProblemSpec& prob, GhostPenaltyConfig gp,
                  ExtrapolationOptions opts, SolverOptions lin = {});

  void initialize(double t0);

  TransientState& state() { return state_; }
  const TransientState& state() const { return state_; }
  TransportAssembler& assembler() { return asm_; }

  // One Crank-Nicolson step; mass terms pair the old and new geometry
  // conservatively. Interface and penalty loads live on the midpoint
  // geometry and are linearized in the end-of-step solution, so the step is
  // a single direct solve of a nonsymmetric system.
  void step_crank_nicolson(double dt);

  // Same step with explicitly provided geometry snapshots (used when the
  // level set is evolved numerically rather than prescribed).
  void step_crank_nicolson_fields(const LevelSetField& geo_old,
                                  const LevelSetField& geo_mid,
                                  const LevelSetField& geo_new, double dt);

  // One strong-stability-preserving second-order step on the lumped-mass
  // system. Each of the two forward-Euler stages treats the (diagonal,
  // lumped) penalty implicitly and everything else explicitly; lumped mass
  // entries are floored at 1e-12 h^2 where the weight vanishes.
  void step_heun(double dt);

  // Pseudo-time backward Euler marching to steady state (loads folded into
  // the matrix, factored once): stops when
  // ||u_new - u_old||_inf / pseudo_dt <= tol. Returns the step count;
  // throws SolveError when max_steps is exhausted.
  int solve_steady(double pseudo_dt, double tol = 1e-9,
                   int max_steps = 100000);

 private:
  void refresh_static_operators();

  const UniformQuadMesh& mesh_;
  LevelSetField& ls_;
  const ProblemSpec& prob_;
  GhostPenaltyConfig gp_;
  ExtrapolationOptions opts_;
  SolverOptions lin_;
  TransportAssembler asm_;
  TransientState state_;

  // cached operators for the current state time
  SpMat M_cur_, K_cur_;
  SpMat P_lhs_;
  bool have_cur_ = false;
  std::uint64_t cur_epoch_ = 0;
};

}  // namespace lsfem
