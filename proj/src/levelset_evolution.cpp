// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/levelset_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsfem/kernels.hpp"

namespace lsfem {

namespace {
constexpr double kBandSkip = 1e-12;

struct Q1Tab {
  double shp[4];
  double dx[4];
  double dy[4];
};

Q1Tab tabulate(const Vec2& s, double inv_h) {
  const double sx = s.x();
  const double sy = s.y();
  Q1Tab t;
  t.shp[0] = (1 - sx) * (1 - sy);
  t.shp[1] = sx * (1 - sy);
  t.shp[2] = (1 - sx) * sy;
  t.shp[3] = sx * sy;
  t.dx[0] = -(1 - sy) * inv_h;
  t.dx[1] = (1 - sy) * inv_h;
  t.dx[2] = -sy * inv_h;
  t.dx[3] = sy * inv_h;
  t.dy[0] = -(1 - sx) * inv_h;
  t.dy[1] = -sx * inv_h;
  t.dy[2] = (1 - sx) * inv_h;
  t.dy[3] = sx * inv_h;
  return t;
}
}  // namespace

LevelSetState make_level_set_state(FEField phi, double sigma,
                                   const QuadratureRule& quad, double t) {
  AveragedGradient q = averaged_gradient(phi, sigma, quad);
  return LevelSetState{std::move(phi), std::move(q), t};
}

LevelSetEvolver::LevelSetEvolver(const UniformQuadMesh& mesh,
                                 QuadratureRule quad, EvolutionParams params)
    : mesh_(mesh), quad_(std::move(quad)), params_(params) {
  if (!(params_.eps > 0 && params_.dt > 0 && params_.lambda > 0))
    throw std::invalid_argument(
        "LevelSetEvolver: eps, dt and lambda must be positive");

  const int n = mesh_.num_nodes();
  const double h = mesh_.h();
  const double jac = h * h;
  const double inv_h = 1.0 / h;
  const int nq = static_cast<int>(quad_.size());

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh_.num_cells()) * 16);
  lumped_mass_ = VecX::Zero(n);
  for (int cy = 0; cy < mesh_.ny(); ++cy)
    for (int cx = 0; cx < mesh_.nx(); ++cx) {
      Eigen::Matrix4d loc = Eigen::Matrix4d::Zero();
      for (int qp = 0; qp < nq; ++qp) {
        const Q1Tab tab = tabulate(quad_.points[qp], inv_h);
        const double s = quad_.weights[qp] * jac;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            loc(i, j) += s * (tab.dx[i] * tab.dx[j] + tab.dy[i] * tab.dy[j]);
      }
      const auto nodes = mesh_.cell_nodes(cx, cy);
      for (int i = 0; i < 4; ++i) {
        lumped_mass_[nodes[i]] += 0.25 * jac;  // row sum of the local mass
        for (int j = 0; j < 4; ++j)
          trips.emplace_back(nodes[i], nodes[j], loc(i, j));
      }
    }
  stiffness_.resize(n, n);
  stiffness_.setFromTriplets(trips.begin(), trips.end());
}

LevelSetState LevelSetEvolver::evolve_step(
    const LevelSetState& state, const std::function<Vec2(const Vec2&)>& velocity,
    const SolverOptions& lin) {
  const int n = mesh_.num_nodes();
  const double h = mesh_.h();
  const double jac = h * h;
  const double inv_h = 1.0 / h;
  const double eps = params_.eps;
  const int nq = static_cast<int>(quad_.size());
  const VecX& phi0 = state.phi.coeffs();

  // Nodal time-term weights from the old field, floored away from the band.
  VecX w(n);
  const double floor = params_.mass_floor / eps;
  for (int i = 0; i < n; ++i)
    w[i] = std::max(2.0 * delta_eps(phi0[i], eps), floor) * lumped_mass_[i];

  // Explicit advection of the regularized sign function and the lagged
  // distance-penalty load.
  VecX adv = VecX::Zero(n);
  VecX bq = VecX::Zero(n);
  for (int cy = 0; cy < mesh_.ny(); ++cy)
    for (int cx = 0; cx < mesh_.nx(); ++cx) {
      const Vec2 corner = mesh_.cell_origin(cx, cy);
      const auto nodes = mesh_.cell_nodes(cx, cy);
      for (int qp = 0; qp < nq; ++qp) {
        const Vec2 sref = quad_.points[qp];
        const Vec2 x = corner + h * sref;
        const Located loc{cx, cy, sref.x(), sref.y()};
        const Q1Tab tab = tabulate(sref, inv_h);
        const double wq = quad_.weights[qp] * jac;

        const Vec2 q0 = state.q.eval_at(loc);
        for (int i = 0; i < 4; ++i)
          bq[nodes[i]] += wq * (tab.dx[i] * q0.x() + tab.dy[i] * q0.y());

        const double dphi = 2.0 * delta_eps(state.phi.eval_at(loc), eps);
        if (dphi < kBandSkip) continue;
        const Vec2 v = velocity(x);
        if (v.x() == 0 && v.y() == 0) continue;
        const Vec2 g = state.phi.eval_grad_at(loc);
        const double s = wq * dphi * (v.x() * g.x() + v.y() * g.y());
        for (int i = 0; i < 4; ++i) adv[nodes[i]] += s * tab.shp[i];
      }
    }

  const double inv_dt = 1.0 / params_.dt;
  SpMat A(n, n);
  {
    SpMat W(n, n);
    W.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int i = 0; i < n; ++i) W.insert(i, i) = w[i] * inv_dt;
    W.makeCompressed();
    A = SpMat(W + params_.lambda * stiffness_);
  }
  VecX rhs = inv_dt * w.cwiseProduct(phi0) - adv + params_.lambda * bq;
  CgResult res = cg_solve(A, rhs, lin.cg_tol, lin.cg_maxit, &phi0);

  return make_level_set_state(FEField(mesh_, std::move(res.x)),
                              state.q.sigma, quad_, state.t + params_.dt);
}

std::function<Vec2(const Vec2&)> build_interface_velocity(
    const LevelSetState& state, const UniformQuadMesh& mesh, double eps,
    double speed_scale, SearchAlgo algo) {
  // Snapshot the discrete field so the callable owns everything it needs.
  auto ls = std::make_shared<LevelSetField>(LevelSetField::finite_element(
      state.phi, state.q.sigma, QuadratureRule::gauss(3), state.t));
  const UniformQuadMesh* mp = &mesh;

  return [ls, mp, eps, speed_scale, algo](const Vec2& x) -> Vec2 {
    const double phi = ls->value(x);
    if (2.0 * delta_eps(phi, eps) < kBandSkip) return Vec2::Zero();
    ClosestPointResult cp;
    try {
      cp = closest_point(algo, *ls, *mp, x, eps);
    } catch (const std::exception&) {
      return Vec2::Zero();
    }
    if (!cp.ok() || !mp->contains(cp.x_shifted)) return Vec2::Zero();
    const double speed = speed_scale * ls->fe().eval(cp.x_shifted) / eps;
    return Vec2(-speed * ls->q(x));
  };
}

double volume(const LevelSetState& state, const UniformQuadMesh& mesh,
              double eps, const QuadratureRule& quad) {
  const double h = mesh.h();
  const double jac = h * h;
  const int nq = static_cast<int>(quad.size());
  double vol = 0;
  for (int cy = 0; cy < mesh.ny(); ++cy)
    for (int cx = 0; cx < mesh.nx(); ++cx)
      for (int qp = 0; qp < nq; ++qp) {
        const Located loc{cx, cy, quad.points[qp].x(), quad.points[qp].y()};
        vol += quad.weights[qp] * jac *
               heaviside_eps(state.phi.eval_at(loc), eps);
      }
  return vol;
}

}  // namespace lsfem
