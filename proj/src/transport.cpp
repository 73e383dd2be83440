// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/transport.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "lsfem/kernels.hpp"

namespace lsfem {

namespace {
// Surface and extension contributions below this size are dropped.
constexpr double kSkip = 1e-12;

SpMat diagonal_matrix(const VecX& d) {
  const int n = static_cast<int>(d.size());
  SpMat D(n, n);
  D.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) D.insert(i, i) = d[i];
  D.makeCompressed();
  return D;
}
}  // namespace

TransportAssembler::TransportAssembler(const UniformQuadMesh& mesh,
                                       QuadratureRule quad,
                                       const ProblemSpec& prob,
                                       GhostPenaltyConfig gp,
                                       ExtrapolationOptions opts)
    : mesh_(mesh), quad_(std::move(quad)), prob_(prob), gp_(gp), opts_(opts) {
  if (!(opts_.eps > 0))
    throw std::invalid_argument("TransportAssembler: eps must be positive");
  if (!(gp_.gamma > 0))
    throw std::invalid_argument("TransportAssembler: gamma must be positive");

  // Tabulate the Q1 basis at the quadrature points, derivatives already
  // scaled to physical coordinates (uniform square cells).
  const int nq = static_cast<int>(quad_.size());
  shp_.resize(nq, 4);
  dshp_dx_.resize(nq, 4);
  dshp_dy_.resize(nq, 4);
  const double inv_h = 1.0 / mesh_.h();
  for (int qp = 0; qp < nq; ++qp) {
    const double sx = quad_.points[qp].x();
    const double sy = quad_.points[qp].y();
    shp_(qp, 0) = (1 - sx) * (1 - sy);
    shp_(qp, 1) = sx * (1 - sy);
    shp_(qp, 2) = (1 - sx) * sy;
    shp_(qp, 3) = sx * sy;
    dshp_dx_(qp, 0) = -(1 - sy) * inv_h;
    dshp_dx_(qp, 1) = (1 - sy) * inv_h;
    dshp_dx_(qp, 2) = -sy * inv_h;
    dshp_dx_(qp, 3) = sy * inv_h;
    dshp_dy_(qp, 0) = -(1 - sx) * inv_h;
    dshp_dy_(qp, 1) = -sx * inv_h;
    dshp_dy_(qp, 2) = (1 - sx) * inv_h;
    dshp_dy_(qp, 3) = sx * inv_h;
  }
}

template <typename Weight>
SpMat TransportAssembler::assemble_matrix(Weight&& w) const {
  const int n = mesh_.num_nodes();
  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double jac = h * h;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh_.num_cells()) * 16);
  for (int cy = 0; cy < mesh_.ny(); ++cy)
    for (int cx = 0; cx < mesh_.nx(); ++cx) {
      const Vec2 corner = mesh_.cell_origin(cx, cy);
      Eigen::Matrix4d loc = Eigen::Matrix4d::Zero();
      for (int qp = 0; qp < nq; ++qp) {
        const Vec2 x = corner + h * quad_.points[qp];
        const double s = w(x) * quad_.weights[qp] * jac;
        if (s == 0) continue;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) loc(i, j) += s * shp_(qp, i) * shp_(qp, j);
      }
      const auto nodes = mesh_.cell_nodes(cx, cy);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          trips.emplace_back(nodes[i], nodes[j], loc(i, j));
    }
  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

template <typename Weight>
SpMat TransportAssembler::assemble_grad_matrix(Weight&& w) const {
  const int n = mesh_.num_nodes();
  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double jac = h * h;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh_.num_cells()) * 16);
  for (int cy = 0; cy < mesh_.ny(); ++cy)
    for (int cx = 0; cx < mesh_.nx(); ++cx) {
      const Vec2 corner = mesh_.cell_origin(cx, cy);
      Eigen::Matrix4d loc = Eigen::Matrix4d::Zero();
      for (int qp = 0; qp < nq; ++qp) {
        const Vec2 x = corner + h * quad_.points[qp];
        const double s = w(x) * quad_.weights[qp] * jac;
        if (s == 0) continue;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            loc(i, j) += s * (dshp_dx_(qp, i) * dshp_dx_(qp, j) +
                              dshp_dy_(qp, i) * dshp_dy_(qp, j));
      }
      const auto nodes = mesh_.cell_nodes(cx, cy);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          trips.emplace_back(nodes[i], nodes[j], loc(i, j));
    }
  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

SpMat TransportAssembler::assemble_weighted_mass(const LevelSetField& ls) const {
  const double eps = opts_.eps;
  return assemble_matrix(
      [&](const Vec2& x) { return heaviside_eps(ls.value(x), eps); });
}

SpMat TransportAssembler::assemble_stiffness(const LevelSetField& ls) const {
  if (prob_.kappa == 0) return SpMat(mesh_.num_nodes(), mesh_.num_nodes());
  return assemble_grad_matrix([&](const Vec2& x) {
    return prob_.kappa * heaviside_eps(ls.value(x), opts_.eps);
  });
}

SpMat TransportAssembler::assemble_advection(const LevelSetField& ls) const {
  const int n = mesh_.num_nodes();
  if (!prob_.velocity) return SpMat(n, n);

  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double jac = h * h;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh_.num_cells()) * 16);
  for (int cy = 0; cy < mesh_.ny(); ++cy)
    for (int cx = 0; cx < mesh_.nx(); ++cx) {
      const Vec2 corner = mesh_.cell_origin(cx, cy);
      Eigen::Matrix4d loc = Eigen::Matrix4d::Zero();
      for (int qp = 0; qp < nq; ++qp) {
        const Vec2 x = corner + h * quad_.points[qp];
        const double s = heaviside_eps(ls.value(x), opts_.eps) *
                         quad_.weights[qp] * jac;
        if (s == 0) continue;
        const Vec2 v = prob_.velocity(x);
        for (int i = 0; i < 4; ++i) {
          const double vdg =
              v.x() * dshp_dx_(qp, i) + v.y() * dshp_dy_(qp, i);
          for (int j = 0; j < 4; ++j) loc(i, j) -= s * vdg * shp_(qp, j);
        }
      }
      const auto nodes = mesh_.cell_nodes(cx, cy);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          trips.emplace_back(nodes[i], nodes[j], loc(i, j));
    }
  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

SpMat TransportAssembler::penalty_lhs() const {
  if (gp_.kind == GhostPenaltyConfig::Kind::kDirichlet) {
    SpMat P = assemble_matrix([](const Vec2&) { return 1.0; });
    if (gp_.lumped_lhs) P = diagonal_matrix(lumped_rows(P));
    return SpMat(gp_.gamma * P);
  }
  // Neumann: plain (unweighted) stiffness.
  SpMat P = assemble_grad_matrix([](const Vec2&) { return 1.0; });
  return SpMat(gp_.gamma * P);
}

const TransportAssembler::BandLists& TransportAssembler::bands(
    const LevelSetField& ls) const {
  if (bands_.epoch == ls.epoch()) return bands_;
  bands_.epoch = ls.epoch();
  bands_.surface.clear();
  bands_.ghost.clear();
  bands_.surface_flag.assign(mesh_.num_cells(), 0);
  bands_.ghost_flag.assign(mesh_.num_cells(), 0);

  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double eps = opts_.eps;
  for (int cy = 0; cy < mesh_.ny(); ++cy)
    for (int cx = 0; cx < mesh_.nx(); ++cx) {
      const Vec2 corner = mesh_.cell_origin(cx, cy);
      bool surf = false;
      bool ghost = false;
      for (int qp = 0; qp < nq && !(surf && ghost); ++qp) {
        const Vec2 x = corner + h * quad_.points[qp];
        const double phi = ls.value(x);
        if (!surf &&
            delta_eps(phi, eps) * ls.gradient(x).norm() >= kSkip)
          surf = true;
        if (!ghost) {
          double w = 1.0 - heaviside_eps(phi, eps);
          if (opts_.damped) w *= damping(phi, eps, opts_.m_damp);
          if (w >= kSkip) ghost = true;
        }
      }
      const int cell = mesh_.cell_id(cx, cy);
      if (surf) {
        bands_.surface.push_back(cell);
        bands_.surface_flag[cell] = 1;
      }
      if (ghost) {
        bands_.ghost.push_back(cell);
        bands_.ghost_flag[cell] = 1;
      }
    }
  return bands_;
}

ExtrapolationField TransportAssembler::bind(const LevelSetField& ls) {
  return ExtrapolationField(mesh_, ls, prob_.boundary, prob_.kappa,
                            prob_.velocity ? &prob_.velocity : nullptr, opts_,
                            cache_);
}

VecX TransportAssembler::assemble_interface_rhs(const LevelSetField& ls,
                                                const FEField& u, double t) {
  ExtrapolationField ext = bind(ls);
  const BandLists& bl = bands(ls);
  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double jac = h * h;
  const double eps = opts_.eps;
  VecX b = VecX::Zero(mesh_.num_nodes());
  for (int cell : bl.surface) {
    const int cx = cell % mesh_.nx();
    const int cy = cell / mesh_.nx();
    const Vec2 corner = mesh_.cell_origin(cx, cy);
    const auto nodes = mesh_.cell_nodes(cx, cy);
    for (int qp = 0; qp < nq; ++qp) {
      const Vec2 x = corner + h * quad_.points[qp];
      const double sw =
          delta_eps(ls.value(x), eps) * ls.gradient(x).norm();
      if (sw < kSkip) continue;
      const double c = quad_.weights[qp] * jac * sw * ext.flux(x, u, t);
      for (int i = 0; i < 4; ++i) b[nodes[i]] -= c * shp_(qp, i);
    }
  }
  return b;
}

VecX TransportAssembler::assemble_ghost_rhs(const LevelSetField& ls,
                                            const FEField& u_lagged, double t,
                                            const SpMat* weighted_op) {
  ExtrapolationField ext = bind(ls);
  const BandLists& bl = bands(ls);
  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double jac = h * h;
  const bool dirichlet = gp_.kind == GhostPenaltyConfig::Kind::kDirichlet;
  VecX r;

  if (weighted_op) {
    // H_eps-weighted part expressed through the provided operator, plus the
    // extension integral over the ghost band.
    r = (*weighted_op) * u_lagged.coeffs();
    if (!dirichlet) r *= 1.0 / prob_.kappa;  // operator carries kappa
    for (int cell : bl.ghost) {
      const int cx = cell % mesh_.nx();
      const int cy = cell / mesh_.nx();
      const Vec2 corner = mesh_.cell_origin(cx, cy);
      const auto nodes = mesh_.cell_nodes(cx, cy);
      for (int qp = 0; qp < nq; ++qp) {
        const Vec2 x = corner + h * quad_.points[qp];
        const double wq = quad_.weights[qp] * jac;
        if (dirichlet) {
          const double e = ext.ghost_value_extension(x, u_lagged, t);
          if (e == 0) continue;
          for (int i = 0; i < 4; ++i) r[nodes[i]] += wq * e * shp_(qp, i);
        } else {
          const Vec2 g = ext.ghost_gradient_extension(x, u_lagged, t);
          for (int i = 0; i < 4; ++i)
            r[nodes[i]] += wq * (dshp_dx_(qp, i) * g.x() +
                                 dshp_dy_(qp, i) * g.y());
        }
      }
    }
  } else {
    r = VecX::Zero(mesh_.num_nodes());
    for (int cy = 0; cy < mesh_.ny(); ++cy)
      for (int cx = 0; cx < mesh_.nx(); ++cx) {
        const int cell = mesh_.cell_id(cx, cy);
        const Vec2 corner = mesh_.cell_origin(cx, cy);
        const auto nodes = mesh_.cell_nodes(cx, cy);
        for (int qp = 0; qp < nq; ++qp) {
          const Vec2 x = corner + h * quad_.points[qp];
          const Located loc{cx, cy, quad_.points[qp].x(),
                            quad_.points[qp].y()};
          const double wq = quad_.weights[qp] * jac;
          const double H = heaviside_eps(ls.value(x), opts_.eps);
          if (dirichlet) {
            double val = H * u_lagged.eval_at(loc);
            if (bl.ghost_flag[cell])
              val += ext.ghost_value_extension(x, u_lagged, t);
            if (val == 0) continue;
            for (int i = 0; i < 4; ++i) r[nodes[i]] += wq * val * shp_(qp, i);
          } else {
            Vec2 g = H * u_lagged.eval_grad_at(loc);
            if (bl.ghost_flag[cell])
              g += ext.ghost_gradient_extension(x, u_lagged, t);
            for (int i = 0; i < 4; ++i)
              r[nodes[i]] += wq * (dshp_dx_(qp, i) * g.x() +
                                   dshp_dy_(qp, i) * g.y());
          }
        }
      }
  }
  return VecX(gp_.gamma * r);
}

TransportAssembler::AffineLoad
TransportAssembler::assemble_interface_linearized(const LevelSetField& ls,
                                                  double t) {
  ExtrapolationField ext = bind(ls);
  const BandLists& bl = bands(ls);
  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double jac = h * h;
  const double eps = opts_.eps;
  const int n = mesh_.num_nodes();
  VecX c = VecX::Zero(n);
  std::vector<Triplet> trips;
  trips.reserve(bl.surface.size() * static_cast<std::size_t>(nq) * 32);
  for (int cell : bl.surface) {
    const int cx = cell % mesh_.nx();
    const int cy = cell / mesh_.nx();
    const Vec2 corner = mesh_.cell_origin(cx, cy);
    const auto nodes = mesh_.cell_nodes(cx, cy);
    for (int qp = 0; qp < nq; ++qp) {
      const Vec2 x = corner + h * quad_.points[qp];
      const double sw = delta_eps(ls.value(x), eps) * ls.gradient(x).norm();
      if (sw < kSkip) continue;
      const AffineScalar G = ext.flux_affine(x, t);
      const double wq = quad_.weights[qp] * jac * sw;
      for (int i = 0; i < 4; ++i) {
        const double wi = wq * shp_(qp, i);
        c[nodes[i]] -= wi * G.constant;
        for (int k = 0; k < G.size; ++k)
          trips.emplace_back(nodes[i], G.node[k], -wi * G.coeff[k]);
      }
    }
  }
  SpMat B(n, n);
  B.setFromTriplets(trips.begin(), trips.end());
  return {std::move(B), std::move(c)};
}

TransportAssembler::AffineLoad TransportAssembler::assemble_ghost_linearized(
    const LevelSetField& ls, double t) {
  ExtrapolationField ext = bind(ls);
  const BandLists& bl = bands(ls);
  const int nq = static_cast<int>(quad_.size());
  const double h = mesh_.h();
  const double jac = h * h;
  const bool dirichlet = gp_.kind == GhostPenaltyConfig::Kind::kDirichlet;
  const int n = mesh_.num_nodes();

  // H_eps-weighted bulk part: weighted mass (value penalty) resp. weighted
  // unit stiffness (gradient penalty), exactly as in the lagged assembly.
  SpMat Bh = dirichlet ? assemble_weighted_mass(ls)
                       : assemble_grad_matrix([&](const Vec2& x) {
                           return heaviside_eps(ls.value(x), opts_.eps);
                         });

  VecX c = VecX::Zero(n);
  std::vector<Triplet> trips;
  trips.reserve(bl.ghost.size() * static_cast<std::size_t>(nq) * 32);
  for (int cell : bl.ghost) {
    const int cx = cell % mesh_.nx();
    const int cy = cell / mesh_.nx();
    const Vec2 corner = mesh_.cell_origin(cx, cy);
    const auto nodes = mesh_.cell_nodes(cx, cy);
    for (int qp = 0; qp < nq; ++qp) {
      const Vec2 x = corner + h * quad_.points[qp];
      const double wq = quad_.weights[qp] * jac;
      if (dirichlet) {
        const AffineScalar e = ext.ghost_value_extension_affine(x, t);
        if (e.size == 0 && e.constant == 0) continue;
        for (int i = 0; i < 4; ++i) {
          const double wi = wq * shp_(qp, i);
          c[nodes[i]] += wi * e.constant;
          for (int k = 0; k < e.size; ++k)
            trips.emplace_back(nodes[i], e.node[k], wi * e.coeff[k]);
        }
      } else {
        AffineScalar gx, gy;
        ext.ghost_gradient_extension_affine(x, t, gx, gy);
        for (int i = 0; i < 4; ++i) {
          const double wx = wq * dshp_dx_(qp, i);
          const double wy = wq * dshp_dy_(qp, i);
          c[nodes[i]] += wx * gx.constant + wy * gy.constant;
          for (int k = 0; k < gx.size; ++k)
            trips.emplace_back(nodes[i], gx.node[k], wx * gx.coeff[k]);
          for (int k = 0; k < gy.size; ++k)
            trips.emplace_back(nodes[i], gy.node[k], wy * gy.coeff[k]);
        }
      }
    }
  }
  SpMat Bext(n, n);
  Bext.setFromTriplets(trips.begin(), trips.end());
  return {SpMat(gp_.gamma * (Bh + Bext)), VecX(gp_.gamma * c)};
}

TransportSolver::TransportSolver(const UniformQuadMesh& mesh, LevelSetField& ls,
                                 const ProblemSpec& prob, GhostPenaltyConfig gp,
                                 ExtrapolationOptions opts, SolverOptions lin)
    : mesh_(mesh),
      ls_(ls),
      prob_(prob),
      gp_(gp),
      opts_(opts),
      lin_(lin),
      asm_(mesh, QuadratureRule::gauss(3), prob, gp, opts),
      state_{FEField(mesh), 0} {
  refresh_static_operators();
}

void TransportSolver::refresh_static_operators() { P_lhs_ = asm_.penalty_lhs(); }

void TransportSolver::initialize(double t0) {
  state_.t = t0;
  if (ls_.time() != t0) ls_.set_time(t0);
  state_.u = prob_.initial ? FEField::interpolate(mesh_, prob_.initial)
                           : FEField(mesh_);
  have_cur_ = false;
}

namespace {
// Full spatial operator K + C for one geometry snapshot.
SpMat spatial_operator(TransportAssembler& a, const LevelSetField& ls) {
  SpMat K = a.assemble_stiffness(ls);
  SpMat C = a.assemble_advection(ls);
  if (C.nonZeros() > 0) K = SpMat(K + C);
  return K;
}
}  // namespace

void TransportSolver::step_crank_nicolson(double dt) {
  const double t0 = state_.t;
  const double th = t0 + 0.5 * dt;
  const double t1 = t0 + dt;

  if (ls_.time() != t0) ls_.set_time(t0);
  if (!have_cur_ || cur_epoch_ != ls_.epoch()) {
    M_cur_ = asm_.assemble_weighted_mass(ls_);
    K_cur_ = spatial_operator(asm_, ls_);
    have_cur_ = true;
    cur_epoch_ = ls_.epoch();
  }
  const VecX u0 = state_.u.coeffs();
  const VecX base = (M_cur_ * u0) / dt - 0.5 * (K_cur_ * u0);

  ls_.set_time(t1);
  SpMat M1 = asm_.assemble_weighted_mass(ls_);
  SpMat K1 = spatial_operator(asm_, ls_);

  // Interface and penalty loads live on the midpoint geometry; their
  // dependence on the end-of-step solution moves into the system matrix, so
  // the step is one direct nonsymmetric solve.
  ls_.set_time(th);
  const auto bif = asm_.assemble_interface_linearized(ls_, th);
  const auto bgh = asm_.assemble_ghost_linearized(ls_, th);
  const SpMat A = SpMat(M1 * (1.0 / dt) + 0.5 * K1 + P_lhs_ - bif.jacobian -
                        bgh.jacobian);
  VecX u1 = sparse_lu_solve(A, VecX(base + bif.constant + bgh.constant));

  // M1/K1 belong to the final-time geometry the field is left on.
  ls_.set_time(t1);
  state_.u = FEField(mesh_, std::move(u1));
  state_.t = t1;
  M_cur_ = std::move(M1);
  K_cur_ = std::move(K1);
  have_cur_ = true;
  cur_epoch_ = ls_.epoch();
}

void TransportSolver::step_crank_nicolson_fields(const LevelSetField& geo_old,
                                                 const LevelSetField& geo_mid,
                                                 const LevelSetField& geo_new,
                                                 double dt) {
  const double t0 = state_.t;
  const double th = t0 + 0.5 * dt;
  const double t1 = t0 + dt;

  SpMat M0 = asm_.assemble_weighted_mass(geo_old);
  SpMat K0 = spatial_operator(asm_, geo_old);
  const VecX u0 = state_.u.coeffs();
  const VecX base = (M0 * u0) / dt - 0.5 * (K0 * u0);

  SpMat M1 = asm_.assemble_weighted_mass(geo_new);
  SpMat K1 = spatial_operator(asm_, geo_new);

  const auto bif = asm_.assemble_interface_linearized(geo_mid, th);
  const auto bgh = asm_.assemble_ghost_linearized(geo_mid, th);
  const SpMat A = SpMat(M1 * (1.0 / dt) + 0.5 * K1 + P_lhs_ - bif.jacobian -
                        bgh.jacobian);
  VecX u1 = sparse_lu_solve(A, VecX(base + bif.constant + bgh.constant));

  state_.u = FEField(mesh_, std::move(u1));
  state_.t = t1;
  have_cur_ = false;
}

void TransportSolver::step_heun(double dt) {
  const double t0 = state_.t;
  if (!have_cur_ || cur_epoch_ != ls_.epoch()) {
    M_cur_ = asm_.assemble_weighted_mass(ls_);
    K_cur_ = spatial_operator(asm_, ls_);
    have_cur_ = true;
    cur_epoch_ = ls_.epoch();
  }
  const double floor = 1e-12 * mesh_.h() * mesh_.h();
  const VecX ml = lumped_rows(M_cur_).cwiseMax(floor);

  const SpMat* wop =
      gp_.kind == GhostPenaltyConfig::Kind::kDirichlet ? &M_cur_ : nullptr;

  // Each forward-Euler stage treats the penalty implicitly: diagonal solve
  // when the penalty matrix is lumped, CG otherwise.
  const bool diag_pen = gp_.lumped_lhs;
  VecX denom;
  SpMat A_stage;
  if (diag_pen) {
    denom = ml + dt * VecX(P_lhs_.diagonal());
  } else {
    A_stage = SpMat(diagonal_matrix(ml) + dt * P_lhs_);
  }

  auto stage = [&](const VecX& v, double ts) -> VecX {
    FEField vf(mesh_, v);
    VecX rhs = ml.cwiseProduct(v) - dt * (K_cur_ * v);
    rhs += dt * asm_.assemble_interface_rhs(ls_, vf, ts);
    rhs += dt * asm_.assemble_ghost_rhs(ls_, vf, ts, wop);
    if (diag_pen) return VecX(rhs.cwiseQuotient(denom));
    return cg_solve(A_stage, rhs, lin_.cg_tol, lin_.cg_maxit, &v).x;
  };

  const VecX u0 = state_.u.coeffs();
  VecX s1 = stage(u0, t0);
  VecX s2 = stage(s1, t0 + dt);
  VecX u1 = 0.5 * (u0 + s2);
  state_.u = FEField(mesh_, std::move(u1));
  state_.t = t0 + dt;
}

int TransportSolver::solve_steady(double pseudo_dt, double tol, int max_steps) {
  if (!have_cur_ || cur_epoch_ != ls_.epoch()) {
    M_cur_ = asm_.assemble_weighted_mass(ls_);
    K_cur_ = spatial_operator(asm_, ls_);
    have_cur_ = true;
    cur_epoch_ = ls_.epoch();
  }
  const double t = state_.t;

  // With the load linearizations in the matrix the pseudo-time iteration is
  // exactly linear, u -> A^{-1} (M u / dtau + c): factor once, then march.
  const auto bif = asm_.assemble_interface_linearized(ls_, t);
  const auto bgh = asm_.assemble_ghost_linearized(ls_, t);
  const SpMat A = SpMat(M_cur_ * (1.0 / pseudo_dt) + K_cur_ + P_lhs_ -
                        bif.jacobian - bgh.jacobian);
  const SparseLuSolver lu(A);
  const VecX load = bif.constant + bgh.constant;

  VecX u = state_.u.coeffs();
  double rate = 0;
  for (int step = 1; step <= max_steps; ++step) {
    VecX u_new = lu.solve(VecX((M_cur_ * u) / pseudo_dt + load));
    rate = (u_new - u).lpNorm<Eigen::Infinity>() / pseudo_dt;
    u = std::move(u_new);
    if (rate <= tol) {
      state_.u = FEField(mesh_, std::move(u));
      return step;
    }
    if (!std::isfinite(rate))
      throw SolveError("solve_steady: pseudo-time iteration diverges", rate,
                       step);
  }
  throw SolveError("solve_steady: pseudo-time iteration did not reach the "
                   "requested tolerance",
                   rate, max_steps);
}

}  // namespace lsfem
