// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/level_set.hpp"

#include <atomic>
#include <cmath>

#include "lsfem/kernels.hpp"

namespace lsfem {

namespace {

std::uint64_t next_epoch() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

// Q1 shape functions at a reference point.
inline void shape(double s, double t, double N[4]) {
  N[0] = (1 - s) * (1 - t);
  N[1] = s * (1 - t);
  N[2] = (1 - s) * t;
  N[3] = s * t;
}

}  // namespace

Vec2 AveragedGradient::eval(const Vec2& x) const {
  const auto loc = mesh->locate(x);
  if (!loc) throw std::domain_error("AveragedGradient: point outside the mesh");
  return eval_at(*loc);
}

Vec2 AveragedGradient::eval_at(const Located& loc) const {
  const auto n = mesh->cell_nodes(loc.ix, loc.iy);
  double N[4];
  shape(loc.sx, loc.sy, N);
  Vec2 out = Vec2::Zero();
  for (int a = 0; a < 4; ++a) out += N[a] * q.row(n[a]).transpose();
  return out;
}

AveragedGradient averaged_gradient(const FEField& phi, double sigma,
                                   const QuadratureRule& quad) {
  if (!(sigma > 0))
    throw std::invalid_argument("averaged_gradient: sigma must be positive");
  const UniformQuadMesh& mesh = phi.mesh();
  const double h = mesh.h();
  const double cell_area = h * h;

  VecX num_x = VecX::Zero(mesh.num_nodes());
  VecX num_y = VecX::Zero(mesh.num_nodes());
  VecX den = VecX::Zero(mesh.num_nodes());

  double N[4];
  for (int iy = 0; iy < mesh.ny(); ++iy) {
    for (int ix = 0; ix < mesh.nx(); ++ix) {
      const auto nodes = mesh.cell_nodes(ix, iy);
      for (std::size_t k = 0; k < quad.size(); ++k) {
        const Located loc{ix, iy, quad.points[k].x(), quad.points[k].y()};
        const Vec2 g = phi.eval_grad_at(loc);
        const double w = quad.weights[k] * cell_area;
        const double mag = std::sqrt(g.squaredNorm() + sigma * sigma);
        shape(loc.sx, loc.sy, N);
        for (int a = 0; a < 4; ++a) {
          num_x[nodes[a]] += w * N[a] * g.x();
          num_y[nodes[a]] += w * N[a] * g.y();
          den[nodes[a]] += w * N[a] * mag;
        }
      }
    }
  }

  AveragedGradient out;
  out.sigma = sigma;
  out.mesh = &mesh;
  out.q.resize(mesh.num_nodes(), 2);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    out.q(i, 0) = num_x[i] / den[i];
    out.q(i, 1) = num_y[i] / den[i];
  }
  return out;
}

LevelSetField LevelSetField::analytic(ScalarFn phi, VectorFn grad_phi,
                                      double t0) {
  LevelSetField f;
  f.phi_ = std::move(phi);
  f.grad_phi_ = std::move(grad_phi);
  f.time_ = t0;
  f.epoch_ = next_epoch();
  return f;
}

LevelSetField LevelSetField::interpolated(const UniformQuadMesh& mesh,
                                          ScalarFn phi, VectorFn grad_phi,
                                          double t0) {
  LevelSetField f;
  f.phi_ = std::move(phi);
  f.grad_phi_ = std::move(grad_phi);
  f.time_ = t0;
  f.fe_ = std::make_shared<FEField>(FEField::interpolate(
      mesh, [&](const Vec2& x) { return f.phi_(x, t0); }));
  f.epoch_ = next_epoch();
  return f;
}

LevelSetField LevelSetField::finite_element(FEField phi_h, double sigma,
                                            const QuadratureRule& quad,
                                            double t0) {
  LevelSetField f;
  f.sigma_ = sigma;
  f.time_ = t0;
  f.fe_ = std::make_shared<FEField>(std::move(phi_h));
  f.avg_q_ = std::make_shared<AveragedGradient>(
      averaged_gradient(*f.fe_, sigma, quad));
  f.epoch_ = next_epoch();
  return f;
}

double LevelSetField::value(const Vec2& x) const {
  if (phi_) return phi_(x, time_);
  return fe_->eval(x);
}

Vec2 LevelSetField::gradient(const Vec2& x) const {
  if (grad_phi_) return grad_phi_(x, time_);
  return fe_->eval_grad(x);
}

Vec2 LevelSetField::q(const Vec2& x) const {
  if (avg_q_) return avg_q_->eval(x);
  const Vec2 g = gradient(x);
  const double n = g.norm();
  return n > 0 ? Vec2(g / n) : Vec2::Zero();
}

double LevelSetField::cp_value(const Vec2& x) const {
  if (fe_) return fe_->eval(x);
  return phi_(x, time_);
}

double LevelSetField::cp_value_at(const Located& loc) const {
  return fe_->eval_at(loc);
}

const UniformQuadMesh* LevelSetField::mesh() const {
  return fe_ ? &fe_->mesh() : nullptr;
}

void LevelSetField::set_time(double t) {
  if (!phi_)
    throw std::logic_error(
        "LevelSetField::set_time: only analytic fields move in time");
  if (t == time_) return;
  time_ = t;
  if (fe_) {
    auto refreshed = FEField::interpolate(
        fe_->mesh(), [&](const Vec2& x) { return phi_(x, time_); });
    fe_ = std::make_shared<FEField>(std::move(refreshed));
  }
  bump_epoch();
}

void LevelSetField::replace_field(FEField phi_h, const QuadratureRule& quad) {
  if (phi_)
    throw std::logic_error(
        "LevelSetField::replace_field: only finite element fields are replaceable");
  fe_ = std::make_shared<FEField>(std::move(phi_h));
  avg_q_ = std::make_shared<AveragedGradient>(
      averaged_gradient(*fe_, sigma_, quad));
  bump_epoch();
}

void LevelSetField::bump_epoch() { epoch_ = next_epoch(); }

double interface_measure(const LevelSetField& ls, const UniformQuadMesh& mesh,
                         double eps, const QuadratureRule& quad) {
  const double cell_area = mesh.h() * mesh.h();
  double total = 0;
  for (int iy = 0; iy < mesh.ny(); ++iy) {
    for (int ix = 0; ix < mesh.nx(); ++ix) {
      const Vec2 corner = mesh.cell_origin(ix, iy);
      for (std::size_t k = 0; k < quad.size(); ++k) {
        const Vec2 x = corner + mesh.h() * quad.points[k];
        const double d = delta_eps(ls.value(x), eps);
        if (d == 0) continue;
        total += quad.weights[k] * cell_area * d * ls.gradient(x).norm();
      }
    }
  }
  return total;
}

}  // namespace lsfem
