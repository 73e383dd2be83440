// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/extrapolation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "lsfem/kernels.hpp"

namespace lsfem {

namespace {
// Weights below this threshold drop the associated extension entirely (no
// projection is performed for them).
constexpr double kSkip = 1e-12;

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }
}  // namespace

double reconstruct_normal_derivative(const ClosestPointResult& cp,
                                     const BoundaryData& bd, const FEField& u,
                                     double eps, double t) {
  if (bd.neumann) return bd.neumann(cp.x_interface, t);
  if (!bd.dirichlet)
    throw std::invalid_argument(
        "reconstruct_normal_derivative: no boundary data");
  if (!u.mesh().contains(cp.x_shifted))
    throw std::domain_error(
        "reconstruct_normal_derivative: shifted point outside the mesh");
  return (bd.dirichlet(cp.x_interface, t) - u.eval(cp.x_shifted)) / eps;
}

ReconstructedGradient reconstruct_gradient_with_dn(const ClosestPointResult& cp,
                                                   const FEField& u, double eps,
                                                   double dn) {
  const Vec2 tau = rot90(cp.normal);
  const Vec2 sp = cp.x_shifted + 0.5 * eps * tau;
  const Vec2 sm = cp.x_shifted - 0.5 * eps * tau;
  const auto& mesh = u.mesh();

  double dtau = 0;
  bool one_sided = false;
  const bool p_in = mesh.contains(sp);
  const bool m_in = mesh.contains(sm);
  if (p_in && m_in) {
    dtau = (u.eval(sp) - u.eval(sm)) / eps;
  } else if (p_in && mesh.contains(cp.x_shifted)) {
    dtau = (u.eval(sp) - u.eval(cp.x_shifted)) / (0.5 * eps);
    one_sided = true;
  } else if (m_in && mesh.contains(cp.x_shifted)) {
    dtau = (u.eval(cp.x_shifted) - u.eval(sm)) / (0.5 * eps);
    one_sided = true;
  } else {
    one_sided = true;  // no usable stencil; keep the normal part only
  }
  return {dn * cp.normal + dtau * tau, one_sided};
}

ReconstructedGradient reconstruct_gradient(const ClosestPointResult& cp,
                                           const BoundaryData& bd,
                                           const FEField& u, double eps,
                                           double t) {
  return reconstruct_gradient_with_dn(
      cp, u, eps, reconstruct_normal_derivative(cp, bd, u, eps, t));
}

double upwind_inviscid_extension(const ClosestPointResult& cp,
                                 const BoundaryData& bd, const FEField& u,
                                 const std::function<Vec2(const Vec2&)>& v,
                                 double eps, double t, GradientMode mode,
                                 const Vec2& x) {
  const double vn = v(cp.x_interface).dot(cp.normal);
  const double u_hat =
      vn < 0 ? bd.dirichlet(cp.x_interface, t) : u.eval(cp.x_interface);
  double dn;
  if (mode == GradientMode::kFluxConsistent) {
    if (!u.mesh().contains(cp.x_shifted))
      throw std::domain_error(
          "upwind_inviscid_extension: shifted point outside the mesh");
    dn = (u_hat - u.eval(cp.x_shifted)) / eps;
  } else {
    dn = reconstruct_normal_derivative(cp, bd, u, eps, t);
  }
  const auto grad = reconstruct_gradient_with_dn(cp, u, eps, dn);
  return vn * extend_value_linear(cp, u_hat, grad.gradient, x);
}

double interface_flux_G(const ClosestPointResult& cp, const BoundaryData& bd,
                        const FEField& u, double kappa,
                        const std::function<Vec2(const Vec2&)>* v, double eps,
                        bool damped, double m_damp, double phi_at_query,
                        double t, GradientMode mode) {
  double G = 0;
  if (v && *v)
    G += upwind_inviscid_extension(cp, bd, u, *v, eps, t, mode, cp.x_query);

  double dn = 0;
  bool have_dn = false;
  if (kappa != 0) {
    dn = reconstruct_normal_derivative(cp, bd, u, eps, t);
    have_dn = true;
    G -= kappa * extend_normal_derivative(cp, dn);
  }

  const double speed = bd.interface_speed(cp, t);
  if (speed != 0) {
    if (!have_dn) dn = reconstruct_normal_derivative(cp, bd, u, eps, t);
    const auto grad = reconstruct_gradient_with_dn(cp, u, eps, dn);
    const double U = extend_value_linear(
        cp, bd.dirichlet(cp.x_interface, t), grad.gradient, cp.x_query);
    G -= speed * U;
  }

  if (damped) G *= damping(phi_at_query, eps, m_damp);
  return G;
}

const CachedPoint& ExtrapolationField::point(const Vec2& x) {
  cache_.reset(ls_.epoch());
  if (const CachedPoint* hit = cache_.find(x)) return *hit;

  ClosestPointResult cp = closest_point(opts_.search, ls_, mesh_, x, opts_.eps);
  if (!cp.ok())
    throw SearchError("closest-point search failed at (" +
                      std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                      "), status " + std::to_string(static_cast<int>(cp.status)));

  CachedPoint e;
  e.cp = cp;
  e.tangent = rot90(cp.normal);
  e.at_interface = mesh_.locate(cp.x_interface);
  e.at_shifted = mesh_.locate(cp.x_shifted);
  e.at_stencil_p = mesh_.locate(cp.x_shifted + 0.5 * opts_.eps * e.tangent);
  e.at_stencil_m = mesh_.locate(cp.x_shifted - 0.5 * opts_.eps * e.tangent);
  return cache_.insert(x, std::move(e));
}

double ExtrapolationField::normal_derivative(const CachedPoint& p,
                                             const FEField& u, double t) {
  if (bd_.neumann) return bd_.neumann(p.cp.x_interface, t);
  if (!p.at_shifted)
    throw std::domain_error(
        "ExtrapolationField: shifted point outside the mesh");
  return (bd_.dirichlet(p.cp.x_interface, t) - u.eval_at(*p.at_shifted)) /
         opts_.eps;
}

Vec2 ExtrapolationField::gradient_at_interface(const CachedPoint& p,
                                               const FEField& u, double,
                                               double dn) {
  const double eps = opts_.eps;
  double dtau = 0;
  if (p.at_stencil_p && p.at_stencil_m) {
    dtau = (u.eval_at(*p.at_stencil_p) - u.eval_at(*p.at_stencil_m)) / eps;
  } else if (p.at_stencil_p && p.at_shifted) {
    dtau = (u.eval_at(*p.at_stencil_p) - u.eval_at(*p.at_shifted)) / (0.5 * eps);
  } else if (p.at_stencil_m && p.at_shifted) {
    dtau = (u.eval_at(*p.at_shifted) - u.eval_at(*p.at_stencil_m)) / (0.5 * eps);
  }
  return dn * p.cp.normal + dtau * p.tangent;
}

double ExtrapolationField::flux(const Vec2& x, const FEField& u, double t) {
  const CachedPoint& p = point(x);
  const ClosestPointResult& cp = p.cp;

  double G = 0;
  double dn = 0;
  bool have_dn = false;

  if (velocity_ && *velocity_) {
    const double vn = (*velocity_)(cp.x_interface).dot(cp.normal);
    double u_hat;
    if (vn < 0) {
      u_hat = bd_.dirichlet(cp.x_interface, t);
    } else {
      if (!p.at_interface)
        throw std::domain_error(
            "ExtrapolationField: interface point outside the mesh");
      u_hat = u.eval_at(*p.at_interface);
    }
    double dn_flux;
    if (opts_.grad_mode == GradientMode::kFluxConsistent) {
      if (!p.at_shifted)
        throw std::domain_error(
            "ExtrapolationField: shifted point outside the mesh");
      dn_flux = (u_hat - u.eval_at(*p.at_shifted)) / opts_.eps;
    } else {
      dn_flux = normal_derivative(p, u, t);
      dn = dn_flux;
      have_dn = true;
    }
    const Vec2 grad = gradient_at_interface(p, u, t, dn_flux);
    G += vn * extend_value_linear(cp, u_hat, grad, x);
  }

  if (kappa_ != 0) {
    if (!have_dn) {
      dn = normal_derivative(p, u, t);
      have_dn = true;
    }
    G -= kappa_ * extend_normal_derivative(cp, dn);
  }

  const double speed = bd_.interface_speed(cp, t);
  if (speed != 0) {
    if (!have_dn) dn = normal_derivative(p, u, t);
    const Vec2 grad = gradient_at_interface(p, u, t, dn);
    const double U =
        extend_value_linear(cp, bd_.dirichlet(cp.x_interface, t), grad, x);
    G -= speed * U;
  }

  if (opts_.damped) G *= damping(ls_.value(x), opts_.eps, opts_.m_damp);
  return G;
}

double ExtrapolationField::ghost_value(const Vec2& x, const FEField& u,
                                       double t) {
  const double H = heaviside_eps(ls_.value(x), opts_.eps);
  return H * u.eval(x) + ghost_value_extension(x, u, t);
}

Vec2 ExtrapolationField::ghost_gradient(const Vec2& x, const FEField& u,
                                        double t) {
  const double H = heaviside_eps(ls_.value(x), opts_.eps);
  return H * u.eval_grad(x) + ghost_gradient_extension(x, u, t);
}

double ExtrapolationField::ghost_value_extension(const Vec2& x,
                                                 const FEField& u, double t) {
  const double phi = ls_.value(x);
  double w = 1.0 - heaviside_eps(phi, opts_.eps);
  if (opts_.damped) w *= damping(phi, opts_.eps, opts_.m_damp);
  if (w < kSkip) return 0.0;

  const CachedPoint& p = point(x);
  const double dn = normal_derivative(p, u, t);
  const Vec2 grad = gradient_at_interface(p, u, t, dn);
  const double U =
      extend_value_linear(p.cp, bd_.dirichlet(p.cp.x_interface, t), grad, x);
  return w * U;
}

Vec2 ExtrapolationField::ghost_gradient_extension(const Vec2& x,
                                                  const FEField& u, double t) {
  const double phi = ls_.value(x);
  double w = 1.0 - heaviside_eps(phi, opts_.eps);
  if (opts_.damped) w *= damping(phi, opts_.eps, opts_.m_damp);
  if (w < kSkip) return Vec2::Zero();

  const CachedPoint& p = point(x);
  const double dn = normal_derivative(p, u, t);
  return w * gradient_at_interface(p, u, t, dn);
}

void AffineScalar::add_term(int j, double c) {
  for (int k = 0; k < size; ++k)
    if (node[k] == j) {
      coeff[k] += c;
      return;
    }
  if (size == kCapacity)
    throw std::logic_error("AffineScalar: term capacity exceeded");
  node[size] = j;
  coeff[size] = c;
  ++size;
}

void AffineScalar::add_scaled(const AffineScalar& other, double s) {
  constant += s * other.constant;
  for (int k = 0; k < other.size; ++k)
    add_term(other.node[k], s * other.coeff[k]);
}

void AffineScalar::operator*=(double s) {
  constant *= s;
  for (int k = 0; k < size; ++k) coeff[k] *= s;
}

double AffineScalar::eval(const VecX& u) const {
  double v = constant;
  for (int k = 0; k < size; ++k) v += coeff[k] * u[node[k]];
  return v;
}

void ExtrapolationField::add_sample(AffineScalar& a, const Located& loc,
                                    double scale) const {
  const auto n = mesh_.cell_nodes(loc.ix, loc.iy);
  const double s = loc.sx, t = loc.sy;
  a.add_term(n[0], scale * (1 - s) * (1 - t));
  a.add_term(n[1], scale * s * (1 - t));
  a.add_term(n[2], scale * (1 - s) * t);
  a.add_term(n[3], scale * s * t);
}

AffineScalar ExtrapolationField::normal_derivative_affine(const CachedPoint& p,
                                                          double t) {
  AffineScalar dn;
  if (bd_.neumann) {
    dn.constant = bd_.neumann(p.cp.x_interface, t);
    return dn;
  }
  if (!p.at_shifted)
    throw std::domain_error(
        "ExtrapolationField: shifted point outside the mesh");
  dn.constant = bd_.dirichlet(p.cp.x_interface, t) / opts_.eps;
  add_sample(dn, *p.at_shifted, -1.0 / opts_.eps);
  return dn;
}

void ExtrapolationField::gradient_at_interface_affine(const CachedPoint& p,
                                                      const AffineScalar& dn,
                                                      AffineScalar& gx,
                                                      AffineScalar& gy) {
  const double eps = opts_.eps;
  AffineScalar dtau;
  if (p.at_stencil_p && p.at_stencil_m) {
    add_sample(dtau, *p.at_stencil_p, 1.0 / eps);
    add_sample(dtau, *p.at_stencil_m, -1.0 / eps);
  } else if (p.at_stencil_p && p.at_shifted) {
    add_sample(dtau, *p.at_stencil_p, 1.0 / (0.5 * eps));
    add_sample(dtau, *p.at_shifted, -1.0 / (0.5 * eps));
  } else if (p.at_stencil_m && p.at_shifted) {
    add_sample(dtau, *p.at_shifted, 1.0 / (0.5 * eps));
    add_sample(dtau, *p.at_stencil_m, -1.0 / (0.5 * eps));
  }
  gx = AffineScalar{};
  gy = AffineScalar{};
  gx.add_scaled(dn, p.cp.normal.x());
  gx.add_scaled(dtau, p.tangent.x());
  gy.add_scaled(dn, p.cp.normal.y());
  gy.add_scaled(dtau, p.tangent.y());
}

AffineScalar ExtrapolationField::flux_affine(const Vec2& x, double t) {
  const CachedPoint& p = point(x);
  const ClosestPointResult& cp = p.cp;

  AffineScalar G;
  AffineScalar dn;
  bool have_dn = false;

  if (velocity_ && *velocity_) {
    const double vn = (*velocity_)(cp.x_interface).dot(cp.normal);
    AffineScalar u_hat;
    if (vn < 0) {
      u_hat.constant = bd_.dirichlet(cp.x_interface, t);
    } else {
      if (!p.at_interface)
        throw std::domain_error(
            "ExtrapolationField: interface point outside the mesh");
      add_sample(u_hat, *p.at_interface, 1.0);
    }
    AffineScalar dn_flux;
    if (opts_.grad_mode == GradientMode::kFluxConsistent) {
      if (!p.at_shifted)
        throw std::domain_error(
            "ExtrapolationField: shifted point outside the mesh");
      dn_flux.add_scaled(u_hat, 1.0 / opts_.eps);
      add_sample(dn_flux, *p.at_shifted, -1.0 / opts_.eps);
    } else {
      dn_flux = normal_derivative_affine(p, t);
      dn = dn_flux;
      have_dn = true;
    }
    AffineScalar gx, gy;
    gradient_at_interface_affine(p, dn_flux, gx, gy);
    const Vec2 d = x - cp.x_interface;
    AffineScalar U = u_hat;
    U.add_scaled(gx, d.x());
    U.add_scaled(gy, d.y());
    G.add_scaled(U, vn);
  }

  if (kappa_ != 0) {
    if (!have_dn) {
      dn = normal_derivative_affine(p, t);
      have_dn = true;
    }
    G.add_scaled(dn, -kappa_);
  }

  const double speed = bd_.interface_speed(cp, t);
  if (speed != 0) {
    if (!have_dn) dn = normal_derivative_affine(p, t);
    AffineScalar gx, gy;
    gradient_at_interface_affine(p, dn, gx, gy);
    const Vec2 d = x - cp.x_interface;
    AffineScalar U;
    U.constant = bd_.dirichlet(cp.x_interface, t);
    U.add_scaled(gx, d.x());
    U.add_scaled(gy, d.y());
    G.add_scaled(U, -speed);
  }

  if (opts_.damped) G *= damping(ls_.value(x), opts_.eps, opts_.m_damp);
  return G;
}

AffineScalar ExtrapolationField::ghost_value_extension_affine(const Vec2& x,
                                                              double t) {
  AffineScalar out;
  const double phi = ls_.value(x);
  double w = 1.0 - heaviside_eps(phi, opts_.eps);
  if (opts_.damped) w *= damping(phi, opts_.eps, opts_.m_damp);
  if (w < kSkip) return out;

  const CachedPoint& p = point(x);
  const AffineScalar dn = normal_derivative_affine(p, t);
  AffineScalar gx, gy;
  gradient_at_interface_affine(p, dn, gx, gy);
  const Vec2 d = x - p.cp.x_interface;
  out.constant = bd_.dirichlet(p.cp.x_interface, t);
  out.add_scaled(gx, d.x());
  out.add_scaled(gy, d.y());
  out *= w;
  return out;
}

void ExtrapolationField::ghost_gradient_extension_affine(const Vec2& x,
                                                         double t,
                                                         AffineScalar& gx,
                                                         AffineScalar& gy) {
  gx = AffineScalar{};
  gy = AffineScalar{};
  const double phi = ls_.value(x);
  double w = 1.0 - heaviside_eps(phi, opts_.eps);
  if (opts_.damped) w *= damping(phi, opts_.eps, opts_.m_damp);
  if (w < kSkip) return;

  const CachedPoint& p = point(x);
  const AffineScalar dn = normal_derivative_affine(p, t);
  gradient_at_interface_affine(p, dn, gx, gy);
  gx *= w;
  gy *= w;
}

}  // namespace lsfem
