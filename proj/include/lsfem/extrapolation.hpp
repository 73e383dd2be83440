// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "lsfem/closest_point.hpp"
#include "lsfem/fe_field.hpp"
#include "lsfem/level_set.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

// Boundary data on the embedded interface. All callables take (x, t) with x
// a point on (or near) the interface; they must be evaluable wherever a
// projected interface point can land. Exactly one of dirichlet/neumann
// drives the normal-derivative reconstruction; normal_velocity (or its
// reconstructed variant, which sees the full projection result) supplies the
// interface speed for moving boundaries.
struct BoundaryData {
  std::function<double(const Vec2&, double)> dirichlet;
  std::function<double(const Vec2&, double)> neumann;
  std::function<double(const Vec2&, double)> normal_velocity;
  std::function<double(const ClosestPointResult&, double)>
      normal_velocity_cp;

  double interface_speed(const ClosestPointResult& cp, double t) const {
    if (normal_velocity_cp) return normal_velocity_cp(cp, t);
    if (normal_velocity) return normal_velocity(cp.x_interface, t);
    return 0.0;
  }
};

// Which value anchors the normal difference quotient inside the upwind flux
// extension: the prescribed boundary value (kBoundaryData) or the upwinded
// trace that the flux itself uses (kFluxConsistent, default).
enum class GradientMode { kBoundaryData, kFluxConsistent };

// One-sided difference quotient for the normal derivative at x_interface:
// (u_Gamma - u_h(x_shifted)) / eps, or the prescribed Neumann data when
// present. Throws std::domain_error if x_shifted falls outside the mesh.
double reconstruct_normal_derivative(const ClosestPointResult& cp,
                                     const BoundaryData& bd, const FEField& u,
                                     double eps, double t);

struct ReconstructedGradient {
  Vec2 gradient = Vec2::Zero();
  bool one_sided = false;  // tangential stencil fell back to one-sided
};

// Combines a given normal derivative with a tangential central difference of
// u_h across x_shifted (spacing eps/2 each side); recombined in Cartesian
// components. Falls back to a one-sided difference when a stencil point
// leaves the mesh.
ReconstructedGradient reconstruct_gradient_with_dn(const ClosestPointResult& cp,
                                                   const FEField& u, double eps,
                                                   double dn);

ReconstructedGradient reconstruct_gradient(const ClosestPointResult& cp,
                                           const BoundaryData& bd,
                                           const FEField& u, double eps,
                                           double t);

// Constant extension of the normal derivative along the projection ray.
inline double extend_normal_derivative(const ClosestPointResult&, double dn) {
  return dn;
}

// Linear extension U(x) = u_Gamma + grad_Gamma . (x - x_interface).
inline double extend_value_linear(const ClosestPointResult& cp,
                                  double value_at_interface,
                                  const Vec2& gradient_at_interface,
                                  const Vec2& x) {
  return value_at_interface +
         gradient_at_interface.dot(x - cp.x_interface);
}

// Upwind extension of the inviscid normal flux: with V = v(x_Gamma).n_Gamma
// the trace is the boundary value on inflow (V < 0) and the interior trace
// otherwise; the trace is extended linearly to x and multiplied by V.
double upwind_inviscid_extension(const ClosestPointResult& cp,
                                 const BoundaryData& bd, const FEField& u,
                                 const std::function<Vec2(const Vec2&)>& v,
                                 double eps, double t, GradientMode mode,
                                 const Vec2& x);

// Total interface flux
//
//   G = F - kappa * dnU - V * U
//
// with F the upwind inviscid part (zero without an advection field), dnU the
// constant extension of the reconstructed normal derivative and U the linear
// value extension (only evaluated when an interface speed is present). In
// damped mode every extension is confined to the band by damping(phi(x)).
double interface_flux_G(const ClosestPointResult& cp, const BoundaryData& bd,
                        const FEField& u, double kappa,
                        const std::function<Vec2(const Vec2&)>* v, double eps,
                        bool damped, double m_damp, double phi_at_query,
                        double t, GradientMode mode);

// Constant extension of an interface speed into the band as a vector field:
// v(x) = -V * q(x).
inline Vec2 extension_velocity(const ClosestPointResult&, double v_interface,
                               const Vec2& q_at_query) {
  return -v_interface * q_at_query;
}

struct ExtrapolationOptions {
  double eps = 0;
  double m_damp = 2.0;
  bool damped = false;
  SearchAlgo search = SearchAlgo::kTraversal;
  GradientMode grad_mode = GradientMode::kFluxConsistent;
};

// Affine form  constant + sum_k coeff[k] * u[node[k]]  of a scalar in the
// solution coefficients. The linearized evaluators below build these from a
// handful of bilinear samples (at most four cells' worth of nodes), so terms
// live in fixed inline arrays; add_term merges repeated nodes.
struct AffineScalar {
  static constexpr int kCapacity = 20;
  double constant = 0;
  int size = 0;
  int node[kCapacity];
  double coeff[kCapacity];

  void add_term(int j, double c);
  // this += s * other (constant and terms)
  void add_scaled(const AffineScalar& other, double s);
  void operator*=(double s);
  double eval(const VecX& u) const;
};

// Bound evaluator for the ghost fields that the volumetric penalties target.
// Owns nothing; binds mesh/level set/boundary data/options plus a cache of
// projection geometry, and evaluates with the current solution passed per
// call (so one cached geometry serves many solver stages).
class ExtrapolationField {
 public:
  ExtrapolationField(const UniformQuadMesh& mesh, const LevelSetField& ls,
                     const BoundaryData& bd, double kappa,
                     const std::function<Vec2(const Vec2&)>* velocity,
                     const ExtrapolationOptions& opts,
                     ClosestPointCache& cache)
      : mesh_(mesh), ls_(ls), bd_(bd), kappa_(kappa), velocity_(velocity),
        opts_(opts), cache_(cache) {}

  // Projection geometry for x, memoized. Throws SearchError on failure.
  const CachedPoint& point(const Vec2& x);

  // G at a query point (see interface_flux_G), using cached geometry.
  double flux(const Vec2& x, const FEField& u, double t);

  // Dirichlet ghost value
  //   u_O(x) = H_eps(phi) u_h(x) + (1 - H_eps(phi)) [damping] U(x);
  // the extension term is skipped when its weight is below 1e-12.
  double ghost_value(const Vec2& x, const FEField& u, double t);

  // Neumann ghost gradient
  //   g_O(x) = H_eps(phi) grad u_h(x) + (1 - H_eps(phi)) [damping] gradU.
  Vec2 ghost_gradient(const Vec2& x, const FEField& u, double t);

  // Extension parts alone: (1 - H_eps) [damping] U resp. its gradient,
  // zero (without projecting) when the weight is below 1e-12.
  double ghost_value_extension(const Vec2& x, const FEField& u, double t);
  Vec2 ghost_gradient_extension(const Vec2& x, const FEField& u, double t);

  // Linearizations of flux / ghost_*_extension in the solution coefficients:
  // each mirrors its scalar counterpart exactly (same cached geometry, skip
  // gates and damping), so result.eval(u.coeffs()) reproduces the scalar
  // value. They let implicit steppers fold the extrapolation feedback into
  // the system matrix instead of lagging it.
  AffineScalar flux_affine(const Vec2& x, double t);
  AffineScalar ghost_value_extension_affine(const Vec2& x, double t);
  void ghost_gradient_extension_affine(const Vec2& x, double t,
                                       AffineScalar& gx, AffineScalar& gy);

  const ExtrapolationOptions& options() const { return opts_; }

 private:
  double normal_derivative(const CachedPoint& p, const FEField& u, double t);
  Vec2 gradient_at_interface(const CachedPoint& p, const FEField& u, double t,
                             double dn);

  // u_h(loc) as an affine form, scaled.
  void add_sample(AffineScalar& a, const Located& loc, double scale) const;
  AffineScalar normal_derivative_affine(const CachedPoint& p, double t);
  void gradient_at_interface_affine(const CachedPoint& p,
                                    const AffineScalar& dn, AffineScalar& gx,
                                    AffineScalar& gy);

  const UniformQuadMesh& mesh_;
  const LevelSetField& ls_;
  const BoundaryData& bd_;
  double kappa_;
  const std::function<Vec2(const Vec2&)>* velocity_;
  ExtrapolationOptions opts_;
  ClosestPointCache& cache_;
};

}  // namespace lsfem
