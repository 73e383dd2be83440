// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/closest_point.hpp"

#include <bit>
#include <cmath>

namespace lsfem {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr int kBisectSteps = 30;      // analytic bracket refinement
constexpr double kBracketTol = 1e-12; // discrete bracket width target

// Direction of the projection ray from x_query: sign(phi) * (-q/|q|).
// Returns false when q is too short to normalize.
bool ray_direction(const LevelSetField& ls, const Vec2& x, double phi,
                   Vec2* n_out, Vec2* p_out) {
  const Vec2 q = ls.q(x);
  const double qn = q.norm();
  if (qn <= kDegenerate) return false;
  *n_out = -q / qn;
  *p_out = (phi < 0 ? -1.0 : 1.0) * (*n_out);
  return true;
}

ClosestPointResult finish(const LevelSetField& ls, const Vec2& x_query,
                          const Vec2& x_gamma, double xi, int steps,
                          double eps) {
  ClosestPointResult r;
  r.x_query = x_query;
  r.x_interface = x_gamma;
  r.xi = xi;
  r.steps = steps;
  const Vec2 qg = ls.q(x_gamma);
  const double qn = qg.norm();
  if (qn <= kDegenerate) {
    r.status = CpStatus::kDegenerateNormal;
    return r;
  }
  r.normal = -qg / qn;
  r.x_shifted = x_gamma - eps * r.normal;
  r.status = CpStatus::kOk;
  return r;
}

ClosestPointResult fail(const Vec2& x_query, CpStatus status, int steps = 0) {
  ClosestPointResult r;
  r.x_query = x_query;
  r.status = status;
  r.steps = steps;
  return r;
}

// Root of the level set restricted to the segment x(s), s in [s0, s1], that
// stays within a single cell. On a discrete field the restriction is a
// quadratic polynomial and is solved exactly (smaller admissible root
// preferred); analytic fields are bisected.
double segment_root(const LevelSetField& ls, const Vec2& x_query,
                    const Vec2& dir, double s0, double s1, double phi0,
                    double phi1) {
  auto at = [&](double s) { return x_query + s * dir; };
  if (ls.has_fe()) {
    const double phim = ls.cp_value(at(0.5 * (s0 + s1)));
    // p(t) = a t^2 + b t + c on t in [0,1]
    const double c = phi0;
    const double a = 2 * phi0 - 4 * phim + 2 * phi1;
    const double b = phi1 - phi0 - a;
    const double scale = std::abs(phi0) + std::abs(phim) + std::abs(phi1);
    double t_root;
    if (std::abs(a) <= 1e-14 * std::max(scale, 1e-300)) {
      t_root = -c / b;
    } else {
      double disc = b * b - 4 * a * c;
      if (disc < 0) disc = 0;  // sign change guarantees a real root
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (b + (b >= 0 ? sq : -sq));
      double t1 = qq / a;
      double t2 = (qq != 0) ? c / qq : t1;
      if (t1 > t2) std::swap(t1, t2);
      constexpr double slack = 1e-10;
      if (t1 >= -slack && t1 <= 1 + slack)
        t_root = t1;
      else if (t2 >= -slack && t2 <= 1 + slack)
        t_root = t2;
      else  // roundoff pushed both roots out; take the nearer one
        t_root = std::clamp(std::abs(t1 - 0.5) < std::abs(t2 - 0.5) ? t1 : t2,
                            0.0, 1.0);
    }
    t_root = std::clamp(t_root, 0.0, 1.0);
    return s0 + t_root * (s1 - s0);
  }

  double lo = s0, hi = s1, flo = phi0;
  (void)phi1;
  for (int it = 0; it < kBisectSteps; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ls.cp_value(at(mid));
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ClosestPointResult closest_point_traversal(const LevelSetField& ls,
                                           const UniformQuadMesh& mesh,
                                           const Vec2& x_query, double eps) {
  const auto loc0 = mesh.locate(x_query);
  if (!loc0) return fail(x_query, CpStatus::kOutsideDomain);

  const double phi0 = ls.cp_value(x_query);
  if (phi0 == 0) return finish(ls, x_query, x_query, 0, 0, eps);

  Vec2 n, p;
  if (!ray_direction(ls, x_query, phi0, &n, &p))
    return fail(x_query, CpStatus::kDegenerateNormal);

  const int max_steps = mesh.nx() + mesh.ny();
  CellIndex cell{loc0->ix, loc0->iy};
  Vec2 x_prev = x_query;
  double s_prev = 0, phi_prev = phi0;

  for (int step = 1; step <= max_steps; ++step) {
    const RayExit exit = mesh.ray_exit(cell, x_prev, p);
    const double s_here = s_prev + exit.t;
    const double phi_here = ls.cp_value(exit.point);

    if (phi_here == 0) return finish(ls, x_query, exit.point, s_here, step, eps);
    if ((phi_here < 0) != (phi_prev < 0)) {
      const double s_root =
          segment_root(ls, x_query, p, s_prev, s_here, phi_prev, phi_here);
      return finish(ls, x_query, x_query + s_root * p, s_root, step, eps);
    }
    if (!exit.next) return fail(x_query, CpStatus::kNoInterface, step);

    cell = *exit.next;
    x_prev = exit.point;
    s_prev = s_here;
    phi_prev = phi_here;
  }
  return fail(x_query, CpStatus::kSearchFailure, max_steps);
}

ClosestPointResult closest_point_bisection(const LevelSetField& ls,
                                           const UniformQuadMesh& mesh,
                                           const Vec2& x_query, double eps) {
  const auto loc0 = mesh.locate(x_query);
  if (!loc0) return fail(x_query, CpStatus::kOutsideDomain);

  const double phi0 = ls.cp_value(x_query);
  if (phi0 == 0) return finish(ls, x_query, x_query, 0, 0, eps);

  Vec2 n, p;
  if (!ray_direction(ls, x_query, phi0, &n, &p))
    return fail(x_query, CpStatus::kDegenerateNormal);

  // Discrete fields cannot be sampled outside the mesh.
  auto evaluable = [&](const Vec2& x) {
    return !ls.has_fe() || mesh.contains(x);
  };
  auto at = [&](double s) { return x_query + s * p; };

  const double s_star = std::abs(phi0);
  const double h = mesh.h();
  const int max_m = mesh.nx() + mesh.ny();

  double lo = 0, hi = 0, flo = 0, fhi = 0;
  bool bracketed = false;
  int m_used = 0;
  for (int m = 1; m <= max_m; ++m) {
    lo = s_star - m * h;
    hi = s_star + m * h;
    if (!evaluable(at(lo)) || !evaluable(at(hi))) break;
    flo = ls.cp_value(at(lo));
    fhi = ls.cp_value(at(hi));
    if ((flo < 0) != (fhi < 0) || flo == 0 || fhi == 0) {
      bracketed = true;
      m_used = m;
      break;
    }
  }
  if (!bracketed) return fail(x_query, CpStatus::kSearchFailure);
  // Analytic fields can be sampled beyond the mesh, but an interface point
  // out there is useless to every consumer (shifted evaluation points must
  // stay inside the domain), so such roots count as misses.
  auto accept = [&](double s, int m) {
    return mesh.contains(at(s))
               ? finish(ls, x_query, at(s), s, m, eps)
               : fail(x_query, CpStatus::kNoInterface);
  };
  if (flo == 0) return accept(lo, m_used);
  if (fhi == 0) return accept(hi, m_used);

  while (hi - lo > kBracketTol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ls.cp_value(at(mid));
    if (fm == 0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double s_root = 0.5 * (lo + hi);
  return accept(s_root, m_used);
}

ClosestPointCache::Key ClosestPointCache::make_key(const Vec2& x) {
  return Key{std::bit_cast<std::uint64_t>(x.x()),
             std::bit_cast<std::uint64_t>(x.y())};
}

const CachedPoint* ClosestPointCache::find(const Vec2& x) const {
  const auto it = map_.find(make_key(x));
  return it == map_.end() ? nullptr : &it->second;
}

const CachedPoint& ClosestPointCache::insert(const Vec2& x,
                                             CachedPoint entry) {
  return map_.insert_or_assign(make_key(x), std::move(entry)).first->second;
}

void ClosestPointCache::reset(std::uint64_t epoch) {
  if (epoch != epoch_) {
    map_.clear();
    epoch_ = epoch;
  }
}

}  // namespace lsfem
