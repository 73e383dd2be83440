// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Conservative level-set evolution: stationarity, transport, band-limited
// interface velocities and the regularized volume.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "lsfem/kernels.hpp"
#include "lsfem/levelset_evolution.hpp"
#include "test_helpers.hpp"

using namespace lsfem;
using namespace lsfem::testing;

namespace {

const Vec2 kCenter(0.5, 0.5);
constexpr double kRadius = 0.25;

LevelSetState circle_state(const UniformQuadMesh& mesh,
                           const QuadratureRule& quad) {
  return make_level_set_state(
      FEField::interpolate(
          mesh, [](const Vec2& x) { return circle_sdf(x, kCenter, kRadius); }),
      1e-3, quad, 0.0);
}

EvolutionParams params_for(const UniformQuadMesh& mesh) {
  EvolutionParams p;
  p.eps = 2 * mesh.h();
  p.dt = mesh.h();
  p.lambda = mesh.h();
  return p;
}

// Interface centroid: delta-kernel weighted first moment of the band.
Vec2 band_centroid(const LevelSetState& s, const UniformQuadMesh& mesh,
                   double eps, const QuadratureRule& quad) {
  Vec2 num = Vec2::Zero();
  double den = 0;
  for (int iy = 0; iy < mesh.ny(); ++iy)
    for (int ix = 0; ix < mesh.nx(); ++ix)
      for (std::size_t qp = 0; qp < quad.size(); ++qp) {
        const Located loc{ix, iy, quad.points[qp][0], quad.points[qp][1]};
        const Vec2 xq =
            mesh.cell_origin(ix, iy) + mesh.h() * quad.points[qp];
        const double w = delta_eps(s.phi.eval_at(loc), eps) *
                         s.phi.eval_grad_at(loc).norm() * quad.weights[qp];
        num += w * xq;
        den += w;
      }
  return Vec2(num / den);
}

}  // namespace

TEST_CASE("evolution: a signed-distance circle is stationary in the band") {
  const auto quad = QuadratureRule::gauss(3);
  auto still = [](const Vec2&) { return Vec2(0, 0); };
  std::vector<double> drift;
  for (int nx : {32, 64}) {
    const auto mesh = UniformQuadMesh::unit(nx);
    const double eps = 2 * mesh.h();
    LevelSetEvolver ev(mesh, quad, params_for(mesh));
    const auto s0 = circle_state(mesh, quad);
    const auto s1 = ev.evolve_step(s0, still);
    double band_drift = 0;
    for (int id = 0; id < mesh.num_nodes(); ++id)
      if (std::fabs(s0.phi.coeffs()[id]) <= 2 * eps)
        band_drift = std::max(
            band_drift, std::fabs(s1.phi.coeffs()[id] - s0.phi.coeffs()[id]));
    CHECK(band_drift <= 0.5 * mesh.h() * mesh.h());
    drift.push_back(band_drift);

    // ...and stays bounded over many steps
    auto s = s0;
    for (int k = 0; k < 10; ++k) s = ev.evolve_step(s, still);
    double cum = 0;
    for (int id = 0; id < mesh.num_nodes(); ++id)
      if (std::fabs(s0.phi.coeffs()[id]) <= 2 * eps)
        cum = std::max(cum,
                       std::fabs(s.phi.coeffs()[id] - s0.phi.coeffs()[id]));
    CHECK(cum <= mesh.h());
  }
  CHECK(drift[1] <= 0.35 * drift[0]);  // better than first order
}

TEST_CASE("evolution: uniform translation moves the interface centroid") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(64);
  const double h = mesh.h();
  const double eps = 2 * h;
  LevelSetEvolver ev(mesh, quad, params_for(mesh));
  auto s = circle_state(mesh, quad);
  const Vec2 c0 = band_centroid(s, mesh, eps, quad);
  CHECK((c0 - kCenter).norm() <= 1e-3);

  auto vel = [](const Vec2&) { return Vec2(0.2, 0.0); };
  const int steps = static_cast<int>(std::round(0.25 / h));
  for (int k = 0; k < steps; ++k) s = ev.evolve_step(s, vel);
  const Vec2 shift = band_centroid(s, mesh, eps, quad) - c0;
  CHECK(std::fabs(shift.x() - 0.2 * steps * h) <= h);
  CHECK(std::fabs(shift.y()) <= h);

  // the distance profile survives the transport
  int band_nodes = 0;
  for (int id = 0; id < mesh.num_nodes(); ++id)
    if (std::fabs(s.phi.coeffs()[id]) <= 2 * eps) {
      ++band_nodes;
      const double qn = s.q.q.row(id).norm();
      CHECK(qn >= 0.9);
      CHECK(qn <= 1.1);
    }
  CHECK(band_nodes > 100);
}

TEST_CASE("evolution: radial expansion grows the area at the exact rate") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(64);
  const double eps = 2 * mesh.h();
  LevelSetEvolver ev(mesh, quad, params_for(mesh));
  const auto s0 = circle_state(mesh, quad);
  auto vel = [](const Vec2& x) {
    const Vec2 d = x - kCenter;
    const double rho = d.norm();
    return rho < 1e-12 ? Vec2(0, 0) : Vec2(0.15 * d / rho);
  };
  const double v0 = volume(s0, mesh, eps, quad);
  const auto s1 = ev.evolve_step(s0, vel);
  const double v1 = volume(s1, mesh, eps, quad);
  // d/dt |Omega| = speed * perimeter = 0.15 * 2 pi r
  const double want = 0.15 * 2 * M_PI * kRadius * params_for(mesh).dt;
  CHECK(v1 - v0 == doctest::Approx(want).epsilon(0.2));
}

TEST_CASE("interface velocity: recovered speed and band truncation") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(64);
  const double eps = 2 * mesh.h();
  const auto s = circle_state(mesh, quad);
  auto vel = build_interface_velocity(s, mesh, eps, 0.15, SearchAlgo::kTraversal);

  // near the interface: v = -V q with V ~ 0.15, q pointing inward
  const Vec2 x(0.77, 0.5);
  const Vec2 v = vel(x);
  CHECK(v.x() == doctest::Approx(0.15).epsilon(0.06));
  CHECK(std::fabs(v.y()) <= 0.01);

  // outside the delta band the extension is identically zero
  CHECK(vel(Vec2(0.1, 0.1)).norm() == 0.0);
  CHECK(vel(Vec2(0.5, 0.5)).norm() == 0.0);
}

TEST_CASE("interface velocity: speed scales with the level-set slope") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(64);
  const double eps = 2 * mesh.h();
  // Scaling the distance field by 1.1 scales the recovered speed the same
  // way: V = speed * phi(x_shifted)/eps and phi(x_shifted) ~ 1.1 eps.
  auto scaled = make_level_set_state(
      FEField::interpolate(
          mesh,
          [](const Vec2& x) { return 1.1 * circle_sdf(x, kCenter, kRadius); }),
      1e-3, quad, 0.0);
  auto vel =
      build_interface_velocity(scaled, mesh, eps, 0.15, SearchAlgo::kTraversal);
  const double speed = vel(Vec2(0.77, 0.5)).x();
  CHECK(speed == doctest::Approx(0.165).epsilon(0.05));
}

TEST_CASE("volume: circle, empty set and half plane") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(128);
  const double eps = 2 * mesh.h();

  const auto circ = circle_state(mesh, quad);
  CHECK(volume(circ, mesh, eps, quad) ==
        doctest::Approx(M_PI / 16.0).epsilon(0.01));

  const auto empty = make_level_set_state(
      FEField::interpolate(mesh, [](const Vec2&) { return -0.6; }), 1e-3,
      quad, 0.0);
  CHECK(volume(empty, mesh, eps, quad) <= 1e-6);

  const auto half = make_level_set_state(
      FEField::interpolate(mesh, [](const Vec2& x) { return x[0] - 0.5; }),
      1e-3, quad, 0.0);
  CHECK(volume(half, mesh, eps, quad) == doctest::Approx(0.5).epsilon(1e-3));
}
