// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Operator assembly (mass/stiffness/advection/penalties/interface load),
// exact linearization of the solution-dependent loads, and the time
// integrators.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "lsfem/benchmarks.hpp"
#include "lsfem/transport.hpp"
#include "test_helpers.hpp"

using namespace lsfem;
using namespace lsfem::testing;

namespace {

// Level set with no zero level inside the domain: H = 1 everywhere, all
// interface bands are empty and the weighted operators reduce to plain ones.
LevelSetField far_inside() {
  return LevelSetField::analytic(
      [](const Vec2&, double) { return 10.0; },
      [](const Vec2&, double) { return Vec2(0, 0); }, 0.0);
}

ProblemSpec diffusion_problem() {
  ProblemSpec p;
  p.kappa = 1.0;
  p.boundary.dirichlet = [](const Vec2& x, double) {
    return (x[0] - 0.5) * (x[0] - 0.5) - (x[1] - 0.5) * (x[1] - 0.5);
  };
  p.initial = [](const Vec2&) { return 0.0; };
  return p;
}

ExtrapolationOptions band_options(const UniformQuadMesh& mesh,
                                  bool damped = false, double m = 2.0) {
  ExtrapolationOptions o;
  o.eps = 2 * mesh.h();
  o.damped = damped;
  o.m_damp = m;
  return o;
}

bool interior_node(const UniformQuadMesh& mesh, int i, int j) {
  return i > 0 && j > 0 && i < mesh.nx() && j < mesh.ny();
}

double sparse_max_abs(const SpMat& A) {
  double m = 0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      m = std::max(m, std::fabs(it.value()));
  return m;
}

}  // namespace

TEST_CASE("mass: with full coverage the standard bilinear mass appears") {
  const auto mesh = UniformQuadMesh::unit(8);
  const double h = mesh.h();
  auto ls = far_inside();
  const ProblemSpec prob = diffusion_problem();
  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob,
                        GhostPenaltyConfig::dirichlet(h, false),
                        band_options(mesh));
  const SpMat M = as.assemble_weighted_mass(ls);

  // symmetry is exact
  const SpMat Mt = SpMat(M.transpose());
  CHECK(sparse_max_abs(SpMat(M - Mt)) == 0.0);

  // row sums are the nodal cell-area shares
  const VecX r = lumped_rows(M);
  for (int j = 0; j <= mesh.ny(); ++j)
    for (int i = 0; i <= mesh.nx(); ++i) {
      const bool bx = (i == 0 || i == mesh.nx());
      const bool by = (j == 0 || j == mesh.ny());
      const double share = h * h / ((bx ? 2.0 : 1.0) * (by ? 2.0 : 1.0));
      CHECK(r[mesh.node_id(i, j)] == doctest::Approx(share).epsilon(1e-13));
    }

  // diagonal of the reference element mass: (h^2/9) at interior nodes
  for (int j = 1; j < mesh.ny(); ++j)
    for (int i = 1; i < mesh.nx(); ++i)
      CHECK(M.coeff(mesh.node_id(i, j), mesh.node_id(i, j)) ==
            doctest::Approx(4.0 * h * h / 9.0).epsilon(1e-13));
}

TEST_CASE("mass: total weighted mass approximates the embedded area") {
  const auto mesh = UniformQuadMesh::unit(128);
  auto ls = circle_analytic(Vec2(0.5, 0.5), 0.25);
  const ProblemSpec prob = diffusion_problem();
  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob,
                        GhostPenaltyConfig::dirichlet(mesh.h(), false),
                        band_options(mesh));
  const SpMat M = as.assemble_weighted_mass(ls);
  double total = 0;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) total += it.value();
  CHECK(total == doctest::Approx(M_PI * 0.0625).epsilon(0.01));
}

TEST_CASE("stiffness: full coverage yields the bilinear nine-point stencil") {
  const auto mesh = UniformQuadMesh::unit(8);
  auto ls = far_inside();
  const ProblemSpec prob = diffusion_problem();  // kappa = 1
  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob,
                        GhostPenaltyConfig::dirichlet(mesh.h(), false),
                        band_options(mesh));
  const SpMat K = as.assemble_stiffness(ls);

  // constants lie in the kernel
  const VecX ones = VecX::Ones(mesh.num_nodes());
  CHECK((K * ones).lpNorm<Eigen::Infinity>() <= 1e-12);

  // interior stencil of the bilinear Laplacian on squares: 8/3 center,
  // -1/3 for all eight neighbours (h-independent in two dimensions)
  const int c = mesh.node_id(4, 4);
  CHECK(K.coeff(c, c) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      CHECK(K.coeff(c, mesh.node_id(4 + di, 4 + dj)) ==
            doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("stiffness: zero diffusivity assembles nothing") {
  const auto mesh = UniformQuadMesh::unit(8);
  auto ls = far_inside();
  ProblemSpec prob = diffusion_problem();
  prob.kappa = 0.0;
  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob,
                        GhostPenaltyConfig::dirichlet(mesh.h(), false),
                        band_options(mesh));
  CHECK(as.assemble_stiffness(ls).nonZeros() == 0);
}

TEST_CASE("advection: divergence-free field, interior row sums vanish") {
  const auto mesh = UniformQuadMesh::unit(8);
  auto ls = far_inside();
  ProblemSpec prob = diffusion_problem();
  prob.kappa = 0.0;
  prob.velocity = [](const Vec2& x) { return Vec2(0.5 - x[1], x[0] - 0.5); };
  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob,
                        GhostPenaltyConfig::dirichlet(mesh.h(), false),
                        band_options(mesh));
  const SpMat C = as.assemble_advection(ls);
  REQUIRE(C.nonZeros() > 0);
  // (C 1)_i = -∫ v . grad(w_i): integration by parts kills every interior row
  const VecX r = C * VecX::Ones(mesh.num_nodes());
  for (int j = 0; j <= mesh.ny(); ++j)
    for (int i = 0; i <= mesh.nx(); ++i)
      if (interior_node(mesh, i, j))
        CHECK(std::fabs(r[mesh.node_id(i, j)]) <= 1e-13);

  ProblemSpec still = diffusion_problem();  // no velocity
  TransportAssembler as2(mesh, QuadratureRule::gauss(3), still,
                         GhostPenaltyConfig::dirichlet(mesh.h(), false),
                         band_options(mesh));
  CHECK(as2.assemble_advection(ls).nonZeros() == 0);
}

TEST_CASE("interface load: empty without an interface, banded with one") {
  const auto quad = QuadratureRule::gauss(3);
  const ProblemSpec prob = diffusion_problem();

  const auto mesh8 = UniformQuadMesh::unit(8);
  auto none = far_inside();
  TransportAssembler as0(mesh8, quad, prob,
                         GhostPenaltyConfig::dirichlet(mesh8.h(), false),
                         band_options(mesh8));
  const FEField zero(mesh8);
  CHECK(as0.assemble_interface_rhs(none, zero, 0.0).lpNorm<Eigen::Infinity>() ==
        0.0);

  const auto mesh = UniformQuadMesh::unit(64);
  const double eps = 2 * mesh.h();
  auto ls = circle_analytic(Vec2(0.5, 0.5), 0.25);
  TransportAssembler as(mesh, quad, prob,
                        GhostPenaltyConfig::dirichlet(mesh.h(), false),
                        band_options(mesh));
  const FEField u = FEField::interpolate(mesh, [&](const Vec2& x) {
    return prob.boundary.dirichlet(x, 0.0);
  });
  const VecX b = as.assemble_interface_rhs(ls, u, 0.0);
  REQUIRE(b.lpNorm<Eigen::Infinity>() > 0.0);
  // The load lives where the delta kernel is resolvable: |phi| up to ~5.3 eps
  // plus one cell of stencil width.
  for (int j = 0; j <= mesh.ny(); ++j)
    for (int i = 0; i <= mesh.nx(); ++i)
      if (std::fabs(b[mesh.node_id(i, j)]) > 1e-14)
        CHECK(std::fabs((mesh.node_pos(i, j) - Vec2(0.5, 0.5)).norm() - 0.25) <=
              5.5 * eps);
}

TEST_CASE("steady residual: exact interpolant satisfies the discrete system "
          "at first order or better") {
  const auto quad = QuadratureRule::gauss(3);
  auto bc = BenchmarkCase::get("elliptic");
  std::vector<double> res;
  for (int nx : {32, 64, 128}) {
    const auto mesh = UniformQuadMesh::unit(nx);
    const double eps = 2 * mesh.h();
    auto ls = circle_analytic(bc.center, bc.radius(0.0));
    TransportAssembler as(mesh, quad, bc.problem,
                          GhostPenaltyConfig::dirichlet(mesh.h(), false),
                          band_options(mesh));
    const FEField u = FEField::interpolate(
        mesh, [&](const Vec2& x) { return bc.problem.exact(x, 0.0); });
    const VecX r = as.assemble_interface_rhs(ls, u, 0.0) +
                   as.assemble_ghost_rhs(ls, u, 0.0) -
                   as.assemble_stiffness(ls) * u.coeffs() -
                   as.penalty_lhs() * u.coeffs();
    double rmax = 0;
    for (int j = 0; j <= mesh.ny(); ++j)
      for (int i = 0; i <= mesh.nx(); ++i)
        if (ls.value(mesh.node_pos(i, j)) >= -6 * eps)
          rmax = std::max(rmax, std::fabs(r[mesh.node_id(i, j)]));
    res.push_back(rmax);
  }
  CHECK(res[1] < res[0]);
  CHECK(res[2] < res[1]);
  CHECK(std::log2(res.front() / res.back()) / 2.0 >= 1.0);
}

TEST_CASE("ghost penalty: global linear data is penalty-free") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(64);
  auto ls = circle_analytic(Vec2(0.5, 0.5), 0.25);
  auto lin = [](const Vec2& x) { return 0.3 + 2.0 * x[0] - x[1]; };
  ProblemSpec prob;
  prob.kappa = 1.0;
  prob.boundary.dirichlet = [lin](const Vec2& x, double) { return lin(x); };
  const FEField u = FEField::interpolate(mesh, lin);

  for (auto kind : {GhostPenaltyConfig::Kind::kDirichlet,
                    GhostPenaltyConfig::Kind::kNeumann}) {
    const auto gp = kind == GhostPenaltyConfig::Kind::kDirichlet
                        ? GhostPenaltyConfig::dirichlet(mesh.h(), false)
                        : GhostPenaltyConfig::neumann(mesh.h(), false);
    TransportAssembler as(mesh, quad, prob, gp, band_options(mesh));
    const VecX res =
        as.penalty_lhs() * u.coeffs() - as.assemble_ghost_rhs(ls, u, 0.0);
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("ghost penalty: strength validation and linear scaling") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(32);
  auto ls = circle_analytic(Vec2(0.5, 0.5), 0.25);
  const ProblemSpec prob = diffusion_problem();

  GhostPenaltyConfig zero;
  zero.gamma = 0.0;
  CHECK_THROWS_AS(
      TransportAssembler(mesh, quad, prob, zero, band_options(mesh)),
      std::invalid_argument);

  // Doubling gamma doubles both sides of the penalty pair.
  GhostPenaltyConfig g1 = GhostPenaltyConfig::dirichlet(mesh.h(), false);
  GhostPenaltyConfig g2 = g1;
  g2.gamma *= 2.0;
  TransportAssembler a1(mesh, quad, prob, g1, band_options(mesh));
  TransportAssembler a2(mesh, quad, prob, g2, band_options(mesh));
  const FEField u = FEField::interpolate(mesh, [](const Vec2& x) {
    return std::sin(5 * x[0]) + x[1];
  });
  const SpMat P1 = a1.penalty_lhs();
  const SpMat P2 = a2.penalty_lhs();
  CHECK(sparse_max_abs(SpMat(2.0 * P1 - P2)) <= 1e-12);
  const VecX r1 = a1.assemble_ghost_rhs(ls, u, 0.0);
  const VecX r2 = a2.assemble_ghost_rhs(ls, u, 0.0);
  CHECK((2.0 * r1 - r2).lpNorm<Eigen::Infinity>() <=
        1e-12 * r2.lpNorm<Eigen::Infinity>());
}

TEST_CASE("linearized loads: affine form equals the assembled load "
          "for every benchmark configuration") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(32);
  const double h = mesh.h();
  std::mt19937 rng(61);
  std::normal_distribution<double> N(0.0, 1.0);

  for (const char* name : {"elliptic", "parabolic", "hyperbolic"}) {
    auto bc = BenchmarkCase::get(name);
    const double t = bc.moving ? 0.3 : 0.0;
    auto ls = circle_analytic(bc.center, bc.radius(t));
    for (bool damped : {false, true}) {
      for (auto kind : {GhostPenaltyConfig::Kind::kDirichlet,
                        GhostPenaltyConfig::Kind::kNeumann}) {
        const auto gp = kind == GhostPenaltyConfig::Kind::kDirichlet
                            ? GhostPenaltyConfig::dirichlet(h, damped)
                            : GhostPenaltyConfig::neumann(h, damped);
        TransportAssembler as(mesh, quad, bc.problem, gp,
                              band_options(mesh, damped));
        VecX coeffs(mesh.num_nodes());
        for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = N(rng);
        const FEField u(mesh, coeffs);

        const auto bif = as.assemble_interface_linearized(ls, t);
        const VecX want_if = as.assemble_interface_rhs(ls, u, t);
        const VecX got_if = bif.constant + bif.jacobian * coeffs;
        const double sif =
            std::max(1.0, want_if.lpNorm<Eigen::Infinity>());
        CHECK((got_if - want_if).lpNorm<Eigen::Infinity>() <= 1e-12 * sif);

        const auto bgh = as.assemble_ghost_linearized(ls, t);
        const VecX want_gh = as.assemble_ghost_rhs(ls, u, t);
        const VecX got_gh = bgh.constant + bgh.jacobian * coeffs;
        const double sgh =
            std::max(1.0, want_gh.lpNorm<Eigen::Infinity>());
        CHECK((got_gh - want_gh).lpNorm<Eigen::Infinity>() <= 1e-12 * sgh);
      }
    }
  }
}

TEST_CASE("implicit step: trapezoidal decay of a generalized eigenmode") {
  const auto mesh = UniformQuadMesh::unit(8);
  auto ls = far_inside();
  const ProblemSpec prob = diffusion_problem();
  const auto gp = GhostPenaltyConfig::dirichlet(mesh.h(), false);
  const auto opts = band_options(mesh);

  // dense oracle: K v = lambda M v
  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob, gp, opts);
  const Eigen::MatrixXd Md = Eigen::MatrixXd(as.assemble_weighted_mass(ls));
  const Eigen::MatrixXd Kd = Eigen::MatrixXd(as.assemble_stiffness(ls));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kd, Md);
  REQUIRE(ges.info() == Eigen::Success);
  const int k = 10;
  const double lambda = ges.eigenvalues()[k];
  const VecX v = ges.eigenvectors().col(k);
  REQUIRE(lambda > 1.0);

  LevelSetField ls2 = far_inside();
  TransportSolver solver(mesh, ls2, prob, gp, opts);
  solver.initialize(0.0);
  solver.state().u.coeffs() = v;
  const double dt = 0.01;
  solver.step_crank_nicolson(dt);
  const double rho = (1 - 0.5 * lambda * dt) / (1 + 0.5 * lambda * dt);
  CHECK((solver.state().u.coeffs() - rho * v).lpNorm<Eigen::Infinity>() <=
        1e-8 * v.lpNorm<Eigen::Infinity>());
  CHECK(solver.state().t == doctest::Approx(dt));
}

TEST_CASE("implicit step: second order in time against the exact decay") {
  const auto mesh = UniformQuadMesh::unit(8);
  auto ls = far_inside();
  const ProblemSpec prob = diffusion_problem();
  const auto gp = GhostPenaltyConfig::dirichlet(mesh.h(), false);
  const auto opts = band_options(mesh);

  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob, gp, opts);
  const Eigen::MatrixXd Md = Eigen::MatrixXd(as.assemble_weighted_mass(ls));
  const Eigen::MatrixXd Kd = Eigen::MatrixXd(as.assemble_stiffness(ls));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kd, Md);
  // an eigenvalue giving lambda * T = O(1)
  int k = 0;
  while (k < ges.eigenvalues().size() - 1 && ges.eigenvalues()[k] < 40.0) ++k;
  const double lambda = ges.eigenvalues()[k];
  const VecX v = ges.eigenvectors().col(k);
  const double T = 2.0 / lambda;

  std::vector<double> err;
  for (int n : {4, 8, 16}) {
    LevelSetField lsn = far_inside();
    TransportSolver solver(mesh, lsn, prob, gp, opts);
    solver.initialize(0.0);
    solver.state().u.coeffs() = v;
    for (int s = 0; s < n; ++s) solver.step_crank_nicolson(T / n);
    err.push_back((solver.state().u.coeffs() - std::exp(-lambda * T) * v)
                      .lpNorm<Eigen::Infinity>());
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("implicit step: a vanishing step leaves the state unchanged") {
  const auto mesh = UniformQuadMesh::unit(8);
  LevelSetField ls = far_inside();
  const ProblemSpec prob = diffusion_problem();
  TransportSolver solver(mesh, ls, prob,
                         GhostPenaltyConfig::dirichlet(mesh.h(), false),
                         band_options(mesh));
  solver.initialize(0.0);
  std::mt19937 rng(62);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int i = 0; i < solver.state().u.coeffs().size(); ++i)
    solver.state().u.coeffs()[i] = N(rng);
  const VecX u0 = solver.state().u.coeffs();
  solver.step_crank_nicolson(1e-8);
  CHECK((solver.state().u.coeffs() - u0).lpNorm<Eigen::Infinity>() <=
        1e-4 * u0.lpNorm<Eigen::Infinity>());
}

TEST_CASE("explicit step: scalar amplification factor is exact") {
  VecX u(3);
  u << 1.0, -2.0, 0.5;
  const double dt = 0.3;
  const VecX u1 = heun_update(
      u, 0.0, dt, [](const VecX& w, double) { return VecX(-w); });
  const double factor = 1.0 - dt + 0.5 * dt * dt;
  CHECK((u1 - factor * u).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("explicit step: constants are preserved without transport") {
  const auto mesh = UniformQuadMesh::unit(8);
  LevelSetField ls = far_inside();
  ProblemSpec prob;
  prob.kappa = 0.0;
  prob.initial = [](const Vec2&) { return 0.7; };
  TransportSolver solver(mesh, ls, prob,
                         GhostPenaltyConfig::dirichlet(mesh.h(), false, true),
                         band_options(mesh));
  solver.initialize(0.0);
  solver.step_heun(0.01);
  CHECK((solver.state().u.coeffs().array() - 0.7).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("steady driver: exhausting the step budget raises an error") {
  const auto mesh = UniformQuadMesh::unit(16);
  LevelSetField ls = far_inside();
  ProblemSpec prob = diffusion_problem();
  prob.initial = [](const Vec2& x) { return x[0]; };
  TransportSolver solver(mesh, ls, prob,
                         GhostPenaltyConfig::dirichlet(mesh.h(), false),
                         band_options(mesh));
  solver.initialize(0.0);
  CHECK_THROWS_AS(solver.solve_steady(1.0, 0.0, 3), SolveError);
}

TEST_CASE("steady driver: interface-free diffusion relaxes to a constant") {
  const auto mesh = UniformQuadMesh::unit(16);
  LevelSetField ls = far_inside();
  ProblemSpec prob = diffusion_problem();
  prob.initial = [](const Vec2& x) { return x[0] - 0.3 * x[1]; };
  TransportSolver solver(mesh, ls, prob,
                         GhostPenaltyConfig::dirichlet(mesh.h(), false),
                         band_options(mesh));
  solver.initialize(0.0);
  const int steps = solver.solve_steady(10.0, 1e-9);
  CHECK(steps <= 50);
  const VecX& u = solver.state().u.coeffs();
  CHECK(u.maxCoeff() - u.minCoeff() <= 1e-6);
}

TEST_CASE("assembled operators: symmetric positive definite combination") {
  const auto mesh = UniformQuadMesh::unit(32);
  auto ls = circle_analytic(Vec2(0.5, 0.5), 0.25);
  const ProblemSpec prob = diffusion_problem();
  TransportAssembler as(mesh, QuadratureRule::gauss(3), prob,
                        GhostPenaltyConfig::dirichlet(mesh.h(), false),
                        band_options(mesh));
  const double dt = 0.1;
  const SpMat A = SpMat(as.assemble_weighted_mass(ls) +
                        0.5 * dt * as.assemble_stiffness(ls) +
                        dt * as.penalty_lhs());
  const SpMat At = SpMat(A.transpose());
  CHECK(sparse_max_abs(SpMat(A - At)) <= 1e-13);
  std::mt19937 rng(63);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    VecX x(mesh.num_nodes());
    for (int i = 0; i < x.size(); ++i) x[i] = N(rng);
    CHECK(x.dot(A * x) > 0.0);
  }
}
