// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Error norms, convergence-order bookkeeping, benchmark wiring and CSV
// output determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lsfem/benchmarks.hpp"
#include "lsfem/kernels.hpp"
#include "test_helpers.hpp"

using namespace lsfem;
using namespace lsfem::testing;

namespace {

double circle_phi(const Vec2& x, double) {
  return circle_sdf(x, Vec2(0.5, 0.5), 0.25);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("eoc: pairwise halving orders") {
  const auto two = eoc({4e-3, 1e-3});
  REQUIRE(two.size() == 1);
  CHECK(two[0] == doctest::Approx(2.0).epsilon(1e-12));

  const auto rough = eoc({4.11e-3, 2.35e-3});
  REQUIRE(rough.size() == 1);
  CHECK(rough[0] == doctest::Approx(std::log2(4.11 / 2.35)).epsilon(1e-12));
  CHECK(rough[0] == doctest::Approx(0.81).epsilon(0.01));

  CHECK(eoc({}).empty());
  CHECK(eoc({1e-3}).empty());
}

TEST_CASE("l2 error: exact interpolants of linear data have zero error") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(32);
  auto exact = [](const Vec2& x, double) { return 2 * x[0] - x[1] + 0.3; };
  const FEField u = FEField::interpolate(
      mesh, [&](const Vec2& x) { return exact(x, 0.0); });
  CHECK(l2_error(u, exact, 0.0, circle_phi, 2 * mesh.h(), quad) <= 1e-14);
}

TEST_CASE("l2 error: a constant offset integrates to offset * sqrt(area)") {
  const auto quad = QuadratureRule::gauss(3);
  const auto mesh = UniformQuadMesh::unit(64);
  const double eps = 2 * mesh.h();
  auto exact = [](const Vec2& x, double) { return 2 * x[0] - x[1] + 0.3; };
  const FEField u = FEField::interpolate(
      mesh, [&](const Vec2& x) { return exact(x, 0.0) + 1e-3; });
  const double got = l2_error(u, exact, 0.0, circle_phi, eps, quad);

  // independent oracle: the regularized area on a finer mesh
  const auto fine = UniformQuadMesh::unit(256);
  double area = 0;
  for (int iy = 0; iy < fine.ny(); ++iy)
    for (int ix = 0; ix < fine.nx(); ++ix)
      for (std::size_t qp = 0; qp < quad.size(); ++qp) {
        const Vec2 xq = fine.cell_origin(ix, iy) + fine.h() * quad.points[qp];
        area += quad.weights[qp] * fine.h() * fine.h() *
                heaviside_eps(circle_phi(xq, 0.0), eps);
      }
  CHECK(got == doctest::Approx(1e-3 * std::sqrt(area)).epsilon(1e-8));
}

TEST_CASE("l2 error: interpolation error of smooth data is second order") {
  const auto quad = QuadratureRule::gauss(3);
  auto exact = [](const Vec2& x, double) {
    return (x[0] - 0.5) * (x[0] - 0.5) - (x[1] - 0.5) * (x[1] - 0.5);
  };
  const double eps_finest = 2.0 / 64;
  std::vector<double> err;
  for (int nx : {32, 64}) {
    const auto mesh = UniformQuadMesh::unit(nx);
    const FEField u = FEField::interpolate(
        mesh, [&](const Vec2& x) { return exact(x, 0.0); });
    err.push_back(l2_error(u, exact, 0.0, circle_phi, eps_finest, quad));
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.15));
  const auto orders = eoc(err);
  REQUIRE(orders.size() == 1);
  CHECK(orders[0] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("benchmarks: unknown case names are rejected") {
  CHECK_THROWS_AS(BenchmarkCase::get("nonexistent"), std::invalid_argument);
  CHECK_THROWS_AS(run_case("nonexistent", {16}, RunOptions{}),
                  std::invalid_argument);
  CHECK(BenchmarkCase::names().size() == 5);
}

TEST_CASE("benchmarks: steady diffusion smoke run converges near second "
          "order") {
  RunOptions opts;
  const CaseResult res = run_case("elliptic", {16, 32}, opts);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].inv_h == doctest::Approx(16.0));
  CHECK(res.rows[1].inv_h == doctest::Approx(32.0));
  CHECK_FALSE(res.rows[0].eoc.has_value());
  REQUIRE(res.rows[1].eoc.has_value());
  CHECK(res.rows[0].l2_error == doctest::Approx(2.5e-3).epsilon(0.35));
  CHECK(*res.rows[1].eoc >= 1.4);
}

TEST_CASE("benchmarks: CSV output is byte-deterministic") {
  RunOptions opts;
  opts.out_dir = "/tmp/lsfem_csv_a";
  std::system("mkdir -p /tmp/lsfem_csv_a /tmp/lsfem_csv_b");
  run_case("elliptic", {16, 32}, opts);
  opts.out_dir = "/tmp/lsfem_csv_b";
  run_case("elliptic", {16, 32}, opts);

  CHECK(csv_name("elliptic", opts) == "elliptic_dirichlet_full.csv");
  const std::string a = slurp("/tmp/lsfem_csv_a/elliptic_dirichlet_full.csv");
  const std::string b = slurp("/tmp/lsfem_csv_b/elliptic_dirichlet_full.csv");
  CHECK(a == b);
  CHECK(a.rfind("inv_h,inv_dt,l2_error,eoc\n", 0) == 0);
  // steady case: the time-step column stays empty
  CHECK(a.find("16,,") != std::string::npos);
}

TEST_CASE("benchmarks: csv naming reflects penalty kind and band mode") {
  RunOptions opts;
  opts.ghost = GhostPenaltyConfig::Kind::kNeumann;
  opts.damped = true;
  CHECK(csv_name("elliptic", opts) == "elliptic_neumann_damped.csv");
}

TEST_CASE("extension study: band error drops under refinement") {
  RunOptions opts;
  const auto a = run_extension_circle(64, opts);
  const auto b = run_extension_circle(128, opts);
  CHECK(a.nx == 64);
  CHECK(b.nx == 128);
  CHECK(a.linf > 0.0);
  CHECK(b.linf < a.linf);
  CHECK(b.l2 < a.l2);
}
