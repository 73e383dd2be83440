// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "lsfem/kernels.hpp"
#include "lsfem/levelset_evolution.hpp"
#include "lsfem/vtk.hpp"

namespace lsfem {

namespace {

double sq(double a) { return a * a; }

// Closed-form solutions of the built-in studies. Both are invariant in
// time: harmonic for the diffusive problems, rotationally symmetric about
// the advection center for the inviscid one.
double saddle(const Vec2& x) { return sq(x.x() - 0.5) - sq(x.y() - 0.5); }
double paraboloid(const Vec2& x) { return sq(x.x() - 0.5) + sq(x.y() - 0.5); }

BenchmarkCase make_elliptic() {
  BenchmarkCase c;
  c.name = "elliptic";
  c.center = Vec2(0.5, 0.5);
  c.radius = [](double) { return 0.25; };
  c.final_time = 0;
  c.dt_factor = 3.2;  // pseudo-time step
  c.problem.kappa = 1.0;
  c.problem.boundary.dirichlet = [](const Vec2& x, double) {
    return saddle(x);
  };
  c.problem.exact = [](const Vec2& x, double) { return saddle(x); };
  return c;
}

BenchmarkCase make_parabolic(bool advect) {
  BenchmarkCase c;
  c.name = advect ? "parabolic-ls" : "parabolic";
  c.center = Vec2(0.5, 0.5);
  c.radius = [](double t) { return 0.25 + 0.15 * t; };
  c.final_time = 1.0;
  c.dt_factor = 3.2;
  c.moving = true;
  c.advect_level_set = advect;
  c.problem.kappa = 1.0;
  c.problem.boundary.dirichlet = [](const Vec2& x, double) {
    return saddle(x);
  };
  c.problem.boundary.normal_velocity = [](const Vec2&, double) {
    return 0.15;  // outward expansion speed of the circle
  };
  c.problem.initial = [](const Vec2& x) { return saddle(x); };
  c.problem.exact = [](const Vec2& x, double) { return saddle(x); };
  return c;
}

BenchmarkCase make_hyperbolic() {
  BenchmarkCase c;
  c.name = "hyperbolic";
  c.center = Vec2(0.75, 0.5);
  c.radius = [](double) { return 0.15; };
  c.final_time = 1.0;
  c.dt_factor = 0.5;
  c.hyperbolic = true;
  c.problem.kappa = 0.0;
  c.problem.velocity = [](const Vec2& x) {
    return Vec2(0.5 - x.y(), x.x() - 0.5);  // solid rotation about (0.5,0.5)
  };
  c.problem.boundary.dirichlet = [](const Vec2& x, double) {
    return paraboloid(x);
  };
  c.problem.initial = [](const Vec2& x) { return paraboloid(x); };
  c.problem.exact = [](const Vec2& x, double) { return paraboloid(x); };
  return c;
}

BenchmarkCase make_extension_circle() {
  BenchmarkCase c;
  c.name = "extension-circle";
  c.center = Vec2(0.0, 0.0);
  c.radius = [](double) { return 1.0; };
  return c;
}

// Signed distance of the case circle, positive inside.
struct CircleLevelSet {
  Vec2 center;
  std::function<double(double)> radius;

  double value(const Vec2& x, double t) const {
    return radius(t) - (x - center).norm();
  }
  Vec2 grad(const Vec2& x, double) const {
    const Vec2 d = x - center;
    const double rho = d.norm();
    if (rho < 1e-30) return Vec2::Zero();
    return Vec2(-d / rho);
  }
};

LevelSetField build_level_set(const BenchmarkCase& bc,
                              const UniformQuadMesh& mesh,
                              const RunOptions& opts) {
  CircleLevelSet circ{bc.center, bc.radius};
  auto phi = [circ](const Vec2& x, double t) { return circ.value(x, t); };
  auto grad = [circ](const Vec2& x, double t) { return circ.grad(x, t); };
  if (opts.analytic_ls) return LevelSetField::analytic(phi, grad, 0.0);
  if (opts.fe_level_set) {
    if (bc.moving)
      throw std::invalid_argument(
          "run_case: the fully discrete level set path supports static "
          "geometry only");
    FEField phi_h = FEField::interpolate(
        mesh, [&](const Vec2& x) { return phi(x, 0.0); });
    return LevelSetField::finite_element(std::move(phi_h), 1e-3,
                                         QuadratureRule::gauss(3), 0.0);
  }
  return LevelSetField::interpolated(mesh, phi, grad, 0.0);
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out += buf;
}

}  // namespace

BenchmarkCase BenchmarkCase::get(const std::string& name) {
  if (name == "elliptic") return make_elliptic();
  if (name == "parabolic") return make_parabolic(false);
  if (name == "parabolic-ls") return make_parabolic(true);
  if (name == "hyperbolic") return make_hyperbolic();
  if (name == "extension-circle") return make_extension_circle();
  throw std::invalid_argument("unknown benchmark case: " + name);
}

std::vector<std::string> BenchmarkCase::names() {
  return {"elliptic", "parabolic", "hyperbolic", "parabolic-ls",
          "extension-circle"};
}

std::vector<double> eoc(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t k = 1; k < errors.size(); ++k)
    out.push_back(std::log2(errors[k - 1] / errors[k]));
  return out;
}

double l2_error(const FEField& u_h,
                const std::function<double(const Vec2&, double)>& exact,
                double t,
                const std::function<double(const Vec2&, double)>& phi,
                double eps_finest, const QuadratureRule& quad) {
  const UniformQuadMesh& mesh = u_h.mesh();
  const double h = mesh.h();
  const double jac = h * h;
  const int nq = static_cast<int>(quad.size());
  double acc = 0;
  for (int cy = 0; cy < mesh.ny(); ++cy)
    for (int cx = 0; cx < mesh.nx(); ++cx) {
      const Vec2 corner = mesh.cell_origin(cx, cy);
      for (int qp = 0; qp < nq; ++qp) {
        const Vec2 x = corner + h * quad.points[qp];
        const double w = heaviside_eps(phi(x, t), eps_finest);
        if (w == 0) continue;
        const Located loc{cx, cy, quad.points[qp].x(), quad.points[qp].y()};
        acc += quad.weights[qp] * jac * w * sq(u_h.eval_at(loc) - exact(x, t));
      }
    }
  return std::sqrt(acc);
}

namespace {

// One mesh level of the advected-interface parabolic study: the level set is
// carried by the conservative evolver with the interface speed read back off
// the discrete field, and each transport step sees the old, midpoint and new
// geometry snapshots.
LevelResult run_advected_level(const BenchmarkCase& bc, ProblemSpec& problem,
                               const UniformQuadMesh& mesh,
                               GhostPenaltyConfig gp,
                               const ExtrapolationOptions& xopts,
                               const RunOptions& opts, double dt, int n_steps,
                               double* radius_out) {
  const double eps = xopts.eps;
  const double h = mesh.h();
  const QuadratureRule q3 = QuadratureRule::gauss(3);
  CircleLevelSet circ{bc.center, bc.radius};

  LevelSetState lss = make_level_set_state(
      FEField::interpolate(mesh,
                           [&](const Vec2& x) { return circ.value(x, 0.0); }),
      1e-3, q3, 0.0);

  EvolutionParams ep;
  ep.eps = eps;
  ep.dt = dt;
  ep.lambda = h;
  LevelSetEvolver evolver(mesh, q3, ep);

  LevelSetField geo_old =
      LevelSetField::finite_element(lss.phi, 1e-3, q3, lss.t);
  TransportSolver solver(mesh, geo_old, problem, gp, xopts, opts.lin);
  solver.initialize(0.0);

  for (int k = 0; k < n_steps; ++k) {
    auto vel = build_interface_velocity(lss, mesh, eps, 0.15, opts.search);
    LevelSetState lss_new = evolver.evolve_step(lss, vel, opts.lin);

    auto mid = std::make_shared<FEField>(
        mesh, VecX(0.5 * (lss.phi.coeffs() + lss_new.phi.coeffs())));
    LevelSetField geo_mid =
        LevelSetField::finite_element(*mid, 1e-3, q3, lss.t + 0.5 * dt);
    LevelSetField geo_new =
        LevelSetField::finite_element(lss_new.phi, 1e-3, q3, lss_new.t);

    // Interface speed consistent with the discrete motion law, evaluated on
    // the midpoint field the loads are assembled on.
    problem.boundary.normal_velocity_cp =
        [mid, eps, mp = &mesh](const ClosestPointResult& cp, double) {
          if (!mp->contains(cp.x_shifted)) return 0.0;
          return 0.15 * mid->eval(cp.x_shifted) / eps;
        };

    solver.step_crank_nicolson_fields(geo_old, geo_mid, geo_new, dt);
    lss = std::move(lss_new);
    geo_old = std::move(geo_new);
  }
  problem.boundary.normal_velocity_cp = nullptr;

  if (radius_out)
    *radius_out = std::sqrt(volume(lss, mesh, eps, q3) / std::numbers::pi);
  return LevelResult{mesh.nx(), 0.0, solver.state().u};
}

CaseResult run_extension_case(const std::vector<int>& levels,
                              const RunOptions& opts) {
  CaseResult out;
  std::vector<double> errs;
  for (int nx : levels) {
    ExtensionErrors e = run_extension_circle(nx, opts);
    errs.push_back(e.l2);
    ConvergenceRow row;
    row.inv_h = nx;
    row.l2_error = e.l2;
    out.rows.push_back(row);
  }
  const std::vector<double> rates = eoc(errs);
  for (std::size_t k = 1; k < out.rows.size(); ++k)
    out.rows[k].eoc = rates[k - 1];
  if (!opts.out_dir.empty())
    write_csv(opts.out_dir + "/" + csv_name("extension-circle", opts),
              out.rows);
  return out;
}

}  // namespace

CaseResult run_case(const std::string& name, const std::vector<int>& levels,
                    const RunOptions& opts) {
  if (levels.empty())
    throw std::invalid_argument("run_case: need at least one mesh level");
  const BenchmarkCase bc = BenchmarkCase::get(name);
  if (name == "extension-circle") return run_extension_case(levels, opts);

  ProblemSpec problem = bc.problem;
  CircleLevelSet circ{bc.center, bc.radius};
  auto phi_exact = [circ](const Vec2& x, double t) { return circ.value(x, t); };

  const double h_finest = 1.0 / levels.back();
  const double eps_finest = opts.eps_factor * h_finest;
  const QuadratureRule q3 = QuadratureRule::gauss(3);

  CaseResult out;
  std::vector<double> errors;
  for (int nx : levels) {
    const UniformQuadMesh mesh = UniformQuadMesh::unit(nx);
    const double h = mesh.h();
    const double eps = opts.eps_factor * h;
    const GhostPenaltyConfig gp =
        opts.ghost == GhostPenaltyConfig::Kind::kDirichlet
            ? GhostPenaltyConfig::dirichlet(h, opts.damped,
                                            /*lumped=*/bc.hyperbolic)
            : GhostPenaltyConfig::neumann(h, opts.damped);
    ExtrapolationOptions xopts;
    xopts.eps = eps;
    xopts.m_damp = opts.m_damp;
    xopts.damped = opts.damped;
    xopts.search = opts.search;
    xopts.grad_mode = opts.grad_mode;

    LevelResult lr{nx, 0.0, FEField(mesh)};
    double t_final = 0;
    std::optional<double> inv_dt;

    if (bc.final_time == 0) {
      LevelSetField ls = build_level_set(bc, mesh, opts);
      TransportSolver solver(mesh, ls, problem, gp, xopts, opts.lin);
      // The lagged-extrapolation fixed point contracts only below a
      // geometry-dependent pseudo-step; halve on divergence and restart
      // (the steady limit does not depend on the step size).
      double pseudo_dt = bc.dt_factor * h;
      for (int attempt = 0;; ++attempt) {
        solver.initialize(0.0);
        try {
          solver.solve_steady(pseudo_dt, opts.steady_tol,
                              opts.steady_max_steps);
          break;
        } catch (const SolveError&) {
          if (attempt >= 8) throw;
          pseudo_dt *= 0.5;
        }
      }
      lr.u = solver.state().u;
    } else {
      const double dt0 = bc.dt_factor * h;
      const int n_steps = static_cast<int>(std::lround(bc.final_time / dt0));
      const double dt = bc.final_time / n_steps;
      inv_dt = 1.0 / dt;
      t_final = bc.final_time;

      if (bc.advect_level_set) {
        double radius = 0;
        lr = run_advected_level(bc, problem, mesh, gp, xopts, opts, dt,
                                n_steps, &radius);
        out.final_radius.push_back(radius);
      } else {
        LevelSetField ls = build_level_set(bc, mesh, opts);
        TransportSolver solver(mesh, ls, problem, gp, xopts, opts.lin);
        solver.initialize(0.0);
        for (int k = 0; k < n_steps; ++k) {
          if (bc.hyperbolic)
            solver.step_heun(dt);
          else
            solver.step_crank_nicolson(dt);
        }
        lr.u = solver.state().u;
      }
    }

    lr.l2 = l2_error(lr.u, problem.exact, t_final, phi_exact, eps_finest, q3);
    errors.push_back(lr.l2);

    ConvergenceRow row;
    row.inv_h = nx;
    row.inv_dt = inv_dt;
    row.l2_error = lr.l2;
    out.rows.push_back(row);

    if (opts.write_vtk && !opts.out_dir.empty()) {
      FEField phi_h = FEField::interpolate(
          mesh, [&](const Vec2& x) { return phi_exact(x, t_final); });
      const VecX& uc = lr.u.coeffs();
      const VecX& pc = phi_h.coeffs();
      write_structured_points(
          opts.out_dir + "/" + name + "_" + std::to_string(nx) + ".vtk", mesh,
          {{"u", &uc}, {"phi", &pc}});
    }
    out.levels.push_back(std::move(lr));
  }

  const std::vector<double> rates = eoc(errors);
  for (std::size_t k = 1; k < out.rows.size(); ++k)
    out.rows[k].eoc = rates[k - 1];

  if (!opts.out_dir.empty())
    write_csv(opts.out_dir + "/" + csv_name(name, opts), out.rows);
  return out;
}

ExtensionErrors run_extension_circle(int nx, const RunOptions& opts) {
  const UniformQuadMesh mesh = UniformQuadMesh::box(nx, Vec2(-2.0, -2.0), 4.0);
  const double h = mesh.h();
  const double eps = opts.eps_factor * h;

  auto phi = [](const Vec2& x, double) { return 1.0 - x.norm(); };
  auto grad = [](const Vec2& x, double) {
    const double r = x.norm();
    return r < 1e-30 ? Vec2::Zero() : Vec2(-x / r);
  };
  LevelSetField ls =
      opts.analytic_ls
          ? LevelSetField::analytic(phi, grad, 0.0)
          : LevelSetField::interpolated(mesh, phi, grad, 0.0);

  // Interface datum and its exact constant extension along radial normals:
  // the point (x,y) projects to (x,y)/r, where the datum evaluates to
  // (y/r)(1 + y/r) = y (r + y) / r^2.
  auto datum = [](const Vec2& p) { return p.y() * (1.0 + p.y()); };
  auto exact_extension = [](const Vec2& p) {
    const double r = p.norm();
    return p.y() * (r + p.y()) / (r * r);
  };

  ExtensionErrors out;
  out.nx = nx;
  double sum_sq = 0;
  for (int node = 0; node < mesh.num_nodes(); ++node) {
    const Vec2 x = mesh.node_pos(node);
    if (std::abs(ls.value(x)) > 2.0 * eps) continue;
    const ClosestPointResult cp = closest_point(opts.search, ls, mesh, x, eps);
    if (!cp.ok())
      throw SearchError("extension-circle: projection failed at band node");
    const double err = std::abs(datum(cp.x_interface) - exact_extension(x));
    out.linf = std::max(out.linf, err);
    sum_sq += err * err;
  }
  out.l2 = std::sqrt(sum_sq * h * h);
  return out;
}

void write_csv(const std::string& path,
               const std::vector<ConvergenceRow>& rows) {
  std::string body = "inv_h,inv_dt,l2_error,eoc\n";
  for (const ConvergenceRow& r : rows) {
    append_number(body, r.inv_h);
    body += ',';
    if (r.inv_dt) append_number(body, *r.inv_dt);
    body += ',';
    append_number(body, r.l2_error);
    body += ',';
    if (r.eoc) append_number(body, *r.eoc);
    body += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  f << body;
}

std::string csv_name(const std::string& case_name, const RunOptions& opts) {
  std::string name = case_name;
  name += opts.ghost == GhostPenaltyConfig::Kind::kDirichlet ? "_dirichlet"
                                                             : "_neumann";
  name += opts.damped ? "_damped" : "_full";
  name += ".csv";
  return name;
}

}  // namespace lsfem
