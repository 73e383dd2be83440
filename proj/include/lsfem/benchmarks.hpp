// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsfem/transport.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

// Built-in convergence studies on circular embedded domains in (0,1)^2:
//
//   elliptic    steady diffusion, fixed circle, pseudo-time marching
//   parabolic   diffusion inside a circle whose radius grows linearly,
//               Crank-Nicolson with dt = 3.2 h
//   hyperbolic  solid-body rotation past a fixed circle, two-stage
//               second-order stepping with dt = 0.5 h, lumped penalty
//   parabolic-ls  the parabolic case with the level set advected
//               numerically instead of prescribed
//
// plus `extension-circle`, a constant-extension accuracy study on (-2,2)^2.
struct BenchmarkCase {
  std::string name;
  Vec2 center = Vec2::Zero();
  std::function<double(double)> radius;      // r(t)
  double final_time = 0;                     // 0: steady problem
  double dt_factor = 0;                      // dt = dt_factor * h
  bool hyperbolic = false;
  bool moving = false;
  bool advect_level_set = false;
  ProblemSpec problem;

  static BenchmarkCase get(const std::string& name);
  static std::vector<std::string> names();
};

struct ConvergenceRow {
  double inv_h = 0;
  std::optional<double> inv_dt;
  double l2_error = 0;
  std::optional<double> eoc;
};

// Experimental orders of convergence between successive error values (under
// mesh halving): eoc_k = log2(e_{k-1}/e_k). Empty input or a single value
// yields an empty list.
std::vector<double> eoc(const std::vector<double>& errors);

// || u_h - u ||_{L2} over the regularized inside region:
// sqrt(∫ H_eps(phi(x,t)) (u_h - u)^2 dx), with phi analytic and eps fixed at
// the value of the finest mesh of the sweep so every level integrates over
// the same region.
double l2_error(const FEField& u_h,
                const std::function<double(const Vec2&, double)>& exact,
                double t,
                const std::function<double(const Vec2&, double)>& phi,
                double eps_finest, const QuadratureRule& quad);

struct RunOptions {
  GhostPenaltyConfig::Kind ghost = GhostPenaltyConfig::Kind::kDirichlet;
  bool damped = false;
  double eps_factor = 2.0;
  double m_damp = 2.0;
  SearchAlgo search = SearchAlgo::kTraversal;
  GradientMode grad_mode = GradientMode::kFluxConsistent;
  // Evaluate the level set through its nodal interpolant and the averaged
  // gradient (the fully discrete path) instead of analytic values.
  bool fe_level_set = false;
  // Evaluate the level set analytically even in root solves (default keeps
  // the interpolated hybrid: analytic weights, discrete searches).
  bool analytic_ls = false;
  std::string out_dir;  // empty: no files written
  bool write_vtk = false;
  SolverOptions lin;
  double steady_tol = 1e-9;
  int steady_max_steps = 100000;
};

struct LevelResult {
  int nx = 0;
  double l2 = 0;
  FEField u;  // final solution field
};

struct CaseResult {
  std::vector<ConvergenceRow> rows;
  std::vector<LevelResult> levels;
  // Advected-interface runs: area-derived interface radius sqrt(vol/pi) at
  // the final time, one entry per level. Empty otherwise.
  std::vector<double> final_radius;
};

// Runs one benchmark over the given mesh levels, computes the error history
// (eps of the finest level frozen in the error norm) and, when out_dir is
// set, writes one CSV per (case, penalty kind, band mode) plus optional
// field snapshots. Unknown case names throw std::invalid_argument.
CaseResult run_case(const std::string& name, const std::vector<int>& levels,
                    const RunOptions& opts);

struct ExtensionErrors {
  int nx = 0;
  double linf = 0;
  double l2 = 0;
};

// Constant extension of V(x,y) = y(1+y) off the unit circle on (-2,2)^2,
// evaluated at band nodes (|phi| <= 2 eps) through the discrete closest-point
// pipeline and compared with the exact constant extension. Reports band
// errors.
ExtensionErrors run_extension_circle(int nx, const RunOptions& opts);

// CSV with header inv_h,inv_dt,l2_error,eoc; optional fields stay empty.
// Fixed formatting keeps repeated runs byte-identical.
void write_csv(const std::string& path,
               const std::vector<ConvergenceRow>& rows);

std::string csv_name(const std::string& case_name, const RunOptions& opts);

}  // namespace lsfem
