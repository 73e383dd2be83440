// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace lsfem {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// Thrown when a linear solve does not reach its tolerance (or breaks down,
// e.g. on an indefinite matrix). Carries the last residual for diagnostics.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Thrown when a closest-point search fails at a location where the caller
// required a valid result (e.g. inside an assembly loop).
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lsfem
