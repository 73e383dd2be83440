// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "lsfem/types.hpp"

namespace lsfem {

struct CgResult {
  VecX x;
  int iterations = 0;
  double relative_residual = 0;
};

// Linear solver knobs shared by the implicit steppers.
struct SolverOptions {
  double cg_tol = 1e-10;
  int cg_maxit = -1;
};

// Jacobi-preconditioned conjugate gradients for symmetric positive definite
// systems. Converges when ||b - A x|| <= tol * ||b||. maxit < 0 selects the
// default of 10 * n. Throws SolveError on breakdown (indefinite matrix) or
// when maxit is exhausted.
CgResult cg_solve(const SpMat& A, const VecX& b, double tol = 1e-10,
                  int maxit = -1, const VecX* x0 = nullptr);

// Row sums (mass lumping).
VecX lumped_rows(const SpMat& A);

// Sparse LU factorization for general (nonsymmetric) systems; the implicit
// steppers use it once the extrapolation coupling is folded into the matrix,
// which breaks symmetry. Factors on construction, solves repeatedly. Throws
// SolveError when the factorization fails or a solve does not succeed.
class SparseLuSolver {
 public:
  explicit SparseLuSolver(const SpMat& A);
  ~SparseLuSolver();
  SparseLuSolver(SparseLuSolver&&) noexcept;
  SparseLuSolver& operator=(SparseLuSolver&&) noexcept;

  VecX solve(const VecX& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around SparseLuSolver.
VecX sparse_lu_solve(const SpMat& A, const VecX& b);

}  // namespace lsfem
