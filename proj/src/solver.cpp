// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/solver.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseLU>

namespace lsfem {

CgResult cg_solve(const SpMat& A, const VecX& b, double tol, int maxit,
                  const VecX* x0) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n)
    throw std::invalid_argument("cg_solve: dimension mismatch");
  if (maxit < 0) maxit = 10 * static_cast<int>(n);

  const double bnorm = b.norm();
  if (bnorm == 0.0) return {VecX::Zero(n), 0, 0.0};

  // Jacobi preconditioner; unit fallback guards structurally empty rows.
  VecX inv_diag(n);
  {
    VecX d = A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
      inv_diag[i] = (d[i] != 0.0) ? 1.0 / d[i] : 1.0;
  }

  VecX x = x0 ? *x0 : VecX::Zero(n);
  VecX r = b - A * x;
  double rel = r.norm() / bnorm;
  if (rel <= tol) return {std::move(x), 0, rel};

  VecX z = inv_diag.asDiagonal() * r;
  VecX p = z;
  double rz = r.dot(z);

  for (int it = 1; it <= maxit; ++it) {
    if (!(rz > 0))
      throw SolveError("cg_solve: breakdown (matrix not positive definite), "
                       "residual " + std::to_string(rel),
                       rel, it - 1);
    VecX Ap = A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0))
      throw SolveError("cg_solve: breakdown (matrix not positive definite), "
                       "residual " + std::to_string(rel),
                       rel, it - 1);
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    rel = r.norm() / bnorm;
    if (rel <= tol) return {std::move(x), it, rel};
    z = inv_diag.asDiagonal() * r;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolveError("cg_solve: no convergence in " + std::to_string(maxit) +
                       " iterations, residual " + std::to_string(rel),
                   rel, maxit);
}

VecX lumped_rows(const SpMat& A) {
  return A * VecX::Ones(A.cols());
}

struct SparseLuSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

SparseLuSolver::SparseLuSolver(const SpMat& A) : impl_(new Impl) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("SparseLuSolver: matrix must be square");
  // SparseLU wants a compressed column-major matrix.
  Eigen::SparseMatrix<double> Ac(A);
  Ac.makeCompressed();
  impl_->lu.compute(Ac);
  if (impl_->lu.info() != Eigen::Success)
    throw SolveError("SparseLuSolver: factorization failed (matrix singular "
                     "or structurally deficient)",
                     0.0, 0);
}

SparseLuSolver::~SparseLuSolver() = default;
SparseLuSolver::SparseLuSolver(SparseLuSolver&&) noexcept = default;
SparseLuSolver& SparseLuSolver::operator=(SparseLuSolver&&) noexcept = default;

VecX SparseLuSolver::solve(const VecX& b) const {
  VecX x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success)
    throw SolveError("SparseLuSolver: solve failed", 0.0, 0);
  return x;
}

VecX sparse_lu_solve(const SpMat& A, const VecX& b) {
  return SparseLuSolver(A).solve(b);
}

}  // namespace lsfem
