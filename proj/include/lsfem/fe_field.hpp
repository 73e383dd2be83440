// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "lsfem/mesh.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

// Scalar Q1 (bilinear) finite element field on a UniformQuadMesh. The field
// keeps a pointer to the mesh; the mesh must outlive the field.
class FEField {
 public:
  explicit FEField(const UniformQuadMesh& mesh)
      : mesh_(&mesh), coeffs_(VecX::Zero(mesh.num_nodes())) {}

  FEField(const UniformQuadMesh& mesh, VecX coeffs)
      : mesh_(&mesh), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != mesh.num_nodes())
      throw std::invalid_argument("FEField: coefficient size mismatch");
  }

  // Nodal interpolant of a callable f(x).
  template <typename F>
  static FEField interpolate(const UniformQuadMesh& mesh, F&& f) {
    VecX c(mesh.num_nodes());
    for (int j = 0; j <= mesh.ny(); ++j)
      for (int i = 0; i <= mesh.nx(); ++i)
        c[mesh.node_id(i, j)] = f(mesh.node_pos(i, j));
    return FEField(mesh, std::move(c));
  }

  const UniformQuadMesh& mesh() const { return *mesh_; }
  VecX& coeffs() { return coeffs_; }
  const VecX& coeffs() const { return coeffs_; }

  // Point evaluation; throws std::domain_error outside the mesh. On shared
  // edges the value is continuous, the gradient takes the side selected by
  // the locate() tie-break.
  double eval(const Vec2& x) const;
  Vec2 eval_grad(const Vec2& x) const;

  // Fast paths for a pre-located point.
  double eval_at(const Located& loc) const;
  Vec2 eval_grad_at(const Located& loc) const;

 private:
  const UniformQuadMesh* mesh_;
  VecX coeffs_;
};

}  // namespace lsfem
