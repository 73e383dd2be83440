// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lsfem/mesh.hpp"
#include "lsfem/types.hpp"

namespace lsfem {

// Writes nodal fields as a legacy ASCII VTK structured-points dataset
// (dimensions (nx+1) x (ny+1) x 1, spacing h). Node ordering matches the
// mesh numbering (x fastest), so coefficient vectors map directly.
void write_structured_points(
    const std::string& path, const UniformQuadMesh& mesh,
    const std::vector<std::pair<std::string, const VecX*>>& fields,
    const std::string& title = "lsfem field output");

}  // namespace lsfem
