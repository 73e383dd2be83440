// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "lsfem/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lsfem {

void write_structured_points(
    const std::string& path, const UniformQuadMesh& mesh,
    const std::vector<std::pair<std::string, const VecX*>>& fields,
    const std::string& title) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_structured_points: cannot open " + path);

  os << "# vtk DataFile Version 3.0\n"
     << title << "\n"
     << "ASCII\n"
     << "DATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << mesh.nx() + 1 << " " << mesh.ny() + 1 << " 1\n"
     << "ORIGIN " << mesh.origin().x() << " " << mesh.origin().y() << " 0\n"
     << "SPACING " << mesh.h() << " " << mesh.h() << " 1\n"
     << "POINT_DATA " << mesh.num_nodes() << "\n";

  char buf[32];
  for (const auto& [name, data] : fields) {
    if (!data || data->size() != mesh.num_nodes())
      throw std::invalid_argument("write_structured_points: field '" + name +
                                  "' has wrong size");
    os << "SCALARS " << name << " double 1\n"
       << "LOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < data->size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g\n", (*data)[i]);
      os << buf;
    }
  }
}

}  // namespace lsfem
