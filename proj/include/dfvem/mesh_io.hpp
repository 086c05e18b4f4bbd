#pragma once

#include "dfvem/mesh.hpp"

#include <iosfwd>
#include <string>

namespace dfvem {

// Text format:
//   vem-mesh 1
//   <n_vertices> <n_cells>
//   x y                  (n_vertices lines)
//   m i_1 ... i_m        (n_cells lines, 0-based, counterclockwise)

void write_mesh(const PolygonalMesh& mesh, std::ostream& out);
void write_mesh(const PolygonalMesh& mesh, const std::string& path);

/// Throws ParseError carrying the 1-based line number.
PolygonalMesh read_mesh(std::istream& in);
PolygonalMesh read_mesh(const std::string& path);

}  // namespace dfvem
