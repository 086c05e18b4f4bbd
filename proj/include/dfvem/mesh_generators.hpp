#pragma once

#include "dfvem/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dfvem {

enum class MeshFamily { cvt, distorted_quads, disk_triangles, mapped_cvt };

/// Accepts the command-line names cvt, dquad, tri, mapped-cvt.
MeshFamily parse_mesh_family(const std::string& name);
std::string family_name(MeshFamily family);
bool family_on_disk(MeshFamily family);

/// Voronoi tessellation of the box [lo, hi] after `lloyd_iterations` Lloyd steps.
/// Edges shorter than collapse_fraction * h_E are collapsed afterwards (0 disables).
PolygonalMesh voronoi_mesh(std::vector<Vec2> seeds, const Vec2& lo, const Vec2& hi, int lloyd_iterations,
                           double collapse_fraction = 0.1);

/// CVT of the box with round(area / h^2) random seeds. A non-conforming or
/// degenerate result is regenerated with a perturbed seed (noted on std::clog).
PolygonalMesh generate_cvt(double target_h, std::uint64_t seed, int lloyd_iterations = 100,
                           const Vec2& lo = Vec2(0.0, 0.0), const Vec2& hi = Vec2(1.0, 1.0));

/// n x n grid of the unit square; interior vertices moved by at most amplitude / n.
PolygonalMesh generate_distorted_quads(int n_per_side, double amplitude, std::uint64_t seed);

/// Triangulation of the unit disk by round(1 / h) concentric rings.
PolygonalMesh generate_disk_triangles(double target_h);

/// Square-to-disk map (x sqrt(1 - y^2/2), y sqrt(1 - x^2/2)).
Vec2 square_to_disk(const Vec2& p);

/// CVT of [-1, 1]^2 pushed through square_to_disk. Throws MeshError naming the
/// first cell that stops being a simple counterclockwise polygon.
PolygonalMesh generate_mapped_cvt(double target_h, std::uint64_t seed, int lloyd_iterations = 100);

/// Family dispatch; distorted quads use n = round(1 / h) and amplitude 0.3.
PolygonalMesh generate_mesh(MeshFamily family, double target_h, std::uint64_t seed);

}  // namespace dfvem
