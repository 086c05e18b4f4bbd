#pragma once

#include "dfvem/polybasis.hpp"

#include <vector>

namespace dfvem {

/// Unique edge a -> b with a < b. `left` is the cell traversing it a -> b
/// (counterclockwise), `right` the one traversing b -> a, -1 on the boundary.
struct MeshEdge {
  int a = -1;
  int b = -1;
  int left = -1;
  int right = -1;
  [[nodiscard]] bool boundary() const { return left < 0 || right < 0; }
};

/// Immutable polygonal mesh. Build through from_cells, which validates.
class PolygonalMesh {
 public:
  PolygonalMesh() = default;
  static PolygonalMesh from_cells(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells);

  [[nodiscard]] int n_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int n_cells() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int n_edges() const { return static_cast<int>(edges_.size()); }

  [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
  [[nodiscard]] const Vec2& vertex(int i) const { return vertices_[i]; }
  [[nodiscard]] const std::vector<std::vector<int>>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<int>& cell(int c) const { return cells_[c]; }
  [[nodiscard]] const std::vector<MeshEdge>& edges() const { return edges_; }
  [[nodiscard]] const MeshEdge& edge(int e) const { return edges_[e]; }
  /// Edge ids of cell c; entry i joins local vertices i and i + 1.
  [[nodiscard]] const std::vector<int>& cell_edges(int c) const { return cell_edges_[c]; }

  [[nodiscard]] bool boundary_vertex(int v) const { return boundary_vertex_[v]; }
  [[nodiscard]] bool boundary_edge(int e) const { return edges_[e].boundary(); }

  [[nodiscard]] const Vec2& centroid(int c) const { return centroid_[c]; }
  [[nodiscard]] double diameter(int c) const { return diameter_[c]; }
  [[nodiscard]] double area(int c) const { return area_[c]; }
  /// max over cells of the diameter
  [[nodiscard]] double h() const { return h_; }
  [[nodiscard]] double total_area() const;

  [[nodiscard]] std::vector<Vec2> polygon(int c) const;

  /// Cells rebuilt from the edge table (walking left/right incidences).
  [[nodiscard]] std::vector<std::vector<int>> cells_from_edges() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<MeshEdge> edges_;
  std::vector<std::vector<int>> cell_edges_;
  std::vector<bool> boundary_vertex_;
  std::vector<Vec2> centroid_;
  std::vector<double> diameter_;
  std::vector<double> area_;
  double h_ = 0.0;
};

struct CellShape {
  double star_ratio = 0.0;    // radius of the centroid-centred inscribed disk / h_E
  double vertex_ratio = 0.0;  // shortest vertex-vertex distance / h_E
};

struct ShapeReport {
  std::vector<CellShape> cells;
  double rho = 0.0;  // min over all cells and both ratios
  double rho_min = 0.0;
  std::vector<int> failing;
  [[nodiscard]] bool passed() const { return failing.empty(); }
};

CellShape cell_shape(const std::vector<Vec2>& polygon);
ShapeReport check_mesh(const PolygonalMesh& mesh, double rho_min);

}  // namespace dfvem
