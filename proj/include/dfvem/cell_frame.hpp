#pragma once

#include "dfvem/mesh.hpp"
#include "dfvem/polybasis.hpp"
#include "dfvem/quadrature.hpp"

#include <vector>

namespace dfvem {

/// Edge i of a cell, from local vertex i to i + 1.
struct FrameEdge {
  Vec2 a, b;
  double length = 0.0;
  Vec2 tangent;  // unit, a -> b
  Vec2 normal;   // unit, outward
  int global = -1;
  /// True when the cell runs against the global orientation (larger vertex id first).
  bool reversed = false;
  /// Gauss rule: local parameters t in [0, 1] from a, weights scaled by the length.
  std::vector<double> t;
  std::vector<double> w;
  std::vector<Vec2> x;

  [[nodiscard]] Vec2 point(double s) const { return a + s * (b - a); }
  /// Tangent and normal of the global orientation.
  [[nodiscard]] Vec2 global_tangent() const { return reversed ? Vec2(-tangent) : tangent; }
  [[nodiscard]] Vec2 global_normal() const { return reversed ? Vec2(-normal) : normal; }
  /// Local parameter of a point given by its parameter along the global orientation.
  [[nodiscard]] double local_param(double s_global) const { return reversed ? 1.0 - s_global : s_global; }
};

/// Geometry of one cell: scaled monomial frame, monomial integral table, edges.
class CellFrame {
 public:
  /// table_degree bounds the monomial degree integrated exactly; edge rules are
  /// exact to the same degree.
  CellFrame(std::vector<Vec2> polygon, int table_degree, std::vector<int> edge_ids = {},
            std::vector<bool> reversed = {});
  static CellFrame from_mesh(const PolygonalMesh& mesh, int cell, int table_degree);

  [[nodiscard]] const ScaledFrame& frame() const { return frame_; }
  [[nodiscard]] double h() const { return frame_.scale; }
  [[nodiscard]] const Vec2& center() const { return frame_.center; }
  [[nodiscard]] double area() const { return area_; }
  [[nodiscard]] int n_vertices() const { return static_cast<int>(polygon_.size()); }
  [[nodiscard]] const std::vector<Vec2>& polygon() const { return polygon_; }
  [[nodiscard]] const std::vector<FrameEdge>& edges() const { return edges_; }
  [[nodiscard]] int table_degree() const { return table_degree_; }

  [[nodiscard]] Vec2 to_local(const Vec2& x) const { return frame_.to_local(x); }

  /// Integral over the cell of m_(a,b).
  [[nodiscard]] double integral(int a, int b) const { return table_[mono_index(a, b)]; }
  /// Cell means of the monomials of degree <= n.
  [[nodiscard]] VectorXd means(int n) const;
  /// (i, j) -> int m_i m_j for |i| <= n_row, |j| <= n_col.
  [[nodiscard]] MatrixXd gram(int n_row, int n_col) const;
  /// (i, j) -> int q m_i m_j, q given in the frame's monomials.
  [[nodiscard]] MatrixXd weighted_gram(int n_row, int n_col, const VectorXd& q) const;
  /// (i, j) -> int grad m_i . grad m_j (physical gradients).
  [[nodiscard]] MatrixXd stiffness(int n) const;
  /// Integral of q against every monomial of degree <= n.
  [[nodiscard]] VectorXd moments_of(int n, const VectorXd& q) const;

  /// Fresh polygon rule of the given degree in physical coordinates.
  [[nodiscard]] QuadratureRule quadrature(int degree) const;

 private:
  std::vector<Vec2> polygon_;
  ScaledFrame frame_;
  double area_ = 0.0;
  int table_degree_ = 0;
  VectorXd table_;
  std::vector<FrameEdge> edges_;
};

/// Lagrange basis values at t for the given nodes.
RowVectorXd lagrange_values(const std::vector<double>& nodes, double t);
RowVectorXd lagrange_derivatives(const std::vector<double>& nodes, double t);

}  // namespace dfvem
