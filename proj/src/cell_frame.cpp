#include "dfvem/cell_frame.hpp"

#include "dfvem/errors.hpp"

#include <cmath>

namespace dfvem {

CellFrame::CellFrame(std::vector<Vec2> polygon, int table_degree, std::vector<int> edge_ids, std::vector<bool> reversed)
    : polygon_(std::move(polygon)), table_degree_(table_degree) {
  const int n = n_vertices();
  if (n < 3) throw MeshError("cell needs at least 3 vertices");
  area_ = shoelace_area(polygon_);
  if (!(area_ > 0.0)) throw MeshError("cell has non-positive area");
  frame_.center = polygon_centroid(polygon_);
  double diam = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) diam = std::max(diam, (polygon_[i] - polygon_[j]).norm());
  frame_.scale = diam;

  const QuadratureRule rule = quadrature(table_degree);
  table_ = VectorXd::Zero(poly_dim(table_degree));
  for (std::size_t q = 0; q < rule.size(); ++q)
    table_ += rule.weights[q] * monomial_values(table_degree, to_local(rule.points[q])).transpose();

  const LineRule line = gauss_legendre(std::max(1, (table_degree + 2) / 2));
  edges_.resize(n);
  for (int i = 0; i < n; ++i) {
    FrameEdge& e = edges_[i];
    e.a = polygon_[i];
    e.b = polygon_[(i + 1) % n];
    e.length = (e.b - e.a).norm();
    e.tangent = (e.b - e.a) / e.length;
    e.normal = Vec2(e.tangent.y(), -e.tangent.x());
    e.global = edge_ids.empty() ? i : edge_ids[i];
    e.reversed = reversed.empty() ? false : static_cast<bool>(reversed[i]);
    for (std::size_t q = 0; q < line.points.size(); ++q) {
      e.t.push_back(line.points[q]);
      e.w.push_back(line.weights[q] * e.length);
      e.x.push_back(e.point(line.points[q]));
    }
  }
}

CellFrame CellFrame::from_mesh(const PolygonalMesh& mesh, int cell, int table_degree) {
  const auto& verts = mesh.cell(cell);
  const auto& edge_ids = mesh.cell_edges(cell);
  std::vector<bool> reversed(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) reversed[i] = mesh.edge(edge_ids[i]).a != verts[i];
  return CellFrame(mesh.polygon(cell), table_degree, edge_ids, reversed);
}

VectorXd CellFrame::means(int n) const { return table_.head(poly_dim(n)) / area_; }

MatrixXd CellFrame::gram(int n_row, int n_col) const {
  if (n_row + n_col > table_degree_) throw std::logic_error("CellFrame::gram: degree exceeds integral table");
  const auto& ir = multi_indices(n_row);
  const auto& ic = multi_indices(n_col);
  MatrixXd g(poly_dim(n_row), poly_dim(n_col));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) g(i, j) = table_[mono_index(ir[i].a + ic[j].a, ir[i].b + ic[j].b)];
  return g;
}

MatrixXd CellFrame::weighted_gram(int n_row, int n_col, const VectorXd& q) const {
  const int nq = degree_from_size(q.size());
  MatrixXd g = MatrixXd::Zero(poly_dim(n_row), poly_dim(n_col));
  if (nq < 0) return g;
  if (n_row + n_col + nq > table_degree_) throw std::logic_error("CellFrame::weighted_gram: degree exceeds integral table");
  const auto& ir = multi_indices(n_row);
  const auto& ic = multi_indices(n_col);
  const auto& iq = multi_indices(nq);
  for (int l = 0; l < q.size(); ++l) {
    const double c = q[l];
    if (c == 0.0) continue;
    for (int i = 0; i < g.rows(); ++i) {
      const int a = ir[i].a + iq[l].a, b = ir[i].b + iq[l].b;
      for (int j = 0; j < g.cols(); ++j) g(i, j) += c * table_[mono_index(a + ic[j].a, b + ic[j].b)];
    }
  }
  return g;
}

MatrixXd CellFrame::stiffness(int n) const {
  if (n < 1) return MatrixXd::Zero(poly_dim(n), poly_dim(n));
  const MatrixXd dx = derivative_matrix(n, 0);
  const MatrixXd dy = derivative_matrix(n, 1);
  const MatrixXd g = gram(n - 1, n - 1);
  return (dx.transpose() * g * dx + dy.transpose() * g * dy) / (h() * h());
}

VectorXd CellFrame::moments_of(int n, const VectorXd& q) const {
  const int nq = degree_from_size(q.size());
  if (nq < 0) return VectorXd::Zero(poly_dim(n));
  return gram(n, nq) * q;
}

QuadratureRule CellFrame::quadrature(int degree) const { return polygon_quadrature(polygon_, degree); }

RowVectorXd lagrange_values(const std::vector<double>& nodes, double t) {
  const std::size_t n = nodes.size();
  RowVectorXd v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) p *= (t - nodes[j]) / (nodes[i] - nodes[j]);
    v[i] = p;
  }
  return v;
}

RowVectorXd lagrange_derivatives(const std::vector<double>& nodes, double t) {
  const std::size_t n = nodes.size();
  RowVectorXd d = RowVectorXd::Zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    double denom = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) denom *= nodes[i] - nodes[j];
    for (std::size_t l = 0; l < n; ++l) {
      if (l == i) continue;
      double p = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && j != l) p *= t - nodes[j];
      d[i] += p;
    }
    d[i] /= denom;
  }
  return d;
}

}  // namespace dfvem
