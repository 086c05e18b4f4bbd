#include "dfvem/mesh.hpp"

#include "dfvem/errors.hpp"
#include "dfvem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace dfvem {

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

bool is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  return true;
}

}  // namespace

PolygonalMesh PolygonalMesh::from_cells(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells) {
  PolygonalMesh m;
  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);
  const int nv = m.n_vertices();
  const int nc = m.n_cells();
  if (nc == 0) throw MeshError("mesh has no cells");

  std::map<std::pair<int, int>, int> edge_id;
  m.cell_edges_.resize(nc);
  m.centroid_.resize(nc);
  m.diameter_.resize(nc);
  m.area_.resize(nc);
  std::vector<int> use_count(nv, 0);
  for (int c = 0; c < nc; ++c) {
    const auto& cell = m.cells_[c];
    const int n = static_cast<int>(cell.size());
    if (n < 3) throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    for (int v : cell) {
      if (v < 0 || v >= nv) throw MeshError("cell " + std::to_string(c) + " references vertex " + std::to_string(v));
      ++use_count[v];
    }
    const auto poly = m.polygon(c);
    m.area_[c] = shoelace_area(poly);
    if (!(m.area_[c] > 0.0)) throw MeshError("cell " + std::to_string(c) + " is not counterclockwise or has zero area");
    if (!is_simple(poly)) throw MeshError("cell " + std::to_string(c) + " is not a simple polygon");
    m.centroid_[c] = polygon_centroid(poly);
    double diam = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) diam = std::max(diam, (poly[i] - poly[j]).norm());
    m.diameter_[c] = diam;
    m.h_ = std::max(m.h_, diam);

    for (int i = 0; i < n; ++i) {
      const int a = cell[i], b = cell[(i + 1) % n];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_id.try_emplace({key.first, key.second}, m.n_edges());
      if (inserted) m.edges_.push_back({key.first, key.second, -1, -1});
      MeshEdge& e = m.edges_[it->second];
      int& slot = (a < b) ? e.left : e.right;
      if (slot >= 0)
        throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") traversed twice in the same direction");
      slot = c;
      m.cell_edges_[c].push_back(it->second);
    }
  }
  for (int v = 0; v < nv; ++v)
    if (use_count[v] == 0) throw MeshError("vertex " + std::to_string(v) + " is not used by any cell");

  m.boundary_vertex_.assign(nv, false);
  for (const auto& e : m.edges_)
    if (e.boundary()) m.boundary_vertex_[e.a] = m.boundary_vertex_[e.b] = true;
  return m;
}

double PolygonalMesh::total_area() const {
  double s = 0.0;
  for (double a : area_) s += a;
  return s;
}

std::vector<Vec2> PolygonalMesh::polygon(int c) const {
  std::vector<Vec2> poly;
  poly.reserve(cells_[c].size());
  for (int v : cells_[c]) poly.push_back(vertices_[v]);
  return poly;
}

std::vector<std::vector<int>> PolygonalMesh::cells_from_edges() const {
  // collect each cell's directed edges, then chain them starting at the first listed vertex
  std::vector<std::map<int, int>> next(n_cells());
  for (const auto& e : edges_) {
    if (e.left >= 0) next[e.left][e.a] = e.b;
    if (e.right >= 0) next[e.right][e.b] = e.a;
  }
  std::vector<std::vector<int>> out(n_cells());
  for (int c = 0; c < n_cells(); ++c) {
    int v = cells_[c].front();
    do {
      out[c].push_back(v);
      v = next[c].at(v);
    } while (v != cells_[c].front() && out[c].size() <= next[c].size());
  }
  return out;
}

CellShape cell_shape(const std::vector<Vec2>& polygon) {
  const std::size_t n = polygon.size();
  double diam = 0.0, min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (polygon[i] - polygon[j]).norm();
      diam = std::max(diam, d);
      min_dist = std::min(min_dist, d);
    }
  const Vec2 c = polygon_centroid(polygon);
  double radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    radius = std::min(radius, orient(a, b, c) / (b - a).norm());
  }
  CellShape s;
  s.star_ratio = std::clamp(radius / diam, 0.0, 1.0);
  s.vertex_ratio = std::clamp(min_dist / diam, 0.0, 1.0);
  return s;
}

ShapeReport check_mesh(const PolygonalMesh& mesh, double rho_min) {
  ShapeReport r;
  r.rho_min = rho_min;
  r.rho = 1.0;
  r.cells.reserve(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellShape s = cell_shape(mesh.polygon(c));
    r.cells.push_back(s);
    const double worst = std::min(s.star_ratio, s.vertex_ratio);
    r.rho = std::min(r.rho, worst);
    if (worst < rho_min) r.failing.push_back(c);
  }
  return r;
}

}  // namespace dfvem
