#include "dfvem/mesh_generators.hpp"

#include "dfvem/errors.hpp"
#include "dfvem/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

namespace dfvem {

MeshFamily parse_mesh_family(const std::string& name) {
  if (name == "cvt") return MeshFamily::cvt;
  if (name == "dquad") return MeshFamily::distorted_quads;
  if (name == "tri") return MeshFamily::disk_triangles;
  if (name == "mapped-cvt") return MeshFamily::mapped_cvt;
  throw ConfigError("unknown mesh family '" + name + "' (valid: cvt, dquad, tri, mapped-cvt)");
}

std::string family_name(MeshFamily family) {
  switch (family) {
    case MeshFamily::cvt: return "cvt";
    case MeshFamily::distorted_quads: return "dquad";
    case MeshFamily::disk_triangles: return "tri";
    case MeshFamily::mapped_cvt: return "mapped-cvt";
  }
  return "?";
}

bool family_on_disk(MeshFamily family) {
  return family == MeshFamily::disk_triangles || family == MeshFamily::mapped_cvt;
}

namespace {

using Polygon = std::vector<Vec2>;

// Keeps the part of `poly` with (x - m) . d <= 0.
Polygon clip(const Polygon& poly, const Vec2& m, const Vec2& d) {
  Polygon out;
  out.reserve(poly.size() + 1);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double fp = (p - m).dot(d);
    const double fq = (q - m).dot(d);
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) out.push_back(p + (q - p) * (fp / (fp - fq)));
  }
  return out;
}

class SeedGrid {
 public:
  SeedGrid(const std::vector<Vec2>& seeds, const Vec2& lo, const Vec2& hi) : seeds_(seeds), lo_(lo) {
    const Vec2 size = hi - lo;
    cell_ = std::sqrt(size.x() * size.y() / std::max<std::size_t>(1, seeds.size()));
    nx_ = std::max(1, static_cast<int>(std::ceil(size.x() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(size.y() / cell_)));
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto [ix, iy] = locate(seeds[i]);
      buckets_[iy * nx_ + ix].push_back(static_cast<int>(i));
    }
  }

  [[nodiscard]] std::pair<int, int> locate(const Vec2& p) const {
    const int ix = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int iy = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_), 0, ny_ - 1);
    return {ix, iy};
  }

  // Voronoi cell of seed s inside `box`, clipping ring by ring until the
  // remaining seeds are provably too far to cut it.
  [[nodiscard]] Polygon cell(int s, const Polygon& box) const {
    Polygon poly = box;
    const Vec2 x = seeds_[s];
    const auto [cx, cy] = locate(x);
    const int max_ring = std::max(nx_, ny_);
    for (int r = 0; r <= max_ring; ++r) {
      for (int iy = cy - r; iy <= cy + r; ++iy) {
        if (iy < 0 || iy >= ny_) continue;
        for (int ix = cx - r; ix <= cx + r; ++ix) {
          if (ix < 0 || ix >= nx_) continue;
          if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != r) continue;
          for (int q : buckets_[iy * nx_ + ix]) {
            if (q == s) continue;
            const Vec2 d = seeds_[q] - x;
            if (d.squaredNorm() == 0.0) continue;
            poly = clip(poly, 0.5 * (x + seeds_[q]), d);
          }
        }
      }
      double radius = 0.0;
      for (const auto& p : poly) radius = std::max(radius, (p - x).norm());
      if (r * cell_ >= 2.0 * radius) break;
    }
    return poly;
  }

 private:
  const std::vector<Vec2>& seeds_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

std::vector<Polygon> voronoi_cells(const std::vector<Vec2>& seeds, const Vec2& lo, const Vec2& hi) {
  const Polygon box{lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
  SeedGrid grid(seeds, lo, hi);
  std::vector<Polygon> cells(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) cells[s] = grid.cell(static_cast<int>(s), box);
  return cells;
}

// Merges points closer than tol (spatial hash with neighbour lookup).
class VertexWelder {
 public:
  explicit VertexWelder(double tol) : tol_(tol), bucket_(4.0 * tol) {}

  int add(const Vec2& p) {
    const long bx = static_cast<long>(std::floor(p.x() / bucket_));
    const long by = static_cast<long>(std::floor(p.y() / bucket_));
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = map_.find(key(bx + dx, by + dy));
        if (it == map_.end()) continue;
        for (int i : it->second)
          if ((points_[i] - p).norm() <= tol_) return i;
      }
    points_.push_back(p);
    map_[key(bx, by)].push_back(static_cast<int>(points_.size()) - 1);
    return static_cast<int>(points_.size()) - 1;
  }

  [[nodiscard]] std::vector<Vec2>& points() { return points_; }

 private:
  static std::uint64_t key(long x, long y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) | static_cast<std::uint32_t>(y);
  }
  double tol_;
  double bucket_;
  std::vector<Vec2> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> map_;
};

struct BoxSides {
  Vec2 lo, hi;
  double tol;
  // bit 0: x = lo, 1: x = hi, 2: y = lo, 3: y = hi
  [[nodiscard]] unsigned sides(const Vec2& p) const {
    unsigned s = 0;
    if (std::abs(p.x() - lo.x()) <= tol) s |= 1u;
    if (std::abs(p.x() - hi.x()) <= tol) s |= 2u;
    if (std::abs(p.y() - lo.y()) <= tol) s |= 4u;
    if (std::abs(p.y() - hi.y()) <= tol) s |= 8u;
    return s;
  }
};

bool is_corner(unsigned s) { return std::popcount(s) >= 2; }

void drop_repeats(std::vector<int>& cell) {
  std::vector<int> out;
  for (int v : cell)
    if (out.empty() || out.back() != v) out.push_back(v);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  cell = std::move(out);
}

bool valid_cell(const std::vector<Vec2>& verts, const std::vector<int>& cell) {
  if (cell.size() < 3) return false;
  std::set<int> unique(cell.begin(), cell.end());
  if (unique.size() != cell.size()) return false;
  Polygon poly;
  for (int v : cell) poly.push_back(verts[v]);
  if (!(shoelace_area(poly) > 0.0)) return false;
  try {
    PolygonalMesh::from_cells(poly, {[&] {
                                std::vector<int> idx(poly.size());
                                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
                                return idx;
                              }()});
  } catch (const MeshError&) {
    return false;
  }
  return true;
}

// Collapses edges shorter than fraction * (smaller adjacent h_E); vertices on
// the box boundary stay on it and corners never move.
void collapse_short_edges(std::vector<Vec2>& verts, std::vector<std::vector<int>>& cells, const BoxSides& box,
                          double fraction) {
  if (fraction <= 0.0) return;
  std::set<std::pair<int, int>> rejected;
  for (int pass = 0; pass < 50; ++pass) {
    const auto mesh = PolygonalMesh::from_cells(verts, cells);
    std::vector<std::pair<double, int>> candidates;
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const auto& ed = mesh.edge(e);
      double hloc = std::numeric_limits<double>::infinity();
      if (ed.left >= 0) hloc = std::min(hloc, mesh.diameter(ed.left));
      if (ed.right >= 0) hloc = std::min(hloc, mesh.diameter(ed.right));
      const double len = (verts[ed.a] - verts[ed.b]).norm();
      if (len < fraction * hloc && !rejected.count({ed.a, ed.b})) candidates.push_back({len / hloc, e});
    }
    if (candidates.empty()) return;
    std::sort(candidates.begin(), candidates.end());

    std::vector<std::vector<int>> vertex_cells(verts.size());
    for (int c = 0; c < static_cast<int>(cells.size()); ++c)
      for (int v : cells[c]) vertex_cells[v].push_back(c);

    std::vector<bool> touched(cells.size(), false);
    bool changed = false;
    for (const auto& [ratio, e] : candidates) {
      const int a = mesh.edge(e).a, b = mesh.edge(e).b;
      std::set<int> around(vertex_cells[a].begin(), vertex_cells[a].end());
      around.insert(vertex_cells[b].begin(), vertex_cells[b].end());
      if (std::any_of(around.begin(), around.end(), [&](int c) { return touched[c]; })) continue;

      const unsigned sa = box.sides(verts[a]), sb = box.sides(verts[b]);
      Vec2 target;
      if (sa == 0 && sb == 0) {
        target = 0.5 * (verts[a] + verts[b]);
      } else if (sb == 0) {
        target = verts[a];
      } else if (sa == 0) {
        target = verts[b];
      } else if (is_corner(sa) && is_corner(sb)) {
        rejected.insert({a, b});
        continue;
      } else if (is_corner(sa)) {
        target = verts[a];
      } else if (is_corner(sb)) {
        target = verts[b];
      } else if (sa == sb) {
        target = 0.5 * (verts[a] + verts[b]);
      } else {
        rejected.insert({a, b});
        continue;
      }

      const Vec2 old_a = verts[a];
      std::vector<std::pair<int, std::vector<int>>> backup;
      for (int c : around) backup.push_back({c, cells[c]});
      verts[a] = target;
      bool ok = true;
      for (int c : around) {
        for (int& v : cells[c])
          if (v == b) v = a;
        drop_repeats(cells[c]);
        ok = ok && valid_cell(verts, cells[c]);
      }
      if (!ok) {
        verts[a] = old_a;
        for (auto& [c, cell] : backup) cells[c] = cell;
        rejected.insert({a, b});
        continue;
      }
      for (int c : around) touched[c] = true;
      changed = true;
    }
    // drop unused vertices
    std::vector<int> remap(verts.size(), -1);
    std::vector<Vec2> kept;
    for (auto& cell : cells)
      for (int& v : cell) {
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(kept.size());
          kept.push_back(verts[v]);
        }
        v = remap[v];
      }
    verts = std::move(kept);
    rejected.clear();
    if (!changed) return;
  }
}

PolygonalMesh assemble_voronoi(const std::vector<Polygon>& polys, const Vec2& lo, const Vec2& hi,
                               double collapse_fraction) {
  const double scale = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const double tol = 1e-9 * scale;
  VertexWelder welder(tol);
  BoxSides box{lo, hi, tol};
  std::vector<std::vector<int>> cells;
  for (const auto& poly : polys) {
    std::vector<int> cell;
    for (Vec2 p : poly) {
      // snap to the box so boundary vertices are exactly on it
      const unsigned s = box.sides(p);
      if (s & 1u) p.x() = lo.x();
      if (s & 2u) p.x() = hi.x();
      if (s & 4u) p.y() = lo.y();
      if (s & 8u) p.y() = hi.y();
      cell.push_back(welder.add(p));
    }
    drop_repeats(cell);
    if (cell.size() < 3) throw MeshError("degenerate Voronoi cell");
    cells.push_back(std::move(cell));
  }
  std::vector<Vec2> verts = std::move(welder.points());
  auto mesh = PolygonalMesh::from_cells(verts, cells);
  // conformity: every boundary edge must lie on one side of the box
  for (const auto& e : mesh.edges()) {
    if (!e.boundary()) continue;
    if ((box.sides(verts[e.a]) & box.sides(verts[e.b])) == 0u) throw MeshError("non-conforming Voronoi tessellation");
  }
  collapse_short_edges(verts, cells, box, collapse_fraction);
  return PolygonalMesh::from_cells(std::move(verts), std::move(cells));
}

}  // namespace

PolygonalMesh voronoi_mesh(std::vector<Vec2> seeds, const Vec2& lo, const Vec2& hi, int lloyd_iterations,
                           double collapse_fraction) {
  if (seeds.empty()) throw MeshError("no Voronoi seeds");
  for (int it = 0; it < lloyd_iterations; ++it) {
    const auto polys = voronoi_cells(seeds, lo, hi);
    for (std::size_t s = 0; s < seeds.size(); ++s)
      if (polys[s].size() >= 3 && shoelace_area(polys[s]) > 0.0) seeds[s] = polygon_centroid(polys[s]);
  }
  const auto polys = voronoi_cells(seeds, lo, hi);
  const double box_area = (hi - lo).prod();
  for (const auto& p : polys)
    if (p.size() < 3 || shoelace_area(p) < 1e-12 * box_area) throw MeshError("degenerate Voronoi cell");
  return assemble_voronoi(polys, lo, hi, collapse_fraction);
}

PolygonalMesh generate_cvt(double target_h, std::uint64_t seed, int lloyd_iterations, const Vec2& lo, const Vec2& hi) {
  if (!(target_h > 0.0)) throw ConfigError("target h must be positive");
  const double area = (hi - lo).prod();
  const long n_seeds = std::max(1L, std::lround(area / (target_h * target_h)));
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ull);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
    std::vector<Vec2> seeds(n_seeds);
    for (auto& s : seeds) {
      const double x = ux(rng);
      s = Vec2(x, uy(rng));
    }
    try {
      return voronoi_mesh(std::move(seeds), lo, hi, lloyd_iterations);
    } catch (const MeshError& e) {
      std::clog << "cvt: attempt " << attempt << " with seed " << seed << " failed (" << e.what()
                << "); regenerating with a perturbed seed\n";
    }
  }
  throw MeshError("cvt generation failed after 10 attempts");
}

PolygonalMesh generate_distorted_quads(int n, double amplitude, std::uint64_t seed) {
  if (n < 2) throw ConfigError("distorted quads need at least 2 cells per side");
  if (amplitude < 0.0 || amplitude >= 0.5) throw ConfigError("distortion amplitude must lie in [0, 0.5)");
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Vec2> verts((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts[id(i, j)] = Vec2(double(i) / n, double(j) / n);
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = amplitude / n;
  const auto quad_ok = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= n || j >= n) return true;
    return valid_cell(verts, cells[j * n + i]);
  };
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) {
      const Vec2 base = verts[id(i, j)];
      for (int attempt = 0; attempt < 100; ++attempt) {
        const double r = radius * std::sqrt(unit(rng));
        const double t = 2.0 * std::numbers::pi * unit(rng);
        verts[id(i, j)] = base + r * Vec2(std::cos(t), std::sin(t));
        if (quad_ok(i - 1, j - 1) && quad_ok(i, j - 1) && quad_ok(i - 1, j) && quad_ok(i, j)) break;
        verts[id(i, j)] = base;
      }
    }
  return PolygonalMesh::from_cells(std::move(verts), std::move(cells));
}

PolygonalMesh generate_disk_triangles(double target_h) {
  const int n = std::max(1, static_cast<int>(std::lround(1.0 / target_h)));
  std::vector<Vec2> verts{Vec2::Zero()};
  std::vector<int> ring_start{0};
  for (int r = 1; r <= n; ++r) {
    ring_start.push_back(static_cast<int>(verts.size()));
    const double radius = double(r) / n;
    for (int j = 0; j < 6 * r; ++j) {
      const double t = 2.0 * std::numbers::pi * j / (6.0 * r);
      verts.push_back(radius * Vec2(std::cos(t), std::sin(t)));
    }
  }
  // point i of ring r, periodic; ring 0 is the centre
  const auto at = [&](int r, int i) { return r == 0 ? 0 : ring_start[r] + (i % (6 * r)); };
  std::vector<std::vector<int>> cells;
  for (int r = 1; r <= n; ++r)
    for (int s = 0; s < 6; ++s)
      for (int j = 0; j < r; ++j) {
        const int o0 = at(r, s * r + j), o1 = at(r, s * r + j + 1);
        const int i0 = at(r - 1, s * (r - 1) + j);
        cells.push_back({o0, o1, i0});
        if (j + 1 < r) cells.push_back({i0, o1, at(r - 1, s * (r - 1) + j + 1)});
      }
  return PolygonalMesh::from_cells(std::move(verts), std::move(cells));
}

Vec2 square_to_disk(const Vec2& p) {
  return {p.x() * std::sqrt(1.0 - 0.5 * p.y() * p.y()), p.y() * std::sqrt(1.0 - 0.5 * p.x() * p.x())};
}

PolygonalMesh generate_mapped_cvt(double target_h, std::uint64_t seed, int lloyd_iterations) {
  const auto square = generate_cvt(target_h, seed, lloyd_iterations, Vec2(-1.0, -1.0), Vec2(1.0, 1.0));
  std::vector<Vec2> verts;
  verts.reserve(square.n_vertices());
  for (const auto& v : square.vertices()) verts.push_back(square_to_disk(v));
  for (int c = 0; c < square.n_cells(); ++c) {
    Polygon poly;
    for (int v : square.cell(c)) poly.push_back(verts[v]);
    std::vector<int> idx(poly.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    if (!valid_cell(poly, idx)) throw MeshError("mapped cell " + std::to_string(c) + " is not a simple polygon");
  }
  return PolygonalMesh::from_cells(std::move(verts), square.cells());
}

PolygonalMesh generate_mesh(MeshFamily family, double target_h, std::uint64_t seed) {
  switch (family) {
    case MeshFamily::cvt: return generate_cvt(target_h, seed);
    case MeshFamily::distorted_quads:
      return generate_distorted_quads(std::max(2, static_cast<int>(std::lround(1.0 / target_h))), 0.3, seed);
    case MeshFamily::disk_triangles: return generate_disk_triangles(target_h);
    case MeshFamily::mapped_cvt: return generate_mapped_cvt(target_h, seed);
  }
  throw ConfigError("unknown mesh family");
}

}  // namespace dfvem
