#include "dfvem/discretization.hpp"

#include "dfvem/errors.hpp"
#include "dfvem/parallel.hpp"

#include <algorithm>

namespace dfvem {

Formulation parse_formulation(const std::string& name) {
  if (name == "velocity-pressure" || name == "vp") return Formulation::velocity_pressure;
  if (name == "reduced") return Formulation::reduced;
  if (name == "curl") return Formulation::curl;
  if (name == "stream" || name == "stream-c1") return Formulation::stream;
  throw ConfigError("unknown formulation '" + name + "' (valid: velocity-pressure, reduced, curl, stream)");
}

std::string formulation_name(Formulation f) {
  switch (f) {
    case Formulation::velocity_pressure: return "velocity-pressure";
    case Formulation::reduced: return "reduced";
    case Formulation::curl: return "curl";
    case Formulation::stream: return "stream";
  }
  return "?";
}

Discretization::Discretization(std::shared_ptr<const PolygonalMesh> mesh, int k, Formulation formulation, int threads)
    : mesh_(std::move(mesh)), k_(k), formulation_(formulation), threads_(std::max(1, threads)) {
  if (k < 2) throw ConfigError("k must be at least 2");
  const PolygonalMesh& m = *mesh_;
  const int nc = m.n_cells(), nv = m.n_vertices(), ne = m.n_edges();
  frames_.resize(nc);
  velocity_.resize(nc);
  stream_.resize(nc);
  c1_.resize(nc);
  parallel_for(nc, threads_, [&](int c) {
    frames_[c] = std::make_shared<CellFrame>(CellFrame::from_mesh(m, c, table_degree_for(k)));
    try {
      if (has_velocity()) velocity_[c] = build_velocity_element(frames_[c], k);
      if (formulation_ == Formulation::curl) stream_[c] = build_stream_element(*velocity_[c]);
      if (formulation_ == Formulation::stream) c1_[c] = build_c1_element(frames_[c], k);
    } catch (const NumericalError& e) {
      throw NumericalError("cell " + std::to_string(c) + ": " + e.what());
    }
  });

  // velocity
  const int n3 = poly_dim(k - 3), n4 = poly_dim(k - 1) - 1;
  const int per_cell = reduced() ? n3 : n3 + n4;
  const int edge_offset = 2 * nv, cell_offset = edge_offset + 2 * (k - 1) * ne;
  if (has_velocity()) {
    n_velocity_ = cell_offset + per_cell * nc;
    velocity_boundary_.assign(n_velocity_, false);
    for (int v = 0; v < nv; ++v)
      if (m.boundary_vertex(v)) velocity_boundary_[2 * v] = velocity_boundary_[2 * v + 1] = true;
    for (int e = 0; e < ne; ++e)
      if (m.boundary_edge(e))
        for (int j = 0; j < 2 * (k - 1); ++j) velocity_boundary_[edge_offset + 2 * (k - 1) * e + j] = true;
    velocity_map_.resize(nc);
    pressure_map_.resize(nc);
    n_pressure_ = pressure_per_cell() * nc;
    for (int c = 0; c < nc; ++c) {
      const auto& cell = m.cell(c);
      const auto& edges = m.cell_edges(c);
      const int n = static_cast<int>(cell.size());
      auto& map = velocity_map_[c];
      map.assign(2 * n * k + n3 + n4, -1);
      for (int i = 0; i < n; ++i)
        for (int comp = 0; comp < 2; ++comp) map[2 * i + comp] = 2 * cell[i] + comp;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * (k - 1); ++j) map[2 * n + 2 * (k - 1) * i + j] = edge_offset + 2 * (k - 1) * edges[i] + j;
      for (int g = 0; g < n3; ++g) map[2 * n * k + g] = cell_offset + per_cell * c + g;
      if (!reduced())
        for (int a = 0; a < n4; ++a) map[2 * n * k + n3 + a] = cell_offset + per_cell * c + n3 + a;
      for (int a = 0; a < pressure_per_cell(); ++a) pressure_map_[c].push_back(pressure_per_cell() * c + a);
    }
  }

  // stream
  if (has_stream()) {
    const int sedge = 3 * nv, scell = sedge + (2 * k - 3) * ne;
    n_stream_ = scell + n3 * nc;
    stream_boundary_.assign(n_stream_, false);
    for (int v = 0; v < nv; ++v)
      if (m.boundary_vertex(v)) std::fill_n(stream_boundary_.begin() + 3 * v, 3, true);
    for (int e = 0; e < ne; ++e)
      if (m.boundary_edge(e)) std::fill_n(stream_boundary_.begin() + sedge + (2 * k - 3) * e, 2 * k - 3, true);
    stream_map_.resize(nc);
    for (int c = 0; c < nc; ++c) {
      const auto& cell = m.cell(c);
      const auto& edges = m.cell_edges(c);
      const int n = static_cast<int>(cell.size());
      auto& map = stream_map_[c];
      for (int i = 0; i < n; ++i)
        for (int comp = 0; comp < 3; ++comp) map.push_back(3 * cell[i] + comp);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * k - 3; ++j) map.push_back(sedge + (2 * k - 3) * edges[i] + j);
      for (int g = 0; g < n3; ++g) map.push_back(scell + n3 * c + g);
    }
  }
}

const StreamSpace& Discretization::stream_space(int c) const {
  if (formulation_ == Formulation::curl) return stream_[c]->space;
  if (formulation_ == Formulation::stream) return c1_[c]->space;
  throw std::logic_error("stream space requested for a velocity formulation");
}

int Discretization::free_velocity_count() const {
  return static_cast<int>(std::count(velocity_boundary_.begin(), velocity_boundary_.end(), false));
}

int Discretization::free_stream_count() const {
  return static_cast<int>(std::count(stream_boundary_.begin(), stream_boundary_.end(), false));
}

int Discretization::n_unknowns() const {
  if (has_stream()) return free_stream_count();
  return free_velocity_count() + n_pressure_ - 1;
}

}  // namespace dfvem
