#pragma once

#include "dfvem/mesh.hpp"
#include "dfvem/stream_element.hpp"

#include <optional>
#include <string>

namespace dfvem {

enum class Formulation { velocity_pressure, reduced, curl, stream };
Formulation parse_formulation(const std::string& name);
std::string formulation_name(Formulation f);

/// Global spaces and per-cell elements of one formulation on one mesh.
///
/// Velocity numbering: (vx, vy) per vertex, 2 (k - 1) per edge, then per cell the
/// x_perp moments and (except for the reduced formulation) the divergence moments.
/// Pressure: per cell the coefficients on the local basis {1, m_a - mean m_a}
/// (only the constant for the reduced formulation). Stream numbering: 3 per
/// vertex, 2k - 3 per edge, the cell moments last.
/// The curl formulation carries the full velocity and pressure spaces as well,
/// for the curl transfer and pressure recovery.
class Discretization {
 public:
  Discretization(std::shared_ptr<const PolygonalMesh> mesh, int k, Formulation formulation, int threads = 1);

  [[nodiscard]] const PolygonalMesh& mesh() const { return *mesh_; }
  [[nodiscard]] std::shared_ptr<const PolygonalMesh> mesh_ptr() const { return mesh_; }
  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] Formulation formulation() const { return formulation_; }
  [[nodiscard]] int n_cells() const { return mesh_->n_cells(); }
  [[nodiscard]] int threads() const { return threads_; }

  [[nodiscard]] bool has_velocity() const { return formulation_ != Formulation::stream; }
  [[nodiscard]] bool has_stream() const { return formulation_ == Formulation::curl || formulation_ == Formulation::stream; }
  [[nodiscard]] bool reduced() const { return formulation_ == Formulation::reduced; }

  [[nodiscard]] const CellFrame& frame(int c) const { return *frames_[c]; }
  [[nodiscard]] const VelocityElement& velocity(int c) const { return *velocity_[c]; }
  [[nodiscard]] const StreamElement& stream(int c) const { return *stream_[c]; }
  [[nodiscard]] const C1Element& c1(int c) const { return *c1_[c]; }
  /// Stream space of either stream formulation.
  [[nodiscard]] const StreamSpace& stream_space(int c) const;

  [[nodiscard]] int n_velocity() const { return n_velocity_; }
  [[nodiscard]] int n_pressure() const { return n_pressure_; }
  [[nodiscard]] int n_stream() const { return n_stream_; }
  /// Global index of every local DoF; -1 marks dropped divergence moments.
  [[nodiscard]] const std::vector<int>& velocity_map(int c) const { return velocity_map_[c]; }
  [[nodiscard]] const std::vector<int>& pressure_map(int c) const { return pressure_map_[c]; }
  [[nodiscard]] const std::vector<int>& stream_map(int c) const { return stream_map_[c]; }
  [[nodiscard]] const std::vector<bool>& velocity_on_boundary() const { return velocity_boundary_; }
  [[nodiscard]] const std::vector<bool>& stream_on_boundary() const { return stream_boundary_; }
  /// Local pressure basis size (dim P_{k-1}, or 1 when reduced).
  [[nodiscard]] int pressure_per_cell() const { return reduced() ? 1 : poly_dim(k_ - 1); }

  /// Unknown count after boundary elimination: free velocities plus pressures
  /// modulo constants, or free stream DoFs.
  [[nodiscard]] int n_unknowns() const;
  [[nodiscard]] int free_velocity_count() const;
  [[nodiscard]] int free_stream_count() const;

 private:
  std::shared_ptr<const PolygonalMesh> mesh_;
  int k_;
  Formulation formulation_;
  int threads_;
  std::vector<std::shared_ptr<CellFrame>> frames_;
  std::vector<std::optional<VelocityElement>> velocity_;
  std::vector<std::optional<StreamElement>> stream_;
  std::vector<std::optional<C1Element>> c1_;
  int n_velocity_ = 0, n_pressure_ = 0, n_stream_ = 0;
  std::vector<std::vector<int>> velocity_map_, pressure_map_, stream_map_;
  std::vector<bool> velocity_boundary_, stream_boundary_;
};

}  // namespace dfvem
