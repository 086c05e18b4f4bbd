#pragma once

#include "dfvem/velocity_element.hpp"

#include <Eigen/Core>

namespace dfvem {

/// Value and gradient (phi, phi_x, phi_y) of a scalar field.
using StreamFunction = std::function<Eigen::Vector3d(const Vec2&)>;

/// Boundary DoFs shared by the two stream spaces and their edge traces.
///
/// Local DoF order: (phi, phi_x, phi_y) per vertex; per edge, k - 2 values at
/// the interior Gauss-Lobatto points of degree k - 1, then k - 1 derivatives
/// along the global edge normal at the interior points of degree k, both
/// listed along the global edge orientation; then the cell moments.
/// The global normal of an edge is its global tangent turned clockwise.
struct StreamSpace {
  std::shared_ptr<const CellFrame> cell;
  int k = 2;
  int n_vertices = 0;
  int n_dofs = 0;
  int n5 = 0;  // cell moments, dim P_{k-3}
  int off5 = 0;

  /// Per edge, monomial coefficients in the local parameter t in [0, 1]:
  /// value trace in P_{k+1} and global-normal derivative trace in P_k.
  std::vector<MatrixXd> value_trace;
  std::vector<MatrixXd> normal_trace;

  [[nodiscard]] int vertex_dof(int i, int c) const { return 3 * i + c; }
  [[nodiscard]] int edge_value_dof(int e, int j) const { return 3 * n_vertices + (2 * k - 3) * e + j; }
  [[nodiscard]] int edge_normal_dof(int e, int j) const { return edge_value_dof(e, k - 2 + j); }

  /// Rows mapping DoFs to phi and to grad phi at local parameter t of edge e.
  [[nodiscard]] RowVectorXd trace_value(int e, double t) const;
  [[nodiscard]] MatrixXd trace_gradient(int e, double t) const;
};

/// Builds the DoF layout and edge traces; throws NumericalError if a trace
/// interpolation system is ill-conditioned.
StreamSpace build_stream_space(std::shared_ptr<const CellFrame> cell, int k);

enum class StreamMoments { curl_perp, value };

/// DoFs of a smooth field. curl_perp moments are (1/|E|) int curl phi . xi_perp m,
/// value moments are (1/|E|) int phi m, both for |m| <= k - 3.
VectorXd interpolate_stream(const StreamSpace& s, StreamMoments moments, const StreamFunction& phi);

/// Complex-compatible stream element, paired with the velocity element of the same order.
struct StreamElement {
  StreamSpace space;
  /// Velocity DoFs of curl phi.
  MatrixXd transfer;
  /// int phi m_a for |a| <= k - 1.
  MatrixXd phi_moments;
  /// L2 projection onto P_{k-1}.
  MatrixXd pi0;
};

StreamElement build_stream_element(const VelocityElement& velocity);

/// int g Pi0_{k-1} phi_j, g the curl of the load.
VectorXd stream_load(const StreamSpace& s, const MatrixXd& pi0, const ScalarFunction& g, int quad_degree);

/// C1 stream element with value moments.
struct C1Element {
  StreamSpace space;
  MatrixXd pi_hessian;   // P_{k+1} x N, the H2 seminorm projection
  MatrixXd pi0;          // P_{k-1}
  MatrixXd moments;      // int phi m_a, |a| <= k - 1
  MatrixXd laplacian;    // P_{k-1}
  MatrixXd grad;         // [P_k]^2
  MatrixXd curl;         // [P_k]^2
  MatrixXd hessian;      // [P_{k-1}]^4, block 2i + j holds d_i d_j phi
  MatrixXd dof_matrix;   // N x P_{k+1}
  MatrixXd consistency;  // N x N
  MatrixXd stiffness;    // N x N

  [[nodiscard]] int nk() const { return poly_dim(space.k); }
  [[nodiscard]] auto grad_block(int i) const { return grad.middleRows(i * nk(), nk()); }
  [[nodiscard]] auto curl_block(int i) const { return curl.middleRows(i * nk(), nk()); }
  [[nodiscard]] auto hessian_block(int i, int j) const {
    const int n = poly_dim(space.k - 1);
    return hessian.middleRows((2 * i + j) * n, n);
  }
};

C1Element build_c1_element(std::shared_ptr<const CellFrame> cell, int k);

/// int (Pi Lap zeta)(Pi curl psi) . (Pi grad phi): rows phi, columns psi.
MatrixXd c1_trilinear_matrix(const C1Element& el, const VectorXd& zeta);
/// d/dzeta of the same form at fixed psi: rows phi, columns zeta.
MatrixXd c1_trilinear_wind_derivative(const C1Element& el, const VectorXd& psi);

}  // namespace dfvem
