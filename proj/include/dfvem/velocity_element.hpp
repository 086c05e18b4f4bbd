#pragma once

#include "dfvem/cell_frame.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace dfvem {

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;
/// Gradient of a vector field, (i, j) = d v_i / d x_j.
using TensorFunction = std::function<Eigen::Matrix2d(const Vec2&)>;

enum class Trilinear { none, conv, skew, rot };
Trilinear parse_trilinear(const std::string& name);
std::string trilinear_name(Trilinear t);

/// Local enhanced divergence-free-compatible velocity element of order k >= 2.
///
/// Local DoF order: vertex values (vx, vy) per vertex; edge values (vx, vy) at
/// the interior Gauss-Lobatto points, listed along the global edge orientation;
/// moments (1/|E|) int v . xi_perp m_g for |g| <= k - 3; divergence moments
/// (h/|E|) int div v (m_a - mean m_a) for 1 <= |a| <= k - 1.
///
/// Polynomial outputs are coefficients on the cell's scaled monomials; vector
/// polynomials stack the first component block over the second.
struct VelocityElement {
  std::shared_ptr<const CellFrame> cell;
  int k = 2;
  int n_vertices = 0;
  int n_dofs = 0;
  int n3 = 0;  // x_perp moments
  int n4 = 0;  // divergence moments
  int off3 = 0;
  int off4 = 0;

  MatrixXd pi_nabla;      // 2 n_k x N
  MatrixXd pi0;           // 2 n_k x N
  MatrixXd grad;          // 4 n_{k-1} x N, block 2i + j holds d_j v_i
  MatrixXd div;           // n_{k-1} x N
  MatrixXd curl;          // n_{k-1} x N
  MatrixXd grad_moments;  // int v . grad m_b for 1 <= |b| <= k + 1
  MatrixXd perp_moments;  // int v . xi_perp m_c for |c| <= k - 1
  MatrixXd flux;          // 1 x N, boundary integral of v . n
  MatrixXd dof_matrix;    // N x 2 n_k, DoFs of e_c m_a
  MatrixXd consistency;   // N x N
  MatrixXd stiffness;     // N x N, consistency + stabilization
  /// Pressure rows: q_0 = 1, q_a = m_a - mean(m_a); entry int q div v.
  MatrixXd divergence;

  [[nodiscard]] int nk() const { return poly_dim(k); }
  [[nodiscard]] int nk1() const { return poly_dim(k - 1); }
  [[nodiscard]] int vertex_dof(int i, int comp) const { return 2 * i + comp; }
  [[nodiscard]] int edge_dof(int e, int j, int comp) const { return 2 * n_vertices + 2 * (k - 1) * e + 2 * j + comp; }
  [[nodiscard]] auto P(int i) const { return pi0.middleRows(i * nk(), nk()); }
  [[nodiscard]] auto G(int i, int j) const { return grad.middleRows((2 * i + j) * nk1(), nk1()); }
  /// Columns that survive in the reduced element (D_V4 dropped).
  [[nodiscard]] std::vector<int> reduced_columns() const;
  /// Positions of the point DoF pairs: vertices first, then edge points by edge.
  [[nodiscard]] std::vector<Vec2> point_positions() const;
};

/// Builds all projectors and local matrices. Throws NumericalError when a
/// local system is ill-conditioned beyond 1e12.
VelocityElement build_velocity_element(std::shared_ptr<const CellFrame> cell, int k);

/// Integral table degree needed by an element of order k.
constexpr int table_degree_for(int k) { return 3 * k + 2; }

VectorXd interpolate_velocity(const VelocityElement& el, const VectorFunction& v, const TensorFunction& grad_v);

/// Monomial coefficients (columns) of the local pressure basis q_0 .. q_{n-1}.
MatrixXd pressure_basis(const VelocityElement& el);

/// C(w): rows test v, columns u, for the frozen wind DoFs w.
MatrixXd trilinear_matrix(const VelocityElement& el, Trilinear variant, const VectorXd& wind);
/// d/dw [C(w) u]: rows test v, columns w.
MatrixXd trilinear_wind_derivative(const VelocityElement& el, Trilinear variant, const VectorXd& u);

/// int f . Pi0_k phi_j for every DoF basis function.
VectorXd velocity_load(const VelocityElement& el, const VectorFunction& f, int quad_degree);

}  // namespace dfvem
