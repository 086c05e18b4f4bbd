#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dfvem {

using Vec2 = Eigen::Vector2d;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::RowVectorXd;

/// Dimension of the bivariate polynomials of total degree <= n (0 for n < 0).
constexpr int poly_dim(int n) { return n < 0 ? 0 : (n + 1) * (n + 2) / 2; }

/// Position of the monomial xi^a eta^b in the graded ordering
/// 1, xi, eta, xi^2, xi eta, eta^2, ...
constexpr int mono_index(int a, int b) {
  const int d = a + b;
  return d * (d + 1) / 2 + b;
}

struct MultiIndex {
  int a = 0;
  int b = 0;
  [[nodiscard]] int degree() const { return a + b; }
};

/// Multi-indices of all monomials of degree <= n, in graded order.
const std::vector<MultiIndex>& multi_indices(int n);

/// Largest degree n with poly_dim(n) == size; throws if size is not a triangular number.
int degree_from_size(Eigen::Index size);

// Polynomials are stored as coefficient vectors on the scaled monomials
// m_a(xi) = xi^a1 eta^a2 of some frame, xi = (x - x_E) / h_E.

RowVectorXd monomial_values(int n, const Vec2& xi);
double poly_eval(const VectorXd& coeffs, const Vec2& xi);

/// Derivative with respect to xi (dir 0) or eta (dir 1); the result has degree n - 1.
VectorXd poly_derivative(const VectorXd& coeffs, int dir);
VectorXd poly_multiply(const VectorXd& p, const VectorXd& q);
/// Zero-pads (or checks and truncates) to the dimension of degree n.
VectorXd poly_resize(const VectorXd& coeffs, int n);

/// Matrix of d/dxi (dir 0) or d/deta (dir 1) from degree n to degree n - 1 coefficients.
MatrixXd derivative_matrix(int n, int dir);
/// Matrix of multiplication by the monomial xi^a eta^b, degree n -> n + a + b.
MatrixXd monomial_shift_matrix(int n, int a, int b);
/// Laplacian in scaled variables (d2/dxi2 + d2/deta2), degree n -> n - 2.
MatrixXd laplacian_matrix(int n);

/// Scaled monomial frame of a cell: center x_E, scale h_E.
struct ScaledFrame {
  Vec2 center = Vec2::Zero();
  double scale = 1.0;

  [[nodiscard]] Vec2 to_local(const Vec2& x) const { return (x - center) / scale; }
  [[nodiscard]] Vec2 to_global(const Vec2& xi) const { return center + scale * xi; }
};

/// Splitting of [P_n]^2 into grad P_{n+1} (+) xi_perp P_{n-1}, xi_perp = (eta, -xi).
///
/// Gradients are taken in physical coordinates, i.e. grad m = (1/h) grad_xi m.
/// Column layout of `basis`: first the gradients of m_b for 1 <= |b| <= n+1,
/// then xi_perp m_c for |c| <= n-1. Rows hold the [P_n]^2 coefficients
/// (first component block, then second).
class VectorPolyDecomposition {
 public:
  VectorPolyDecomposition(int n, double scale);

  [[nodiscard]] int degree() const { return n_; }
  [[nodiscard]] int n_gradient() const { return poly_dim(n_ + 1) - 1; }
  [[nodiscard]] int n_perp() const { return poly_dim(n_ - 1); }
  [[nodiscard]] const MatrixXd& basis() const { return basis_; }

  /// Coefficients (gradient block, then perp block) of the vector polynomial w.
  [[nodiscard]] VectorXd split(const VectorXd& w) const;
  /// Same as split, applied to every column.
  [[nodiscard]] MatrixXd split_columns(const MatrixXd& w) const;

 private:
  int n_;
  MatrixXd basis_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

/// Coefficients of curl(xi_perp p) for p in P_{n-1} (physical curl, frame scale h).
MatrixXd curl_perp_matrix(int n_minus_1, double scale);

/// Solves curl(xi_perp p) = q for p in P_{n-1}; q given in P_{n-1} coefficients.
/// Throws NumericalError if the local system is ill-conditioned beyond 1e12.
VectorXd curl_isomorphism_solve(const VectorXd& q, double scale);

}  // namespace dfvem
