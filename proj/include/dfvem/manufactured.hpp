#pragma once

#include "dfvem/stream_element.hpp"

#include <array>
#include <string>

namespace dfvem {

/// Derivatives d^a_x d^b_y psi stored at mono_index(a, b), up to order 4.
using PsiJet = std::array<double, 15>;

/// Steady flow with u = curl psi, given through psi and p and their derivatives.
/// The load follows from -nu lap u + (grad u) u - grad p = f (the convective term
/// is dropped for Stokes problems).
struct ManufacturedProblem {
  std::string name;
  double nu = 1.0;
  bool convective = true;
  bool on_disk = false;
  std::function<PsiJet(const Vec2&)> psi;
  /// (p, p_x, p_y)
  std::function<Eigen::Vector3d(const Vec2&)> p;

  [[nodiscard]] Vec2 u(const Vec2& x) const;
  /// (i, j) = d u_i / d x_j; equal to the gradient of curl psi.
  [[nodiscard]] Eigen::Matrix2d grad_u(const Vec2& x) const;
  [[nodiscard]] double pressure(const Vec2& x) const { return p(x)[0]; }
  [[nodiscard]] Vec2 f(const Vec2& x) const;
  /// curl f = nu lap^2 psi - curl psi . grad lap psi.
  [[nodiscard]] double curl_f(const Vec2& x) const;
  /// Hessian of psi.
  [[nodiscard]] Eigen::Matrix2d hess_psi(const Vec2& x) const;

  [[nodiscard]] VectorFunction velocity_function() const;
  [[nodiscard]] TensorFunction velocity_gradient() const;
  [[nodiscard]] StreamFunction stream_function() const;
  [[nodiscard]] VectorFunction load() const;
  [[nodiscard]] ScalarFunction curl_load() const;
};

/// Square, psi = sin^2(2 pi x) sin^2(2 pi y) / (8 pi), p = pi^2 sin(2 pi x) cos(2 pi y).
ManufacturedProblem test1(double nu = 1.0);
/// Unit disk, psi = x^2 y + y^3 / 3, p = x^3 y^3 - 1/16.
ManufacturedProblem test2(double nu = 1.0);
/// Stokes flow with psi cubic and p linear on the square (exactly representable for k >= 2).
ManufacturedProblem stokes_patch(double nu = 1.0);
/// Zero data.
ManufacturedProblem zero_problem(double nu = 1.0);

/// Lookup by name: test1, test2, patch, zero. Throws ConfigError listing the valid names.
ManufacturedProblem problem_by_name(const std::string& name, double nu);

}  // namespace dfvem
