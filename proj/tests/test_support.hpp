#pragma once

#include "dfvem/cell_frame.hpp"
#include "dfvem/polybasis.hpp"

#include <random>
#include <vector>

namespace testing {

using dfvem::Vec2;

inline std::vector<Vec2> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

inline std::vector<Vec2> regular_polygon(int n, double radius, const Vec2& center = Vec2::Zero(), double phase = 0.3) {
  std::vector<Vec2> p;
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2.0 * 3.14159265358979323846 * i / n;
    p.push_back(center + radius * Vec2(std::cos(t), std::sin(t)));
  }
  return p;
}

// convex, irregular, away from the origin
inline std::vector<Vec2> skewed_pentagon() { return {{0.3, 0.2}, {0.75, 0.28}, {0.82, 0.66}, {0.51, 0.9}, {0.22, 0.61}}; }

// not star-shaped with respect to its centroid
inline std::vector<Vec2> chevron() { return {{0, 0}, {1, 0}, {1, 1}, {0.9, 1}, {0.9, 0.1}, {0, 0.1}}; }

// nonconvex, star-shaped
inline std::vector<Vec2> arrow() { return {{0, 0}, {1, 0}, {1, 1}, {0.5, 0.6}, {0, 1}}; }

/// Random polynomial of degree n in global coordinates x, evaluated directly.
struct GlobalPoly {
  int n = 0;
  Eigen::VectorXd c;  // coefficients on x^a y^b in graded order
  Vec2 shift = Vec2(0.37, -0.21);

  [[nodiscard]] double operator()(const Vec2& x) const {
    const Vec2 z = x - shift;
    return dfvem::monomial_values(n, z).dot(c);
  }
  [[nodiscard]] double d(const Vec2& x, int dir) const {
    const Vec2 z = x - shift;
    return dfvem::monomial_values(n - 1, z).dot(dfvem::derivative_matrix(n, dir) * c);
  }
  [[nodiscard]] double dd(const Vec2& x, int i, int j) const {
    const Vec2 z = x - shift;
    if (n < 2) return 0.0;
    return dfvem::monomial_values(n - 2, z).dot(dfvem::derivative_matrix(n - 1, j) * dfvem::derivative_matrix(n, i) * c);
  }
  /// Coefficients in the scaled monomials of a frame.
  [[nodiscard]] Eigen::VectorXd in_frame(const dfvem::ScaledFrame& f) const {
    // sample at enough points and solve
    const int m = dfvem::poly_dim(n);
    Eigen::MatrixXd V(m + 5, m);
    Eigen::VectorXd r(m + 5);
    std::mt19937 g(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < m + 5; ++i) {
      const Vec2 xi(u(g), u(g));
      V.row(i) = dfvem::monomial_values(n, xi);
      r[i] = (*this)(f.to_global(xi));
    }
    return V.colPivHouseholderQr().solve(r);
  }
};

inline GlobalPoly random_poly(int n, std::mt19937& g) {
  std::uniform_real_distribution<double> u(-1, 1);
  GlobalPoly p;
  p.n = n;
  p.c.resize(dfvem::poly_dim(n));
  for (int i = 0; i < p.c.size(); ++i) p.c[i] = u(g);
  return p;
}

}  // namespace testing
