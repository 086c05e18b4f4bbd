#pragma once

#include "dfvem/polybasis.hpp"

#include <array>
#include <vector>

namespace dfvem {

/// Rule on the reference interval [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [0, 1] (exact to degree 2n - 1).
LineRule gauss_legendre(int n);
/// n-point Gauss-Lobatto nodes on [0, 1], endpoints included (n >= 2).
std::vector<double> gauss_lobatto_nodes(int n);
/// The k - 1 interior Gauss-Lobatto nodes of the (k + 1)-point rule, in (0, 1).
std::vector<double> interior_lobatto_nodes(int k);

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  void append(const QuadratureRule& other);
};

QuadratureRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree);

/// Rule on the segment [a, b]; weights carry the segment length.
QuadratureRule segment_rule(const Vec2& a, const Vec2& b, int degree);

/// Triangles (index triples) covering a simple counterclockwise polygon.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& polygon);

double shoelace_area(const std::vector<Vec2>& polygon);
Vec2 polygon_centroid(const std::vector<Vec2>& polygon);

/// Fan from the centroid, or ear clipping if some fan triangle is inverted.
QuadratureRule polygon_quadrature(const std::vector<Vec2>& polygon, int degree);

}  // namespace dfvem
