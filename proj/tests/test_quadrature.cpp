#include "doctest.h"
#include "dfvem/errors.hpp"
#include "dfvem/quadrature.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace dfvem;

namespace {

// Green's theorem oracle: int x^a y^b = boundary int x^(a+1) y^b / (a+1) dy,
// with a Gauss rule of high degree on each straight edge.
double green_moment(const std::vector<Vec2>& poly, int a, int b) {
  const LineRule line = gauss_legendre(a + b + 3);
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
    for (std::size_t j = 0; j < line.points.size(); ++j) {
      const Vec2 x = p + line.points[j] * (q - p);
      s += line.weights[j] * (q.y() - p.y()) * std::pow(x.x(), a + 1) * std::pow(x.y(), b) / (a + 1);
    }
  }
  return s;
}

double apply(const QuadratureRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i].x(), a) * std::pow(r.points[i].y(), b);
  return s;
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre exactness") {
    for (int n = 1; n <= 8; ++n) {
      const LineRule r = gauss_legendre(n);
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], 2 * n - 1);
      CHECK(s == doctest::Approx(1.0 / (2 * n)).epsilon(1e-14));
    }
  }

  TEST_CASE("Gauss-Lobatto edge DoF points") {
    const auto k2 = interior_lobatto_nodes(2);
    REQUIRE(k2.size() == 1);
    CHECK(k2[0] == doctest::Approx(0.5).epsilon(1e-15));
    const auto k3 = interior_lobatto_nodes(3);
    REQUIRE(k3.size() == 2);
    CHECK(k3[0] == doctest::Approx(0.5 * (1 - 1 / std::sqrt(5.0))).epsilon(1e-14));
    CHECK(k3[1] == doctest::Approx(0.5 * (1 + 1 / std::sqrt(5.0))).epsilon(1e-14));
    const auto k4 = interior_lobatto_nodes(4);
    REQUIRE(k4.size() == 3);
    CHECK(k4[0] == doctest::Approx(0.5 * (1 - std::sqrt(3.0 / 7.0))).epsilon(1e-14));
  }

  TEST_CASE("segment rule integrates linear functions exactly") {
    const QuadratureRule r = segment_rule(Vec2(0, 0), Vec2(3, 4), 1);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * (2 * r.points[i].x() + 1);
    // length 5, mean of 2x + 1 is 4
    CHECK(s == doctest::Approx(20.0).epsilon(1e-14));
  }

  TEST_CASE("unit square moments") {
    const auto r = polygon_quadrature(testing::unit_square(), 4);
    CHECK(apply(r, 2, 2) == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    for (double w : r.weights) CHECK(w > 0.0);
  }

  TEST_CASE("area and centroid") {
    for (const auto& poly : {testing::skewed_pentagon(), testing::arrow(), testing::chevron(), testing::regular_polygon(7, 0.4)}) {
      const auto r = polygon_quadrature(poly, 0);
      CHECK(apply(r, 0, 0) == doctest::Approx(shoelace_area(poly)).epsilon(1e-13));
    }
    const auto hex = testing::regular_polygon(6, 0.5, Vec2::Zero(), 0.0);
    CHECK(std::abs(apply(polygon_quadrature(hex, 1), 1, 0)) <= 1e-15);
  }

  TEST_CASE("monomial exactness against Green's theorem") {
    for (const auto& poly : {testing::skewed_pentagon(), testing::arrow(), testing::chevron()}) {
      const int deg = 8;
      const auto r = polygon_quadrature(poly, deg);
      for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b) {
          const double exact = green_moment(poly, a, b);
          CHECK(std::abs(apply(r, a, b) - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
        }
    }
  }

  TEST_CASE("ear clipping covers nonconvex polygons") {
    const auto poly = testing::chevron();
    const auto tris = ear_clip(poly);
    CHECK(tris.size() == poly.size() - 2);
    double area = 0.0;
    for (const auto& t : tris) {
      const double a = shoelace_area({poly[t[0]], poly[t[1]], poly[t[2]]});
      CHECK(a > 0.0);
      area += a;
    }
    CHECK(area == doctest::Approx(shoelace_area(poly)).epsilon(1e-14));
  }
}
