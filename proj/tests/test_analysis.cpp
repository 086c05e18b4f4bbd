#include "doctest.h"
#include "dfvem/analysis.hpp"
#include "dfvem/complex_check.hpp"

#include <cmath>

using namespace dfvem;

namespace {

std::shared_ptr<const PolygonalMesh> quads(int n, double amplitude = 0.3, std::uint64_t seed = 3) {
  return std::make_shared<const PolygonalMesh>(generate_distorted_quads(n, amplitude, seed));
}

std::shared_ptr<const PolygonalMesh> cvt(double h, std::uint64_t seed = 5) {
  return std::make_shared<const PolygonalMesh>(generate_cvt(h, seed, 30));
}

std::shared_ptr<const PolygonalMesh> single_square() {
  return std::make_shared<const PolygonalMesh>(
      PolygonalMesh::from_cells({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, {{0, 1, 2, 3}}));
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("zero solution error equals the exact seminorms") {
    const auto mesh = quads(4);
    const ManufacturedProblem p = test1(1.0);
    const Discretization d(mesh, 2, Formulation::velocity_pressure);
    double h1 = 0.0, l2 = 0.0, mean = 0.0, area = 0.0;
    for (int c = 0; c < d.n_cells(); ++c) {
      const auto rule = d.frame(c).quadrature(24);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        h1 += rule.weights[q] * p.grad_u(rule.points[q]).squaredNorm();
        mean += rule.weights[q] * p.pressure(rule.points[q]);
        l2 += rule.weights[q] * std::pow(p.pressure(rule.points[q]), 2);
      }
      area += d.frame(c).area();
    }
    mean /= area;
    CHECK(error_u_h1(d, p, VectorXd::Zero(d.n_velocity())) == doctest::Approx(std::sqrt(h1)).epsilon(1e-4));
    PiecewisePolynomial zero;
    for (int c = 0; c < d.n_cells(); ++c) zero.coeffs.push_back(VectorXd::Zero(1));
    CHECK(error_p_l2(d, p, zero) == doctest::Approx(std::sqrt(l2 - mean * mean * area)).epsilon(1e-4));
  }

  TEST_CASE("interpolated polynomial velocity has zero H1 error") {
    const auto mesh = quads(3);
    const ManufacturedProblem p = stokes_patch(1.0);
    const Discretization d(mesh, 2, Formulation::velocity_pressure);
    VectorXd u = VectorXd::Zero(d.n_velocity());
    for (int c = 0; c < d.n_cells(); ++c) {
      const VectorXd l = interpolate_velocity(d.velocity(c), p.velocity_function(), p.velocity_gradient());
      const auto& map = d.velocity_map(c);
      for (std::size_t i = 0; i < map.size(); ++i) u[map[i]] = l[i];
    }
    CHECK(error_u_h1(d, p, u) < 1e-10);
  }

  TEST_CASE("continuous trilinear identities") {
    for (int k : {2, 3}) {
      const auto r = trilinear_identity_checks(k);
      CHECK(r.conv_skew < 1e-11);
      CHECK(r.conv_rot < 1e-11);
      CHECK(r.control > 1e-6);
      CHECK(r.control == doctest::Approx(r.control_expected).epsilon(1e-9));
    }
  }

  TEST_CASE("rates") {
    CHECK(observed_rate(4.0, 1.0, 0.2, 0.1) == doctest::Approx(2.0));
    LevelResult a, b;
    a.h = 0.5;
    b.h = 0.25;
    a.converged = b.converged = true;
    a.err_u = 1.0;
    b.err_u = 0.125;
    a.err_p = b.err_p = a.err_psi = b.err_psi = 1.0;
    const auto rep = make_report({a, b});
    CHECK(std::isnan(rep.rate_u[0]));
    CHECK(rep.rate_u[1] == doctest::Approx(3.0));
    b.converged = false;
    CHECK(std::isnan(make_report({a, b}).rate_u[1]));
  }

  TEST_CASE("complex exactness") {
    for (int k : {2, 3}) {
      CAPTURE(k);
      for (const auto& mesh : {quads(2, 0.0), single_square(), quads(4), cvt(0.25)}) {
        const ComplexReport rep = verify_complex(mesh, k);
        for (const auto& c : rep.checks) {
          CAPTURE(c.name);
          CAPTURE(c.detail);
          CHECK(c.passed);
        }
      }
    }
  }
}
