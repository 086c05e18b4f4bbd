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

double rel(const VectorXd& a, const VectorXd& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("Stokes patch test is exact in every formulation") {
    const auto mesh = quads(4);
    const ManufacturedProblem patch = stokes_patch(1.0);
    for (int k : {2, 3}) {
      for (Formulation f : {Formulation::velocity_pressure, Formulation::reduced, Formulation::curl, Formulation::stream}) {
        CAPTURE(k);
        CAPTURE(formulation_name(f));
        const Discretization d(mesh, k, f);
        SolverSettings s;
        s.trilinear = Trilinear::none;
        const Solution sol = solve(d, patch, s);
        CHECK(sol.report.converged);
        if (d.has_velocity()) {
          CHECK(error_u_h1(d, patch, sol.velocity) < 1e-9);
        } else {
          CHECK(error_psi_h2(d, patch, sol.stream) < 1e-9);
        }
        // piecewise constants cannot hold the linear pressure
        if (f != Formulation::reduced)
          if (const auto p = convective_pressure(d, patch, sol)) CHECK(error_p_l2(d, patch, *p) < 1e-9);
      }
    }
  }

  TEST_CASE("zero data gives the zero solution after the Stokes step") {
    const auto mesh = quads(3);
    for (Formulation f : {Formulation::velocity_pressure, Formulation::curl, Formulation::stream}) {
      const Discretization d(mesh, 2, f);
      const Solution sol = solve(d, zero_problem(), SolverSettings{});
      CHECK(sol.report.converged);
      CHECK(sol.report.iterations == 1);
      if (d.has_velocity()) CHECK(sol.velocity.norm() == 0.0);
      if (d.has_stream()) CHECK(sol.stream.norm() == 0.0);
    }
  }

  TEST_CASE("unknown counts") {
    CHECK(Discretization(single_square(), 2, Formulation::curl).n_unknowns() == 0);
    for (const auto& mesh : {quads(3), quads(5, 0.2, 9), cvt(0.25)}) {
      for (int k : {2, 3}) {
        const Discretization r(mesh, k, Formulation::reduced), c(mesh, k, Formulation::curl);
        CHECK(c.n_unknowns() == r.n_unknowns() - 2 * (mesh->n_cells() - 1));
      }
    }
  }

  TEST_CASE("velocity-pressure and curl solutions coincide") {
    const auto mesh = cvt(0.25);
    const ManufacturedProblem p = test1(1.0);
    for (Trilinear t : {Trilinear::conv, Trilinear::skew, Trilinear::rot}) {
      CAPTURE(trilinear_name(t));
      SolverSettings s;
      s.trilinear = t;
      const Discretization vp(mesh, 2, Formulation::velocity_pressure), cu(mesh, 2, Formulation::curl);
      const Solution a = solve(vp, p, s), b = solve(cu, p, s);
      REQUIRE(a.report.converged);
      REQUIRE(b.report.converged);
      CHECK(rel(b.velocity, a.velocity) < 1e-8);
      CHECK(divergence_defect(vp, a.velocity) < 1e-10);
      CHECK(divergence_defect(cu, b.velocity) < 1e-10);
      // recovered pressure equals the saddle-point pressure
      const PressureRecovery rec = recover_pressure(cu, p, b.velocity, t);
      CHECK(rel(rec.pressure, a.pressure) < 1e-6);
      CHECK(std::abs(pressure_field(cu, rec.pressure).integral(cu)) < 1e-11);
    }
  }

  TEST_CASE("first operators of the stream formulations are symmetric") {
    const auto mesh = quads(3);
    for (Formulation f : {Formulation::curl, Formulation::stream}) {
      const Discretization d(mesh, 2, f);
      const SparseMatrix a = stokes_operator(d, 1.0);
      const SparseMatrix diff = a - SparseMatrix(a.transpose());
      CHECK(diff.norm() <= 1e-12 * a.norm());
    }
  }

  TEST_CASE("Newton converges fast for a Stokes-dominated flow") {
    const auto mesh = std::make_shared<const PolygonalMesh>(generate_disk_triangles(0.25));
    const Discretization d(mesh, 2, Formulation::curl);
    const Solution sol = solve(d, test2(1e4), SolverSettings{});
    CHECK(sol.report.converged);
    CHECK(sol.report.iterations <= 2);
  }

  TEST_CASE("Test 1 on a CVT mesh converges within 10 iterations") {
    const auto mesh = std::make_shared<const PolygonalMesh>(generate_cvt(0.125, 1));
    for (Formulation f : {Formulation::curl, Formulation::stream}) {
      const Discretization d(mesh, 2, f);
      const Solution sol = solve(d, test1(1.0), SolverSettings{});
      CHECK(sol.report.converged);
      CHECK(sol.report.iterations <= 10);
    }
  }

  TEST_CASE("Bernoulli conversion has zero mean and leaves zero velocity alone") {
    const auto mesh = quads(3);
    const Discretization d(mesh, 2, Formulation::velocity_pressure);
    PiecewisePolynomial b;
    for (int c = 0; c < d.n_cells(); ++c) b.coeffs.push_back(VectorXd::Zero(3));
    VectorXd u = VectorXd::Zero(d.n_velocity());
    for (int i = 0; i < u.size(); ++i) u[i] = std::sin(1.0 + i);
    CHECK(std::abs(bernoulli_to_convective(d, b, u).integral(d)) < 1e-12);
    b.coeffs[0][0] = 1.0;
    const double shift = b.integral(d);
    for (auto& q : b.coeffs) q[0] -= shift;
    const auto p = bernoulli_to_convective(d, b, VectorXd::Zero(d.n_velocity()));
    for (int c = 0; c < d.n_cells(); ++c) CHECK((p.coeffs[c].head(3) - b.coeffs[c]).norm() < 1e-13);
  }
}

