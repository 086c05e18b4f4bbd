#include "doctest.h"
#include "dfvem/stream_element.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace dfvem;
using testing::GlobalPoly;

namespace {

StreamFunction jet(const GlobalPoly& p) {
  return [p](const Vec2& x) { return Eigen::Vector3d(p(x), p.d(x, 0), p.d(x, 1)); };
}

std::shared_ptr<CellFrame> frame(const std::vector<Vec2>& poly, int k) {
  return std::make_shared<CellFrame>(poly, table_degree_for(k));
}

std::vector<std::vector<Vec2>> cells() {
  return {testing::unit_square(), testing::skewed_pentagon(), testing::arrow(),
          testing::regular_polygon(7, 0.04, Vec2(0.5, 0.2))};
}

template <class F>
double integrate(const CellFrame& E, int degree, F f) {
  const auto rule = E.quadrature(degree);
  double s = 0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(rule.points[q]);
  return s;
}

double rel(const VectorXd& a, const VectorXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

int rank_of(const MatrixXd& m, double tol) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i) r += s[i] > tol * s[0];
  return r;
}

// scaled monomial coefficients of the degree-n polynomial p
VectorXd coeffs(const GlobalPoly& p, const CellFrame& E, int n) { return poly_resize(p.in_frame(E.frame()), n); }

}  // namespace

TEST_SUITE("stream_element") {
  TEST_CASE("dof count") {
    const auto s = build_stream_space(frame(testing::unit_square(), 2), 2);
    CHECK(s.n_dofs == 16);
    for (int k = 2; k <= 4; ++k) {
      const auto t = build_stream_space(frame(testing::skewed_pentagon(), k), k);
      CHECK(t.n_dofs == 2 * 5 * k + (k - 1) * (k - 2) / 2);
    }
  }

  TEST_CASE("edge traces") {
    const auto s = build_stream_space(frame(testing::unit_square(), 3), 3);
    VectorXd one = interpolate_stream(s, StreamMoments::curl_perp, [](const Vec2&) { return Eigen::Vector3d(1, 0, 0); });
    VectorXd x = interpolate_stream(s, StreamMoments::curl_perp, [](const Vec2& p) { return Eigen::Vector3d(p.x(), 1, 0); });
    for (double t : {0.0, 0.3, 0.8, 1.0}) {
      for (int e = 0; e < 4; ++e) {
        CHECK(s.trace_value(e, t).dot(one) == doctest::Approx(1.0));
        CHECK((s.trace_gradient(e, t) * one).norm() < 1e-13);
      }
      // bottom edge runs (0,0) -> (1,0)
      CHECK(s.trace_value(0, t).dot(x) == doctest::Approx(t));
      CHECK(std::abs((s.trace_gradient(0, t) * x)[1]) < 1e-14);
    }
    std::mt19937 g(2);
    for (int k = 2; k <= 4; ++k)
      for (const auto& poly : cells()) {
        const auto sp = build_stream_space(frame(poly, k), k);
        const GlobalPoly p = testing::random_poly(k + 1, g);
        const VectorXd d = interpolate_stream(sp, StreamMoments::curl_perp, jet(p));
        for (int e = 0; e < sp.n_vertices; ++e)
          for (double t : {0.0, 0.17, 0.5, 0.91}) {
            const Vec2 pt = sp.cell->edges()[e].point(t);
            CHECK(sp.trace_value(e, t).dot(d) == doctest::Approx(p(pt)).epsilon(1e-11));
            const Eigen::Vector2d gr = sp.trace_gradient(e, t) * d;
            CHECK(gr[0] == doctest::Approx(p.d(pt, 0)).epsilon(1e-10));
            CHECK(gr[1] == doctest::Approx(p.d(pt, 1)).epsilon(1e-10));
          }
      }
  }

  TEST_CASE("curl transfer") {
    const auto vel = build_velocity_element(frame(testing::skewed_pentagon(), 2), 2);
    const auto st = build_stream_element(vel);
    const VectorXd x = interpolate_stream(st.space, StreamMoments::curl_perp,
                                          [](const Vec2& p) { return Eigen::Vector3d(p.x(), 1, 0); });
    const VectorXd v = st.transfer * x;
    for (int p = 0; p < vel.off3 / 2; ++p) {
      CHECK(std::abs(v[2 * p]) < 1e-13);
      CHECK(v[2 * p + 1] == doctest::Approx(-1.0));
    }
    CHECK(v.segment(vel.off4, vel.n4).norm() == 0.0);

    std::mt19937 g(8);
    for (int k = 2; k <= 4; ++k)
      for (const auto& poly : cells()) {
        CAPTURE(k);
        const auto ve = build_velocity_element(frame(poly, k), k);
        const auto se = build_stream_element(ve);
        const GlobalPoly p = testing::random_poly(k + 1, g);
        const VectorXd d = interpolate_stream(se.space, StreamMoments::curl_perp, jet(p));
        const VectorXd direct = interpolate_velocity(
            ve, [&](const Vec2& x) { return Vec2(p.d(x, 1), -p.d(x, 0)); },
            [&](const Vec2& x) {
              Eigen::Matrix2d m;
              m << p.dd(x, 0, 1), p.dd(x, 1, 1), -p.dd(x, 0, 0), -p.dd(x, 0, 1);
              return m;
            });
        CHECK(rel(se.transfer * d, direct) < 1e-10);
        // exactness at the element level
        const MatrixXd bt = ve.divergence * se.transfer;
        CHECK(bt.cwiseAbs().maxCoeff() < 1e-13 * std::max(1.0, ve.divergence.cwiseAbs().maxCoeff()));
        CHECK(rank_of(se.transfer, 1e-10) == se.space.n_dofs - 1);
        CHECK(se.transfer.middleRows(ve.off4, ve.n4).norm() == 0.0);
      }
  }

  TEST_CASE("phi moments and L2 projection") {
    std::mt19937 g(4);
    for (int k = 2; k <= 4; ++k)
      for (const auto& poly : cells()) {
        CAPTURE(k);
        const auto ve = build_velocity_element(frame(poly, k), k);
        const auto se = build_stream_element(ve);
        const CellFrame& E = *ve.cell;
        const GlobalPoly p = testing::random_poly(k + 1, g);
        const VectorXd d = interpolate_stream(se.space, StreamMoments::curl_perp, jet(p));
        const VectorXd m = se.phi_moments * d;
        for (int a = 0; a < m.size(); ++a) {
          const double exact = integrate(E, 2 * k + 2, [&](const Vec2& x) { return p(x) * monomial_values(k - 1, E.to_local(x))[a]; });
          CHECK(m[a] == doctest::Approx(exact).epsilon(1e-10));
        }
        const GlobalPoly q = testing::random_poly(k - 1, g);
        const VectorXd dq = interpolate_stream(se.space, StreamMoments::curl_perp, jet(q));
        CHECK(rel(se.pi0 * dq, coeffs(q, E, k - 1)) < 1e-10);
        CHECK((se.phi_moments * VectorXd::Zero(se.space.n_dofs)).norm() == 0.0);
      }
  }

  TEST_CASE("stream load is exact for polynomial data in P_{k-1}") {
    std::mt19937 g(14);
    const int k = 3;
    const auto ve = build_velocity_element(frame(testing::arrow(), k), k);
    const auto se = build_stream_element(ve);
    const GlobalPoly f = testing::random_poly(k - 1, g), p = testing::random_poly(k + 1, g);
    const VectorXd d = interpolate_stream(se.space, StreamMoments::curl_perp, jet(p));
    const double exact = integrate(*ve.cell, 2 * k + 2, [&](const Vec2& x) { return f(x) * p(x); });
    CHECK(stream_load(se.space, se.pi0, f, 2 * k).dot(d) == doctest::Approx(exact).epsilon(1e-10));
  }

  TEST_CASE("c1 projections reproduce polynomials") {
    std::mt19937 g(6);
    for (int k = 2; k <= 4; ++k)
      for (const auto& poly : cells()) {
        CAPTURE(k);
        const auto el = build_c1_element(frame(poly, k), k);
        const CellFrame& E = *el.space.cell;
        const double h = E.h();
        const GlobalPoly p = testing::random_poly(k + 1, g);
        const VectorXd d = interpolate_stream(el.space, StreamMoments::value, jet(p));
        const VectorXd c = coeffs(p, E, k + 1);
        CHECK(rel(el.pi_hessian * d, c) < 1e-10);
        CHECK(rel(el.dof_matrix * c, d) < 1e-10);
        const MatrixXd dx = derivative_matrix(k + 1, 0) / h, dy = derivative_matrix(k + 1, 1) / h;
        const MatrixXd dx1 = derivative_matrix(k, 0) / h, dy1 = derivative_matrix(k, 1) / h;
        VectorXd gr(2 * poly_dim(k));
        gr << dx * c, dy * c;
        CHECK(rel(el.grad * d, gr) < 1e-10);
        VectorXd cu(2 * poly_dim(k));
        cu << dy * c, -(dx * c);
        CHECK(rel(el.curl * d, cu) < 1e-10);
        CHECK(rel(el.laplacian * d, dx1 * dx * c + dy1 * dy * c) < 1e-10);
        CHECK(rel(el.hessian_block(0, 1) * d, dy1 * dx * c) < 1e-9);
        CHECK(rel(el.hessian_block(1, 1) * d, dy1 * dy * c) < 1e-9);
        CHECK(rel(el.hessian_block(0, 0) * d, dx1 * dx * c) < 1e-9);
        for (int a = 0; a < el.moments.rows(); ++a) {
          const double exact = integrate(E, 2 * k + 2, [&](const Vec2& x) { return p(x) * monomial_values(k - 1, E.to_local(x))[a]; });
          CHECK((el.moments * d)[a] == doctest::Approx(exact).epsilon(1e-10));
        }
        // projection property on arbitrary DoF vectors
        const MatrixXd pd = el.pi_hessian * el.dof_matrix;
        CHECK((pd - MatrixXd::Identity(pd.rows(), pd.cols())).norm() < 1e-9);
      }
  }

  TEST_CASE("c1 affine functions are fixed by the boundary means") {
    const auto el = build_c1_element(frame(testing::arrow(), 3), 3);
    const VectorXd d = interpolate_stream(el.space, StreamMoments::value,
                                          [](const Vec2& x) { return Eigen::Vector3d(2 - x.x() + 3 * x.y(), -1, 3); });
    const VectorXd c = el.pi_hessian * d;
    const Vec2 x(0.4, 0.3);
    CHECK(poly_eval(c, el.space.cell->to_local(x)) == doctest::Approx(2 - 0.4 + 0.9));
  }

  TEST_CASE("c1 stiffness") {
    std::mt19937 g(10);
    for (int k = 2; k <= 3; ++k)
      for (const auto& poly : cells()) {
        CAPTURE(k);
        const auto el = build_c1_element(frame(poly, k), k);
        const CellFrame& E = *el.space.cell;
        const MatrixXd& A = el.stiffness;
        CHECK((A - A.transpose()).norm() < 1e-10 * A.norm());
        const GlobalPoly p = testing::random_poly(k + 1, g), q = testing::random_poly(k + 1, g);
        const VectorXd dp = interpolate_stream(el.space, StreamMoments::value, jet(p));
        const VectorXd dq = interpolate_stream(el.space, StreamMoments::value, jet(q));
        const double exact = integrate(E, 2 * k, [&](const Vec2& x) {
          return (p.dd(x, 0, 0) + p.dd(x, 1, 1)) * (q.dd(x, 0, 0) + q.dd(x, 1, 1));
        });
        CHECK(dp.dot(A * dq) == doctest::Approx(exact).epsilon(1e-9));
        // harmonic polynomials of degree <= k + 1 span the kernel
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (A + A.transpose()));
        const auto& ev = eig.eigenvalues();
        int zero = 0;
        for (int i = 0; i < ev.size(); ++i) zero += std::abs(ev[i]) < 1e-9 * ev[ev.size() - 1];
        CHECK(zero == 2 * (k + 1) + 1);
        CHECK(ev[0] > -1e-9 * ev[ev.size() - 1]);
      }
  }

  TEST_CASE("c1 trilinear form") {
    std::mt19937 g(12);
    for (int k = 2; k <= 3; ++k) {
      const auto el = build_c1_element(frame(testing::skewed_pentagon(), k), k);
      const CellFrame& E = *el.space.cell;
      const GlobalPoly z = testing::random_poly(k + 1, g), s = testing::random_poly(k + 1, g),
                       f = testing::random_poly(k + 1, g);
      const VectorXd dz = interpolate_stream(el.space, StreamMoments::value, jet(z));
      const VectorXd ds = interpolate_stream(el.space, StreamMoments::value, jet(s));
      const VectorXd df = interpolate_stream(el.space, StreamMoments::value, jet(f));
      const double exact = integrate(E, 3 * k + 1, [&](const Vec2& x) {
        const double lz = z.dd(x, 0, 0) + z.dd(x, 1, 1);
        return lz * (s.d(x, 1) * f.d(x, 0) - s.d(x, 0) * f.d(x, 1));
      });
      const MatrixXd M = c1_trilinear_matrix(el, dz);
      CHECK(df.dot(M * ds) == doctest::Approx(exact).epsilon(1e-9));
      CHECK(rel(c1_trilinear_wind_derivative(el, ds) * dz, M * ds) < 1e-10);
      // harmonic wind
      const VectorXd dh = interpolate_stream(el.space, StreamMoments::value,
                                             [](const Vec2& x) { return Eigen::Vector3d(x.x() * x.x() - x.y() * x.y(), 2 * x.x(), -2 * x.y()); });
      CHECK(c1_trilinear_matrix(el, dh).norm() < 1e-10 * M.norm());
    }
  }
}
