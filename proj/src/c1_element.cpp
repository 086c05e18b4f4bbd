#include "dfvem/errors.hpp"
#include "dfvem/local_solve.hpp"
#include "dfvem/stream_element.hpp"

namespace dfvem {

namespace {

MatrixXd block_diag2(const MatrixXd& a) {
  MatrixXd m = MatrixXd::Zero(2 * a.rows(), 2 * a.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(a.rows(), a.cols()) = a;
  return m;
}

}  // namespace

C1Element build_c1_element(std::shared_ptr<const CellFrame> cell, int k) {
  if (cell->table_degree() < table_degree_for(k)) throw std::logic_error("cell integral table too small for k");
  C1Element el;
  el.space = build_stream_space(cell, k);
  const StreamSpace& s = el.space;
  const CellFrame& E = *cell;
  const int N = s.n_dofs;
  const int nK = poly_dim(k + 1), nk = poly_dim(k), nk1 = poly_dim(k - 1);
  const double h = E.h(), area = E.area();

  // boundary integral of g0 phi + g1 . grad phi; g(edge, point) -> (g0, g1x, g1y)
  const auto boundary_row = [&](const auto& g) {
    RowVectorXd row = RowVectorXd::Zero(N);
    for (int e = 0; e < s.n_vertices; ++e) {
      const FrameEdge& edge = E.edges()[e];
      for (std::size_t q = 0; q < edge.t.size(); ++q) {
        const Eigen::Vector3d c = g(edge, E.to_local(edge.x[q]));
        if (c[0] != 0.0) row += edge.w[q] * c[0] * s.trace_value(e, edge.t[q]);
        if (c[1] != 0.0 || c[2] != 0.0) row += edge.w[q] * c.tail<2>().transpose() * s.trace_gradient(e, edge.t[q]);
      }
    }
    return row;
  };

  const MatrixXd dx = derivative_matrix(k + 1, 0) / h, dy = derivative_matrix(k + 1, 1) / h;
  const MatrixXd dxx = derivative_matrix(k, 0) / h * dx, dxy = derivative_matrix(k, 1) / h * dx,
                 dyy = derivative_matrix(k, 1) / h * dy;
  const MatrixXd lapK = dxx + dyy;  // P_{k+1} -> P_{k-1}

  MatrixXd low_moments = MatrixXd::Zero(s.n5, N);
  for (int g = 0; g < s.n5; ++g) low_moments(g, s.off5 + g) = area;

  // H2 seminorm projection:
  // int hess q : hess phi = int lap^2 q phi - bnd dn(lap q) phi + bnd (hess q n) . grad phi
  {
    const MatrixXd G = E.gram(k - 1, k - 1);
    MatrixXd lhs = dxx.transpose() * G * dxx + 2.0 * dxy.transpose() * G * dxy + dyy.transpose() * G * dyy;
    MatrixXd rhs = MatrixXd::Zero(nK, N);
    const MatrixXd lap2 = laplacian_matrix(k - 1) / (h * h) * lapK;  // P_{k+1} -> P_{k-3}
    const MatrixXd lap_dx = derivative_matrix(k - 1, 0) / h * lapK, lap_dy = derivative_matrix(k - 1, 1) / h * lapK;
    for (int i = 3; i < nK; ++i) {
      if (s.n5 > 0) rhs.row(i) = lap2.col(i).head(s.n5).transpose() * low_moments;
      rhs.row(i) += boundary_row([&](const FrameEdge& edge, const Vec2& xi) {
        const Vec2 n = edge.normal;
        const RowVectorXd m2 = monomial_values(k - 2, xi);
        const double dn_lap = n.x() * m2.dot(lap_dx.col(i)) + n.y() * m2.dot(lap_dy.col(i));
        const RowVectorXd m1 = monomial_values(k - 1, xi);
        const double hxx = m1.dot(dxx.col(i)), hxy = m1.dot(dxy.col(i)), hyy = m1.dot(dyy.col(i));
        return Eigen::Vector3d(-dn_lap, hxx * n.x() + hxy * n.y(), hxy * n.x() + hyy * n.y());
      });
    }
    // affine part: boundary means of phi and of grad phi
    lhs.topRows(3).setZero();
    rhs.topRows(3).setZero();
    for (int e = 0; e < s.n_vertices; ++e) {
      const FrameEdge& edge = E.edges()[e];
      for (std::size_t q = 0; q < edge.t.size(); ++q) {
        const Vec2 xi = E.to_local(edge.x[q]);
        const RowVectorXd m = monomial_values(k, xi);
        lhs.row(0) += edge.w[q] * monomial_values(k + 1, xi);
        lhs.row(1) += edge.w[q] * m * dx;
        lhs.row(2) += edge.w[q] * m * dy;
        rhs.row(0) += edge.w[q] * s.trace_value(e, edge.t[q]);
        rhs.middleRows(1, 2) += edge.w[q] * s.trace_gradient(e, edge.t[q]);
      }
    }
    el.pi_hessian = guarded_solve(lhs, rhs, "H2 projection");
  }

  // moments up to degree k - 1; the top two degrees come from the enhancement
  el.moments = MatrixXd::Zero(nk1, N);
  el.moments.topRows(s.n5) = low_moments;
  {
    const MatrixXd GK = E.gram(k - 1, k + 1);
    MatrixXd low;
    if (s.n5 > 0) low = E.gram(k - 3, k - 3).partialPivLu().solve(E.gram(k - 3, k - 1));
    for (int c = s.n5; c < nk1; ++c) {
      VectorXd r = VectorXd::Zero(nk1);
      r[c] = 1.0;
      if (s.n5 > 0) r.head(s.n5) -= low.col(c);
      RowVectorXd row = r.transpose() * GK * el.pi_hessian;
      if (s.n5 > 0) row += low.col(c).transpose() * low_moments;
      el.moments.row(c) = row;
    }
  }
  const MatrixXd H1 = E.gram(k - 1, k - 1);
  el.pi0 = guarded_solve(H1, el.moments, "C1 L2 projection");

  // int d_j phi m_a = -int phi d_j m_a + bnd phi m_a n_j, |a| <= k
  MatrixXd grad_moments(2 * nk, N);
  for (int j = 0; j < 2; ++j) {
    const MatrixXd Dj = derivative_matrix(k, j) / h;
    grad_moments.middleRows(j * nk, nk) = -Dj.transpose() * el.moments;
    for (int a = 0; a < nk; ++a)
      grad_moments.row(j * nk + a) += boundary_row([&](const FrameEdge& edge, const Vec2& xi) {
        return Eigen::Vector3d(monomial_values(k, xi)[a] * edge.normal[j], 0, 0);
      });
  }
  el.grad = guarded_solve(block_diag2(E.gram(k, k)), grad_moments, "C1 gradient projection");
  el.curl.resize(2 * nk, N);
  el.curl << el.grad_block(1), -el.grad_block(0);

  // int lap phi m_a = int phi lap m_a + bnd (dn phi m_a - phi dn m_a)
  {
    const MatrixXd lap = laplacian_matrix(k - 1) / (h * h);
    const MatrixXd ddx = derivative_matrix(k - 1, 0) / h, ddy = derivative_matrix(k - 1, 1) / h;
    MatrixXd lm(nk1, N);
    for (int a = 0; a < nk1; ++a) {
      lm.row(a) = s.n5 > 0 ? RowVectorXd(lap.col(a).head(s.n5).transpose() * low_moments) : RowVectorXd::Zero(N);
      lm.row(a) += boundary_row([&](const FrameEdge& edge, const Vec2& xi) {
        const double m = monomial_values(k - 1, xi)[a];
        const RowVectorXd m2 = monomial_values(k - 2, xi);
        const double dn = edge.normal.x() * m2.dot(ddx.col(a)) + edge.normal.y() * m2.dot(ddy.col(a));
        return Eigen::Vector3d(-dn, m * edge.normal.x(), m * edge.normal.y());
      });
    }
    el.laplacian = guarded_solve(H1, lm, "C1 laplacian projection");
  }

  // int d_i d_j phi m_a = -int d_j phi d_i m_a + bnd d_j phi m_a n_i, |a| <= k - 1
  el.hessian.resize(4 * nk1, N);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const MatrixXd Di = derivative_matrix(k - 1, i) / h;
      MatrixXd hm = -Di.transpose() * grad_moments.middleRows(j * nk, poly_dim(k - 2));
      for (int a = 0; a < nk1; ++a)
        hm.row(a) += boundary_row([&](const FrameEdge& edge, const Vec2& xi) {
          Eigen::Vector3d g = Eigen::Vector3d::Zero();
          g[1 + j] = monomial_values(k - 1, xi)[a] * edge.normal[i];
          return g;
        });
      el.hessian.middleRows((2 * i + j) * nk1, nk1) = H1.partialPivLu().solve(hm);
    }

  // DoFs of the monomials of degree <= k + 1
  el.dof_matrix = MatrixXd::Zero(N, nK);
  for (int b = 0; b < nK; ++b) {
    const VectorXd c = VectorXd::Unit(nK, b);
    const VectorXd cx = dx * c, cy = dy * c;
    const StreamFunction m = [&](const Vec2& x) {
      const Vec2 xi = E.to_local(x);
      return Eigen::Vector3d(monomial_values(k + 1, xi).dot(c), monomial_values(k, xi).dot(cx),
                             monomial_values(k, xi).dot(cy));
    };
    VectorXd d = interpolate_stream(s, StreamMoments::value, m);
    // exact moments from the integral table instead of quadrature
    if (s.n5 > 0) d.segment(s.off5, s.n5) = E.gram(k - 3, k + 1).col(b) / area;
    el.dof_matrix.col(b) = d;
  }

  el.consistency = el.laplacian.transpose() * H1 * el.laplacian;
  VectorXd weight = VectorXd::Constant(N, 1.0 / (h * h));
  for (int i = 0; i < s.n_vertices; ++i) weight.segment(3 * i + 1, 2).setOnes();
  for (int e = 0; e < s.n_vertices; ++e)
    for (int j = 0; j < k - 1; ++j) weight[s.edge_normal_dof(e, j)] = 1.0;
  const MatrixXd residual = MatrixXd::Identity(N, N) - el.dof_matrix * el.pi_hessian;
  el.stiffness = el.consistency + residual.transpose() * weight.asDiagonal() * residual;
  return el;
}

MatrixXd c1_trilinear_matrix(const C1Element& el, const VectorXd& zeta) {
  const CellFrame& E = *el.space.cell;
  const int k = el.space.k;
  const MatrixXd W = E.weighted_gram(k, k, el.laplacian * zeta);
  MatrixXd m = MatrixXd::Zero(el.space.n_dofs, el.space.n_dofs);
  for (int i = 0; i < 2; ++i) m += el.grad_block(i).transpose() * W * el.curl_block(i);
  return m;
}

MatrixXd c1_trilinear_wind_derivative(const C1Element& el, const VectorXd& psi) {
  const CellFrame& E = *el.space.cell;
  const int k = el.space.k;
  MatrixXd m = MatrixXd::Zero(el.space.n_dofs, el.space.n_dofs);
  for (int i = 0; i < 2; ++i) {
    const VectorXd ci = el.curl_block(i) * psi;
    m += el.grad_block(i).transpose() * E.weighted_gram(k, k - 1, ci) * el.laplacian;
  }
  return m;
}

}  // namespace dfvem
