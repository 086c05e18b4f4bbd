#include "dfvem/stream_element.hpp"

#include "dfvem/errors.hpp"
#include "dfvem/local_solve.hpp"

namespace dfvem {

namespace {

RowVectorXd powers(int n, double t) {
  RowVectorXd p(n + 1);
  p[0] = 1.0;
  for (int i = 1; i <= n; ++i) p[i] = p[i - 1] * t;
  return p;
}

RowVectorXd power_derivatives(int n, double t) {
  RowVectorXd d = RowVectorXd::Zero(n + 1);
  for (int i = 1; i <= n; ++i) d[i] = i * std::pow(t, i - 1);
  return d;
}

}  // namespace

RowVectorXd StreamSpace::trace_value(int e, double t) const { return powers(k + 1, t) * value_trace[e]; }

MatrixXd StreamSpace::trace_gradient(int e, double t) const {
  const FrameEdge& edge = cell->edges()[e];
  const RowVectorXd dt = power_derivatives(k + 1, t) * value_trace[e] / edge.length;
  const RowVectorXd dn = powers(k, t) * normal_trace[e];
  const Vec2 n = edge.global_normal();
  MatrixXd g(2, n_dofs);
  g.row(0) = edge.tangent.x() * dt + n.x() * dn;
  g.row(1) = edge.tangent.y() * dt + n.y() * dn;
  return g;
}

StreamSpace build_stream_space(std::shared_ptr<const CellFrame> cell, int k) {
  if (k < 2) throw ConfigError("stream element needs k >= 2");
  StreamSpace s;
  s.cell = cell;
  s.k = k;
  s.n_vertices = cell->n_vertices();
  s.n5 = poly_dim(k - 3);
  s.off5 = (3 + 2 * k - 3) * s.n_vertices;
  s.n_dofs = s.off5 + s.n5;

  const auto value_nodes = interior_lobatto_nodes(k - 1);
  const auto normal_nodes = interior_lobatto_nodes(k);
  const int n = s.n_vertices;
  for (int e = 0; e < n; ++e) {
    const FrameEdge& edge = cell->edges()[e];
    const int va = e, vb = (e + 1) % n;
    const Vec2 t = edge.tangent, nu = edge.global_normal();

    // value trace: endpoint values and tangential derivatives, then interior values
    MatrixXd V(k + 2, k + 2), C = MatrixXd::Zero(k + 2, s.n_dofs);
    V.row(0) = powers(k + 1, 0.0);
    V.row(1) = powers(k + 1, 1.0);
    V.row(2) = power_derivatives(k + 1, 0.0);
    V.row(3) = power_derivatives(k + 1, 1.0);
    C(0, s.vertex_dof(va, 0)) = 1.0;
    C(1, s.vertex_dof(vb, 0)) = 1.0;
    for (int c = 0; c < 2; ++c) {
      C(2, s.vertex_dof(va, 1 + c)) = edge.length * t[c];
      C(3, s.vertex_dof(vb, 1 + c)) = edge.length * t[c];
    }
    for (int j = 0; j < k - 2; ++j) {
      V.row(4 + j) = powers(k + 1, edge.local_param(value_nodes[j]));
      C(4 + j, s.edge_value_dof(e, j)) = 1.0;
    }
    s.value_trace.push_back(guarded_solve(V, C, "stream value trace"));

    // normal derivative trace: endpoint gradients projected on the normal, then interior data
    MatrixXd W(k + 1, k + 1), D = MatrixXd::Zero(k + 1, s.n_dofs);
    W.row(0) = powers(k, 0.0);
    W.row(1) = powers(k, 1.0);
    for (int c = 0; c < 2; ++c) {
      D(0, s.vertex_dof(va, 1 + c)) = nu[c];
      D(1, s.vertex_dof(vb, 1 + c)) = nu[c];
    }
    for (int j = 0; j < k - 1; ++j) {
      W.row(2 + j) = powers(k, edge.local_param(normal_nodes[j]));
      D(2 + j, s.edge_normal_dof(e, j)) = 1.0;
    }
    s.normal_trace.push_back(guarded_solve(W, D, "stream normal trace"));
  }
  return s;
}

VectorXd interpolate_stream(const StreamSpace& s, StreamMoments moments, const StreamFunction& phi) {
  const CellFrame& E = *s.cell;
  VectorXd d = VectorXd::Zero(s.n_dofs);
  for (int i = 0; i < s.n_vertices; ++i) d.segment<3>(3 * i) = phi(E.polygon()[i]);
  const auto value_nodes = interior_lobatto_nodes(s.k - 1);
  const auto normal_nodes = interior_lobatto_nodes(s.k);
  for (int e = 0; e < s.n_vertices; ++e) {
    const FrameEdge& edge = E.edges()[e];
    for (int j = 0; j < s.k - 2; ++j) d[s.edge_value_dof(e, j)] = phi(edge.point(edge.local_param(value_nodes[j])))[0];
    const Vec2 nu = edge.global_normal();
    for (int j = 0; j < s.k - 1; ++j) {
      const Eigen::Vector3d v = phi(edge.point(edge.local_param(normal_nodes[j])));
      d[s.edge_normal_dof(e, j)] = v[1] * nu.x() + v[2] * nu.y();
    }
  }
  if (s.n5 == 0) return d;
  const QuadratureRule rule = E.quadrature(2 * s.k + 4);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 xi = E.to_local(rule.points[q]);
    const Eigen::Vector3d v = phi(rule.points[q]);
    // curl phi . xi_perp = phi_y eta + phi_x xi
    const double g = moments == StreamMoments::value ? v[0] : v[2] * xi.y() + v[1] * xi.x();
    d.segment(s.off5, s.n5) += rule.weights[q] / E.area() * g * monomial_values(s.k - 3, xi).transpose();
  }
  return d;
}

StreamElement build_stream_element(const VelocityElement& velocity) {
  const int k = velocity.k;
  StreamElement el;
  el.space = build_stream_space(velocity.cell, k);
  const StreamSpace& s = el.space;
  const CellFrame& E = *velocity.cell;
  const int N = s.n_dofs;

  // curl phi = (phi_y, -phi_x) at the velocity point DoFs
  el.transfer = MatrixXd::Zero(velocity.n_dofs, N);
  for (int i = 0; i < s.n_vertices; ++i) {
    el.transfer(velocity.vertex_dof(i, 0), s.vertex_dof(i, 2)) = 1.0;
    el.transfer(velocity.vertex_dof(i, 1), s.vertex_dof(i, 1)) = -1.0;
  }
  const auto nodes = interior_lobatto_nodes(k);
  for (int e = 0; e < s.n_vertices; ++e) {
    const FrameEdge& edge = E.edges()[e];
    for (int j = 0; j < k - 1; ++j) {
      const MatrixXd g = s.trace_gradient(e, edge.local_param(nodes[j]));
      el.transfer.row(velocity.edge_dof(e, j, 0)) = g.row(1);
      el.transfer.row(velocity.edge_dof(e, j, 1)) = -g.row(0);
    }
  }
  for (int g = 0; g < s.n5; ++g) el.transfer(velocity.off3 + g, s.off5 + g) = 1.0;

  // int phi curl w = int curl phi . w + boundary int phi w . t, with w = xi_perp p and curl w = m_a
  const int nk1 = poly_dim(k - 1);
  const MatrixXd perp = velocity.perp_moments * el.transfer;
  el.phi_moments.resize(nk1, N);
  for (int a = 0; a < nk1; ++a) {
    VectorXd q = VectorXd::Zero(nk1);
    q[a] = 1.0;
    const VectorXd p = curl_isomorphism_solve(q, E.h());
    RowVectorXd row = p.transpose() * perp;
    for (int e = 0; e < s.n_vertices; ++e) {
      const FrameEdge& edge = E.edges()[e];
      for (std::size_t r = 0; r < edge.t.size(); ++r) {
        const Vec2 xi = E.to_local(edge.x[r]);
        const double pv = monomial_values(k - 1, xi).dot(p);
        const double wt = pv * (xi.y() * edge.tangent.x() - xi.x() * edge.tangent.y());
        row += edge.w[r] * wt * s.trace_value(e, edge.t[r]);
      }
    }
    el.phi_moments.row(a) = row;
  }
  el.pi0 = guarded_solve(E.gram(k - 1, k - 1), el.phi_moments, "stream L2 projection");
  return el;
}

VectorXd stream_load(const StreamSpace& s, const MatrixXd& pi0, const ScalarFunction& g, int quad_degree) {
  const CellFrame& E = *s.cell;
  const QuadratureRule rule = E.quadrature(quad_degree);
  const int n = degree_from_size(pi0.rows());
  VectorXd m = VectorXd::Zero(pi0.rows());
  for (std::size_t q = 0; q < rule.size(); ++q)
    m += rule.weights[q] * g(rule.points[q]) * monomial_values(n, E.to_local(rule.points[q])).transpose();
  return pi0.transpose() * m;
}

}  // namespace dfvem
