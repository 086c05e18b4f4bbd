#include "dfvem/velocity_element.hpp"

#include "dfvem/errors.hpp"
#include "dfvem/local_solve.hpp"

namespace dfvem {

Trilinear parse_trilinear(const std::string& name) {
  if (name == "conv") return Trilinear::conv;
  if (name == "skew") return Trilinear::skew;
  if (name == "rot") return Trilinear::rot;
  if (name == "none") return Trilinear::none;
  throw ConfigError("unknown trilinear variant '" + name + "' (valid: conv, skew, rot, none)");
}

std::string trilinear_name(Trilinear t) {
  switch (t) {
    case Trilinear::none: return "none";
    case Trilinear::conv: return "conv";
    case Trilinear::skew: return "skew";
    case Trilinear::rot: return "rot";
  }
  return "?";
}

namespace {

MatrixXd block_diag2(const MatrixXd& a) {
  MatrixXd m = MatrixXd::Zero(2 * a.rows(), 2 * a.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(a.rows(), a.cols()) = a;
  return m;
}

// Trace of one velocity component on an edge: Lagrange data on k + 1 nodes.
struct EdgeTrace {
  std::vector<double> nodes;  // local parameters
  std::vector<int> dofs;      // x-component DoF of each node
  MatrixXd at_rule;           // (rule point, node) Lagrange values
};

std::vector<EdgeTrace> velocity_traces(const VelocityElement& el) {
  const auto& edges = el.cell->edges();
  const auto interior = interior_lobatto_nodes(el.k);
  std::vector<EdgeTrace> traces(edges.size());
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    const FrameEdge& e = edges[i];
    EdgeTrace& tr = traces[i];
    tr.nodes.push_back(0.0);
    tr.dofs.push_back(el.vertex_dof(i, 0));
    for (int j = 0; j < el.k - 1; ++j) {
      tr.nodes.push_back(e.local_param(interior[j]));
      tr.dofs.push_back(el.edge_dof(i, j, 0));
    }
    tr.nodes.push_back(1.0);
    tr.dofs.push_back(el.vertex_dof((i + 1) % el.n_vertices, 0));
    tr.at_rule.resize(e.t.size(), tr.nodes.size());
    for (std::size_t q = 0; q < e.t.size(); ++q) tr.at_rule.row(q) = lagrange_values(tr.nodes, e.t[q]);
  }
  return traces;
}

}  // namespace

std::vector<int> VelocityElement::reduced_columns() const {
  std::vector<int> cols;
  for (int i = 0; i < off4; ++i) cols.push_back(i);
  return cols;
}

std::vector<Vec2> VelocityElement::point_positions() const {
  std::vector<Vec2> pts(cell->polygon());
  const auto interior = interior_lobatto_nodes(k);
  for (const auto& e : cell->edges())
    for (int j = 0; j < k - 1; ++j) pts.push_back(e.point(e.local_param(interior[j])));
  return pts;
}

VelocityElement build_velocity_element(std::shared_ptr<const CellFrame> cell, int k) {
  if (k < 2) throw ConfigError("velocity element needs k >= 2");
  if (cell->table_degree() < table_degree_for(k)) throw std::logic_error("cell integral table too small for k");
  VelocityElement el;
  el.cell = cell;
  el.k = k;
  el.n_vertices = cell->n_vertices();
  el.n3 = poly_dim(k - 3);
  el.n4 = poly_dim(k - 1) - 1;
  el.off3 = 2 * el.n_vertices * k;
  el.off4 = el.off3 + el.n3;
  el.n_dofs = el.off4 + el.n4;

  const CellFrame& E = *cell;
  const int N = el.n_dofs;
  const int nk = poly_dim(k), nk1 = poly_dim(k - 1), nk2 = poly_dim(k - 2);
  const double h = E.h(), area = E.area();
  const auto traces = velocity_traces(el);

  // boundary integral of v_comp * g, g sampled at each edge's rule points
  const auto boundary_row = [&](int comp, const auto& g) {
    RowVectorXd row = RowVectorXd::Zero(N);
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const FrameEdge& e = E.edges()[i];
      const EdgeTrace& tr = traces[i];
      for (std::size_t q = 0; q < e.t.size(); ++q) {
        const double wg = e.w[q] * g(e, q);
        for (std::size_t n = 0; n < tr.nodes.size(); ++n) row[tr.dofs[n] + comp] += wg * tr.at_rule(q, n);
      }
    }
    return row;
  };
  const auto monomial_at = [&](int n, const FrameEdge& e, std::size_t q) { return monomial_values(n, E.to_local(e.x[q])); };

  // flux and divergence
  el.flux = boundary_row(0, [](const FrameEdge& e, std::size_t) { return e.normal.x(); }) +
            boundary_row(1, [](const FrameEdge& e, std::size_t) { return e.normal.y(); });
  const VectorXd mean = E.means(k - 1);
  MatrixXd div_moments = MatrixXd::Zero(nk1, N);
  div_moments.row(0) = el.flux;
  for (int a = 1; a < nk1; ++a) {
    div_moments(a, el.off4 + a - 1) = area / h;
    div_moments.row(a) += mean[a] * el.flux;
  }
  const MatrixXd H1 = E.gram(k - 1, k - 1);
  el.div = guarded_solve(H1, div_moments, "divergence projection");

  // int v . grad m_b = -int div v m_b + boundary int v . n m_b
  const int ngrad = poly_dim(k + 1) - 1;
  const MatrixXd gram_k1 = E.gram(k + 1, k - 1);
  el.grad_moments.resize(ngrad, N);
  for (int b = 1; b <= ngrad; ++b) {
    const auto gb = [&](int comp) {
      return boundary_row(comp, [&](const FrameEdge& e, std::size_t q) {
        return monomial_at(k + 1, e, q)[b] * (comp == 0 ? e.normal.x() : e.normal.y());
      });
    };
    el.grad_moments.row(b - 1) = -gram_k1.row(b) * el.div + gb(0) + gb(1);
  }

  MatrixXd perp3 = MatrixXd::Zero(el.n3, N);
  for (int g = 0; g < el.n3; ++g) perp3(g, el.off3 + g) = area;

  // H1 seminorm projection
  const MatrixXd Ks = E.stiffness(k);
  MatrixXd lhs = block_diag2(Ks);
  MatrixXd rhs = MatrixXd::Zero(2 * nk, N);
  {
    const VectorPolyDecomposition dec(k - 2, h);
    const MatrixXd lap = laplacian_matrix(k) / (h * h);
    const MatrixXd dx = derivative_matrix(k, 0) / h, dy = derivative_matrix(k, 1) / h;
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < nk; ++a) {
        VectorXd w = VectorXd::Zero(2 * nk2);
        w.segment(c * nk2, nk2) = lap.col(a);
        const VectorXd s = dec.split(w);
        RowVectorXd vol = s.head(dec.n_gradient()).transpose() * el.grad_moments.topRows(dec.n_gradient());
        if (dec.n_perp() > 0) vol += s.tail(dec.n_perp()).transpose() * perp3;
        const VectorXd gx = dx.col(a), gy = dy.col(a);
        const RowVectorXd bnd = boundary_row(c, [&](const FrameEdge& e, std::size_t q) {
          const RowVectorXd m = monomial_at(k - 1, e, q);
          return m.dot(gx) * e.normal.x() + m.dot(gy) * e.normal.y();
        });
        rhs.row(c * nk + a) = -vol + bnd;
      }
    // constants fixed by the cell mean: int v_1 = h int v . grad xi
    for (int c = 0; c < 2; ++c) {
      lhs.row(c * nk).setZero();
      for (int b = 0; b < nk; ++b) lhs(c * nk, c * nk + b) = E.integral(multi_indices(k)[b].a, multi_indices(k)[b].b);
      rhs.row(c * nk) = h * el.grad_moments.row(c);
    }
  }
  el.pi_nabla = guarded_solve(lhs, rhs, "H1 projection");

  // x_perp moments up to degree k - 1; the top two degrees come from the enhancement
  el.perp_moments = MatrixXd::Zero(nk1, N);
  el.perp_moments.topRows(el.n3) = perp3;
  {
    const MatrixXd Gkk = E.gram(k, k);
    MatrixXd low;  // L2 projection onto P_{k-3} of m_c, columns c
    if (el.n3 > 0) low = E.gram(k - 3, k - 3).partialPivLu().solve(E.gram(k - 3, k - 1));
    const MatrixXd s_eta = monomial_shift_matrix(k - 1, 0, 1), s_xi = monomial_shift_matrix(k - 1, 1, 0);
    const auto pn0 = el.pi_nabla.topRows(nk), pn1 = el.pi_nabla.bottomRows(nk);
    for (int c = el.n3; c < nk1; ++c) {
      VectorXd r = VectorXd::Zero(nk1);
      r[c] = 1.0;
      if (el.n3 > 0) r.head(el.n3) -= low.col(c);
      const VectorXd w1 = s_eta * r, w2 = -(s_xi * r);
      RowVectorXd row = (w1.transpose() * Gkk) * pn0 + (w2.transpose() * Gkk) * pn1;
      if (el.n3 > 0) row += low.col(c).transpose() * perp3;
      el.perp_moments.row(c) = row;
    }
  }

  // L2 projection from the moments against the splitting of [P_k]^2
  const VectorPolyDecomposition deck(k, h);
  const MatrixXd split = deck.split_columns(MatrixXd::Identity(2 * nk, 2 * nk));
  MatrixXd known(deck.n_gradient() + deck.n_perp(), N);
  known << el.grad_moments, el.perp_moments;
  const MatrixXd moments = split.transpose() * known;  // row (c, a): int v_c m_a
  const MatrixXd Hk = E.gram(k, k);
  el.pi0 = guarded_solve(block_diag2(Hk), moments, "L2 projection");

  // projection of the gradient: int d_j v_i m_a = -int v_i d_j m_a + boundary int v_i m_a n_j
  el.grad.resize(4 * nk1, N);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      MatrixXd gm(nk1, N);
      const MatrixXd Dj = derivative_matrix(k - 1, j);
      gm = -(Dj.transpose() * moments.middleRows(i * nk, nk2)) / h;
      for (int a = 0; a < nk1; ++a)
        gm.row(a) += boundary_row(i, [&](const FrameEdge& e, std::size_t q) {
          return monomial_at(k - 1, e, q)[a] * (j == 0 ? e.normal.x() : e.normal.y());
        });
      el.grad.middleRows((2 * i + j) * nk1, nk1) = H1.partialPivLu().solve(gm);
    }
  el.curl = el.G(1, 0) - el.G(0, 1);

  // DoFs of the monomial fields e_c m_a
  el.dof_matrix = MatrixXd::Zero(N, 2 * nk);
  {
    const auto pts = el.point_positions();
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const RowVectorXd m = monomial_values(k, E.to_local(pts[p]));
      el.dof_matrix.block(2 * p, 0, 1, nk) = m;
      el.dof_matrix.block(2 * p + 1, nk, 1, nk) = m;
    }
    const auto& ik = multi_indices(k);
    const auto& ig = multi_indices(std::max(k - 3, 0));
    for (int g = 0; g < el.n3; ++g)
      for (int a = 0; a < nk; ++a) {
        el.dof_matrix(el.off3 + g, a) = E.integral(ik[a].a + ig[g].a, ik[a].b + ig[g].b + 1) / area;
        el.dof_matrix(el.off3 + g, nk + a) = -E.integral(ik[a].a + ig[g].a + 1, ik[a].b + ig[g].b) / area;
      }
    const MatrixXd G1 = E.gram(k - 1, k - 1);
    const VectorXd int1 = G1.col(0);  // int m_b
    for (int c = 0; c < 2; ++c) {
      const MatrixXd D = derivative_matrix(k, c);  // d/dxi_c, P_k -> P_{k-1}
      for (int a = 1; a < nk1; ++a) {
        const VectorXd zero_mean_moment = G1.col(a) - mean[a] * int1;
        el.dof_matrix.block(el.off4 + a - 1, c * nk, 1, nk) = (zero_mean_moment.transpose() * D) / area;
      }
    }
  }

  el.consistency = el.pi_nabla.transpose() * block_diag2(Ks) * el.pi_nabla;
  const MatrixXd residual = MatrixXd::Identity(N, N) - el.dof_matrix * el.pi_nabla;
  el.stiffness = el.consistency + residual.transpose() * residual;

  el.divergence = MatrixXd::Zero(nk1, N);
  el.divergence.row(0) = el.flux;
  for (int a = 1; a < nk1; ++a) el.divergence(a, el.off4 + a - 1) = area / h;
  return el;
}

VectorXd interpolate_velocity(const VelocityElement& el, const VectorFunction& v, const TensorFunction& grad_v) {
  const CellFrame& E = *el.cell;
  VectorXd d = VectorXd::Zero(el.n_dofs);
  const auto pts = el.point_positions();
  for (std::size_t p = 0; p < pts.size(); ++p) d.segment<2>(2 * p) = v(pts[p]);
  if (el.n3 + el.n4 == 0) return d;
  const QuadratureRule rule = E.quadrature(2 * el.k + 4);
  const VectorXd mean = E.means(el.k - 1);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 xi = E.to_local(rule.points[q]);
    const double w = rule.weights[q] / E.area();
    if (el.n3 > 0) {
      const Vec2 val = v(rule.points[q]);
      const RowVectorXd m = monomial_values(el.k - 3, xi);
      d.segment(el.off3, el.n3) += w * (val.x() * xi.y() - val.y() * xi.x()) * m.transpose();
    }
    const Eigen::Matrix2d g = grad_v(rule.points[q]);
    const RowVectorXd m = monomial_values(el.k - 1, xi);
    for (int a = 1; a <= el.n4; ++a) d[el.off4 + a - 1] += w * E.h() * g.trace() * (m[a] - mean[a]);
  }
  return d;
}

MatrixXd pressure_basis(const VelocityElement& el) {
  const int n = el.nk1();
  MatrixXd b = MatrixXd::Identity(n, n);
  const VectorXd mean = el.cell->means(el.k - 1);
  for (int a = 1; a < n; ++a) b(0, a) = -mean[a];
  return b;
}

MatrixXd trilinear_matrix(const VelocityElement& el, Trilinear variant, const VectorXd& wind) {
  const CellFrame& E = *el.cell;
  const int k = el.k;
  MatrixXd c = MatrixXd::Zero(el.n_dofs, el.n_dofs);
  if (variant == Trilinear::none) return c;
  if (variant == Trilinear::rot) {
    const VectorXd omega = el.curl * wind;
    const MatrixXd W = E.weighted_gram(k, k, omega);
    const MatrixXd p0 = el.P(0), p1 = el.P(1);
    return -p0.transpose() * W * p1 + p1.transpose() * W * p0;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const VectorXd wj = el.P(j) * wind;
      c += el.P(i).transpose() * E.weighted_gram(k, k - 1, wj) * el.G(i, j);
    }
  if (variant == Trilinear::skew) return 0.5 * (c - c.transpose());
  return c;
}

MatrixXd trilinear_wind_derivative(const VelocityElement& el, Trilinear variant, const VectorXd& u) {
  const CellFrame& E = *el.cell;
  const int k = el.k;
  MatrixXd n = MatrixXd::Zero(el.n_dofs, el.n_dofs);
  if (variant == Trilinear::none) return n;
  if (variant == Trilinear::rot) {
    // int omega(w) (-u_2 v_1 + u_1 v_2)
    const VectorXd u0 = el.P(0) * u, u1 = el.P(1) * u;
    return el.P(0).transpose() * E.weighted_gram(k, k - 1, -u1) * el.curl +
           el.P(1).transpose() * E.weighted_gram(k, k - 1, u0) * el.curl;
  }
  MatrixXd conv = MatrixXd::Zero(el.n_dofs, el.n_dofs);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const VectorXd gu = el.G(i, j) * u;
      conv += el.P(i).transpose() * E.weighted_gram(k, k, gu) * el.P(j);
    }
  if (variant == Trilinear::conv) return conv;
  // skew: 1/2 c(w; u, v) - 1/2 c(w; v, u)
  MatrixXd other = MatrixXd::Zero(el.n_dofs, el.n_dofs);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const VectorXd ui = el.P(i) * u;
      other += el.G(i, j).transpose() * E.weighted_gram(k - 1, k, ui) * el.P(j);
    }
  return 0.5 * (conv - other);
}

VectorXd velocity_load(const VelocityElement& el, const VectorFunction& f, int quad_degree) {
  const CellFrame& E = *el.cell;
  const QuadratureRule rule = E.quadrature(quad_degree);
  VectorXd m0 = VectorXd::Zero(el.nk()), m1 = VectorXd::Zero(el.nk());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 fv = f(rule.points[q]);
    const VectorXd m = monomial_values(el.k, E.to_local(rule.points[q])).transpose();
    m0 += rule.weights[q] * fv.x() * m;
    m1 += rule.weights[q] * fv.y() * m;
  }
  return el.P(0).transpose() * m0 + el.P(1).transpose() * m1;
}

}  // namespace dfvem
