#include "dfvem/solver.hpp"

#include "dfvem/errors.hpp"
#include "dfvem/parallel.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dfvem {

RhsMode parse_rhs_mode(const std::string& name) {
  if (name == "auto") return RhsMode::automatic;
  if (name == "projected" || name == "projected-f") return RhsMode::projected;
  if (name == "curl" || name == "curl-f") return RhsMode::curl;
  throw ConfigError("unknown rhs mode '" + name + "' (valid: auto, projected-f, curl-f)");
}

std::string rhs_mode_name(RhsMode m) {
  switch (m) {
    case RhsMode::automatic: return "auto";
    case RhsMode::projected: return "projected-f";
    case RhsMode::curl: return "curl-f";
  }
  return "?";
}

double PiecewisePolynomial::value(const Discretization& d, int cell, const Vec2& x) const {
  return poly_eval(coeffs[cell], d.frame(cell).to_local(x));
}

double PiecewisePolynomial::integral(const Discretization& d) const {
  double s = 0.0;
  for (int c = 0; c < static_cast<int>(coeffs.size()); ++c) {
    const int n = degree_from_size(coeffs[c].size());
    const auto& idx = multi_indices(n);
    for (int a = 0; a < coeffs[c].size(); ++a) s += coeffs[c][a] * d.frame(c).integral(idx[a].a, idx[a].b);
  }
  return s;
}

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr int quad_extra = 4;

struct Layout {
  int size = 0;
  int n_free = 0;
  std::vector<int> free_index;  // -1 for fixed DoFs
};

Layout make_layout(const Discretization& d) {
  Layout l;
  std::vector<bool> fixed;
  if (d.has_stream()) {
    fixed = d.stream_on_boundary();
  } else {
    fixed = d.velocity_on_boundary();
    fixed.resize(d.n_velocity() + d.n_pressure() + 1, false);
  }
  l.size = static_cast<int>(fixed.size());
  l.free_index.assign(l.size, -1);
  for (int i = 0; i < l.size; ++i)
    if (!fixed[i]) l.free_index[i] = l.n_free++;
  return l;
}

// Boundary DoFs of the exact solution; all other entries zero.
VectorXd boundary_values(const Discretization& d, const ManufacturedProblem& p, int size) {
  VectorXd x = VectorXd::Zero(size);
  const PolygonalMesh& m = d.mesh();
  const int k = d.k();
  if (d.has_stream()) {
    const StreamFunction psi = p.stream_function();
    const auto value_nodes = interior_lobatto_nodes(k - 1), normal_nodes = interior_lobatto_nodes(k);
    const int off = 3 * m.n_vertices();
    for (int v = 0; v < m.n_vertices(); ++v)
      if (m.boundary_vertex(v)) x.segment<3>(3 * v) = psi(m.vertex(v));
    for (int e = 0; e < m.n_edges(); ++e) {
      if (!m.boundary_edge(e)) continue;
      const Vec2 a = m.vertex(m.edge(e).a), b = m.vertex(m.edge(e).b);
      const Vec2 t = (b - a).normalized(), n(t.y(), -t.x());
      for (int j = 0; j < k - 2; ++j) x[off + (2 * k - 3) * e + j] = psi(a + value_nodes[j] * (b - a))[0];
      for (int j = 0; j < k - 1; ++j) {
        const Eigen::Vector3d g = psi(a + normal_nodes[j] * (b - a));
        x[off + (2 * k - 3) * e + k - 2 + j] = g[1] * n.x() + g[2] * n.y();
      }
    }
  } else {
    const auto nodes = interior_lobatto_nodes(k);
    const int off = 2 * m.n_vertices();
    for (int v = 0; v < m.n_vertices(); ++v)
      if (m.boundary_vertex(v)) x.segment<2>(2 * v) = p.u(m.vertex(v));
    for (int e = 0; e < m.n_edges(); ++e) {
      if (!m.boundary_edge(e)) continue;
      const Vec2 a = m.vertex(m.edge(e).a), b = m.vertex(m.edge(e).b);
      for (int j = 0; j < k - 1; ++j) x.segment<2>(off + 2 * (k - 1) * e + 2 * j) = p.u(a + nodes[j] * (b - a));
    }
  }
  return x;
}

struct LocalBlock {
  std::vector<int> rows;
  MatrixXd jac;
  VectorXd res;
};

std::vector<int> active_velocity(const Discretization& d, int c) {
  std::vector<int> lv;
  const auto& map = d.velocity_map(c);
  for (int i = 0; i < static_cast<int>(map.size()); ++i)
    if (map[i] >= 0) lv.push_back(i);
  return lv;
}

MatrixXd restrict(const MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXd r(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) r(i, j) = m(rows[i], cols[j]);
  return r;
}

class Assembler {
 public:
  Assembler(const Discretization& d, const ManufacturedProblem& p, const SolverSettings& s)
      : d_(d), nu_(p.nu), settings_(s), layout_(make_layout(d)) {
    RhsMode rhs = s.rhs;
    if (rhs == RhsMode::automatic) rhs = d.formulation() == Formulation::stream ? RhsMode::curl : RhsMode::projected;
    if (rhs == RhsMode::curl && !d.has_stream())
      throw ConfigError("rhs mode curl-f needs the curl or stream formulation");
    if (rhs == RhsMode::projected && d.formulation() == Formulation::stream)
      throw ConfigError("the stream formulation uses rhs mode curl-f");
    loads_.resize(d.n_cells());
    const int deg = 2 * d.k() + quad_extra;
    const VectorFunction f = p.load();
    const ScalarFunction g = p.curl_load();
    parallel_for(d.n_cells(), d.threads(), [&](int c) {
      if (d.formulation() == Formulation::stream) {
        loads_[c] = stream_load(d.c1(c).space, d.c1(c).pi0, g, deg);
      } else if (d.formulation() == Formulation::curl) {
        loads_[c] = rhs == RhsMode::curl ? stream_load(d.stream(c).space, d.stream(c).pi0, g, deg)
                                         : VectorXd(d.stream(c).transfer.transpose() * velocity_load(d.velocity(c), f, deg));
      } else {
        loads_[c] = velocity_load(d.velocity(c), f, deg);
      }
    });
  }

  [[nodiscard]] const Layout& layout() const { return layout_; }

  /// Residual and Jacobian (free rows and columns) at x for the given trilinear form.
  /// `magnitude` receives sum over cells of |J_E| |x_E| + |R_E|, the scale of the rounding in the residual.
  void evaluate(const VectorXd& x, Trilinear tri, bool picard, VectorXd& residual, SparseMatrix* jac,
                VectorXd* magnitude = nullptr) const {
    std::vector<LocalBlock> blocks(d_.n_cells());
    parallel_for(d_.n_cells(), d_.threads(), [&](int c) { blocks[c] = local(c, x, tri, picard); });
    residual = VectorXd::Zero(layout_.size);
    std::vector<Triplet> trip;
    for (const auto& b : blocks) {
      for (std::size_t i = 0; i < b.rows.size(); ++i) residual[b.rows[i]] += b.res[i];
      if (magnitude) {
        if (magnitude->size() != layout_.size) *magnitude = VectorXd::Zero(layout_.size);
        VectorXd xl(b.rows.size());
        for (std::size_t i = 0; i < b.rows.size(); ++i) xl[i] = std::abs(x[b.rows[i]]);
        const VectorXd m = b.jac.cwiseAbs() * xl + b.res.cwiseAbs();
        for (std::size_t i = 0; i < b.rows.size(); ++i) (*magnitude)[b.rows[i]] += m[i];
      }
      if (!jac) continue;
      for (std::size_t i = 0; i < b.rows.size(); ++i) {
        const int fi = layout_.free_index[b.rows[i]];
        if (fi < 0) continue;
        for (std::size_t j = 0; j < b.rows.size(); ++j) {
          const int fj = layout_.free_index[b.rows[j]];
          if (fj >= 0 && b.jac(i, j) != 0.0) trip.emplace_back(fi, fj, b.jac(i, j));
        }
      }
    }
    if (!d_.has_stream()) {
      // zero-mean multiplier on the cell constants
      const int lam = d_.n_velocity() + d_.n_pressure();
      for (int c = 0; c < d_.n_cells(); ++c) {
        const int p0 = d_.n_velocity() + d_.pressure_map(c)[0];
        const double area = d_.frame(c).area();
        residual[lam] += area * x[p0];
        residual[p0] += area * x[lam];
        if (jac) {
          trip.emplace_back(layout_.free_index[lam], layout_.free_index[p0], area);
          trip.emplace_back(layout_.free_index[p0], layout_.free_index[lam], area);
        }
      }
    }
    if (jac) {
      jac->resize(layout_.n_free, layout_.n_free);
      jac->setFromTriplets(trip.begin(), trip.end());
    }
  }

  [[nodiscard]] VectorXd free_part(const VectorXd& v) const {
    VectorXd r(layout_.n_free);
    for (int i = 0; i < layout_.size; ++i)
      if (layout_.free_index[i] >= 0) r[layout_.free_index[i]] = v[i];
    return r;
  }

  [[nodiscard]] VectorXd load_vector() const {
    VectorXd f = VectorXd::Zero(layout_.size);
    for (int c = 0; c < d_.n_cells(); ++c) {
      if (d_.has_stream()) {
        const auto& map = d_.stream_map(c);
        for (std::size_t i = 0; i < map.size(); ++i) f[map[i]] += loads_[c][i];
      } else {
        const auto& map = d_.velocity_map(c);
        for (std::size_t i = 0; i < map.size(); ++i)
          if (map[i] >= 0) f[map[i]] += loads_[c][i];
      }
    }
    return f;
  }

 private:
  LocalBlock local(int c, const VectorXd& x, Trilinear tri, bool picard) const {
    LocalBlock b;
    if (d_.formulation() == Formulation::stream) {
      const C1Element& el = d_.c1(c);
      b.rows = d_.stream_map(c);
      VectorXd psi(b.rows.size());
      for (std::size_t i = 0; i < b.rows.size(); ++i) psi[i] = x[b.rows[i]];
      MatrixXd k = nu_ * el.stiffness;
      b.jac = k;
      if (tri != Trilinear::none) {
        const MatrixXd m = c1_trilinear_matrix(el, psi);
        k += m;
        b.jac += m;
        if (!picard) b.jac += c1_trilinear_wind_derivative(el, psi);
      }
      b.res = k * psi - loads_[c];
      return b;
    }
    const VelocityElement& el = d_.velocity(c);
    if (d_.formulation() == Formulation::curl) {
      const MatrixXd& t = d_.stream(c).transfer;
      b.rows = d_.stream_map(c);
      VectorXd psi(b.rows.size());
      for (std::size_t i = 0; i < b.rows.size(); ++i) psi[i] = x[b.rows[i]];
      const VectorXd u = t * psi;
      MatrixXd k = nu_ * el.stiffness;
      MatrixXd j = k;
      if (tri != Trilinear::none) {
        const MatrixXd cm = trilinear_matrix(el, tri, u);
        k += cm;
        j += cm;
        if (!picard) j += trilinear_wind_derivative(el, tri, u);
      }
      b.jac = t.transpose() * j * t;
      b.res = t.transpose() * (k * u) - loads_[c];
      return b;
    }
    // velocity-pressure, full or reduced
    const auto lv = active_velocity(d_, c);
    const auto& vmap = d_.velocity_map(c);
    const auto& pmap = d_.pressure_map(c);
    const int nv = static_cast<int>(lv.size()), np = static_cast<int>(pmap.size());
    VectorXd u = VectorXd::Zero(el.n_dofs);
    for (int i : lv) u[i] = x[vmap[i]];
    VectorXd p(np);
    for (int a = 0; a < np; ++a) p[a] = x[d_.n_velocity() + pmap[a]];
    MatrixXd k = nu_ * el.stiffness;
    MatrixXd j = k;
    if (tri != Trilinear::none) {
      const MatrixXd cm = trilinear_matrix(el, tri, u);
      k += cm;
      j += cm;
      if (!picard) j += trilinear_wind_derivative(el, tri, u);
    }
    std::vector<int> prow(np);
    for (int a = 0; a < np; ++a) prow[a] = a;
    const MatrixXd bl = restrict(el.divergence, prow, lv);
    const VectorXd ku = k * u;
    b.rows.resize(nv + np);
    b.res.resize(nv + np);
    for (int i = 0; i < nv; ++i) {
      b.rows[i] = vmap[lv[i]];
      b.res[i] = ku[lv[i]] - loads_[c][lv[i]];
    }
    b.res.head(nv) += bl.transpose() * p;
    VectorXd ul(nv);
    for (int i = 0; i < nv; ++i) ul[i] = u[lv[i]];
    b.res.tail(np) = bl * ul;
    for (int a = 0; a < np; ++a) b.rows[nv + a] = d_.n_velocity() + pmap[a];
    b.jac = MatrixXd::Zero(nv + np, nv + np);
    b.jac.topLeftCorner(nv, nv) = restrict(j, lv, lv);
    b.jac.topRightCorner(nv, np) = bl.transpose();
    b.jac.bottomLeftCorner(np, nv) = bl;
    return b;
  }

  const Discretization& d_;
  double nu_;
  SolverSettings settings_;
  Layout layout_;
  std::vector<VectorXd> loads_;
};

VectorXd lu_solve(const SparseMatrix& a, const VectorXd& b, const char* what) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw NumericalError(std::string(what) + ": singular linear system");
  return lu.solve(b);
}

}  // namespace

SparseMatrix stokes_operator(const Discretization& d, double nu) {
  ManufacturedProblem zero = zero_problem(nu);
  SolverSettings s;
  s.rhs = RhsMode::automatic;
  const Assembler asmb(d, zero, s);
  VectorXd r;
  SparseMatrix j;
  asmb.evaluate(VectorXd::Zero(asmb.layout().size), Trilinear::none, false, r, &j);
  return j;
}

Solution solve(const Discretization& d, const ManufacturedProblem& problem, const SolverSettings& settings) {
  const Assembler asmb(d, problem, settings);
  const Layout& layout = asmb.layout();
  Solution sol;
  sol.formulation = d.formulation();
  sol.trilinear = settings.trilinear;
  SolveReport& rep = sol.report;
  rep.n_unknowns = d.n_unknowns();
  rep.system_size = layout.n_free;

  VectorXd x = boundary_values(d, problem, layout.size);
  const auto update = [&](const VectorXd& delta) {
    for (int i = 0; i < layout.size; ++i)
      if (layout.free_index[i] >= 0) x[i] += delta[layout.free_index[i]];
  };

  if (layout.n_free > 0) {
    VectorXd r;
    SparseMatrix j;
    asmb.evaluate(x, Trilinear::none, false, r, &j);
    if (settings.condition) rep.condition = estimate_condition(j);
    update(lu_solve(j, -asmb.free_part(r), "Stokes solve"));
  }
  rep.iterations = 1;
  {
    // relative to the load, floored by the rounding level of the assembled terms at the Stokes solution
    VectorXd r, mag;
    asmb.evaluate(x, settings.trilinear, true, r, nullptr, &mag);
    const double rounding = 100.0 * std::numeric_limits<double>::epsilon() * asmb.free_part(mag).norm();
    rep.tolerance = std::max(settings.tol * std::max(1.0, asmb.free_part(asmb.load_vector()).norm()), rounding);
  }
  while (true) {
    VectorXd r;
    SparseMatrix j;
    const bool more = rep.iterations < settings.max_iterations;
    asmb.evaluate(x, settings.trilinear, settings.picard, r, more ? &j : nullptr);
    const double res = layout.n_free > 0 ? asmb.free_part(r).norm() : 0.0;
    rep.residuals.push_back(res);
    if (res <= rep.tolerance) {
      rep.converged = true;
      break;
    }
    if (!std::isfinite(res) || !more) break;
    update(lu_solve(j, -asmb.free_part(r), "Newton step"));
    ++rep.iterations;
  }
  if (!rep.converged)
    rep.message = "no convergence after " + std::to_string(rep.iterations) + " iterations, residual " +
                  std::to_string(rep.residuals.back());

  if (d.has_stream()) {
    sol.stream = x;
    if (d.formulation() == Formulation::curl) sol.velocity = transfer_to_velocity(d, x);
  } else {
    sol.velocity = x.head(d.n_velocity());
    sol.pressure = x.segment(d.n_velocity(), d.n_pressure());
  }
  return sol;
}

VectorXd transfer_to_velocity(const Discretization& d, const VectorXd& stream) {
  VectorXd u = VectorXd::Zero(d.n_velocity());
  for (int c = 0; c < d.n_cells(); ++c) {
    const auto& smap = d.stream_map(c);
    VectorXd psi(smap.size());
    for (std::size_t i = 0; i < smap.size(); ++i) psi[i] = stream[smap[i]];
    const VectorXd ul = d.stream(c).transfer * psi;
    const auto& vmap = d.velocity_map(c);
    for (std::size_t i = 0; i < vmap.size(); ++i)
      if (vmap[i] >= 0) u[vmap[i]] = ul[i];
  }
  return u;
}

SparseMatrix global_divergence(const Discretization& d) {
  std::vector<Triplet> trip;
  for (int c = 0; c < d.n_cells(); ++c) {
    const MatrixXd& b = d.velocity(c).divergence;
    const auto& vmap = d.velocity_map(c);
    const auto& pmap = d.pressure_map(c);
    for (std::size_t a = 0; a < pmap.size(); ++a)
      for (std::size_t i = 0; i < vmap.size(); ++i)
        if (vmap[i] >= 0 && b(a, i) != 0.0) trip.emplace_back(pmap[a], vmap[i], b(a, i));
  }
  SparseMatrix m(d.n_pressure(), d.n_velocity());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix global_transfer(const Discretization& d) {
  std::vector<Triplet> trip;
  std::vector<bool> done(d.n_velocity(), false);
  for (int c = 0; c < d.n_cells(); ++c) {
    const MatrixXd& t = d.stream(c).transfer;
    const auto& vmap = d.velocity_map(c);
    const auto& smap = d.stream_map(c);
    for (std::size_t i = 0; i < vmap.size(); ++i) {
      if (vmap[i] < 0 || done[vmap[i]]) continue;
      done[vmap[i]] = true;
      for (std::size_t j = 0; j < smap.size(); ++j)
        if (t(i, j) != 0.0) trip.emplace_back(vmap[i], smap[j], t(i, j));
    }
  }
  SparseMatrix m(d.n_velocity(), d.n_stream());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

PressureRecovery recover_pressure(const Discretization& d, const ManufacturedProblem& problem, const VectorXd& velocity,
                                  Trilinear trilinear) {
  if (!d.has_velocity() || d.reduced()) throw ConfigError("pressure recovery needs the full velocity space");
  const int deg = 2 * d.k() + quad_extra;
  const VectorFunction f = problem.load();
  // momentum residual r = F - nu A u - C(u) u
  VectorXd r = VectorXd::Zero(d.n_velocity());
  std::vector<VectorXd> local(d.n_cells());
  parallel_for(d.n_cells(), d.threads(), [&](int c) {
    const VelocityElement& el = d.velocity(c);
    const auto& vmap = d.velocity_map(c);
    VectorXd u(el.n_dofs);
    for (int i = 0; i < el.n_dofs; ++i) u[i] = velocity[vmap[i]];
    MatrixXd k = problem.nu * el.stiffness;
    if (trilinear != Trilinear::none) k += trilinear_matrix(el, trilinear, u);
    local[c] = velocity_load(el, f, deg) - k * u;
  });
  for (int c = 0; c < d.n_cells(); ++c) {
    const auto& vmap = d.velocity_map(c);
    for (std::size_t i = 0; i < vmap.size(); ++i) r[vmap[i]] += local[c][i];
  }
  const auto& boundary = d.velocity_on_boundary();
  std::vector<int> free;
  for (int i = 0; i < d.n_velocity(); ++i)
    if (!boundary[i]) free.push_back(i);
  const SparseMatrix b = global_divergence(d);
  SparseMatrix sel(d.n_velocity(), free.size());
  {
    std::vector<Triplet> t;
    for (std::size_t j = 0; j < free.size(); ++j) t.emplace_back(free[j], j, 1.0);
    sel.setFromTriplets(t.begin(), t.end());
  }
  const SparseMatrix bf = b * sel;
  VectorXd rf(free.size());
  for (std::size_t j = 0; j < free.size(); ++j) rf[j] = r[free[j]];

  const int np = d.n_pressure();
  const SparseMatrix bbt = bf * SparseMatrix(bf.transpose());
  std::vector<Triplet> t;
  for (int o = 0; o < bbt.outerSize(); ++o)
    for (SparseMatrix::InnerIterator it(bbt, o); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < d.n_cells(); ++c) {
    const int p0 = d.pressure_map(c)[0];
    t.emplace_back(np, p0, d.frame(c).area());
    t.emplace_back(p0, np, d.frame(c).area());
  }
  SparseMatrix m(np + 1, np + 1);
  m.setFromTriplets(t.begin(), t.end());
  VectorXd rhs = VectorXd::Zero(np + 1);
  rhs.head(np) = bf * rf;
  const VectorXd sol = lu_solve(m, rhs, "pressure recovery");
  PressureRecovery out;
  out.pressure = sol.head(np);
  out.residual = (SparseMatrix(bf.transpose()) * out.pressure - rf).norm();
  out.rhs_norm = rf.norm();
  return out;
}

PiecewisePolynomial pressure_field(const Discretization& d, const VectorXd& pressure) {
  PiecewisePolynomial p;
  p.coeffs.resize(d.n_cells());
  for (int c = 0; c < d.n_cells(); ++c) {
    const auto& pmap = d.pressure_map(c);
    VectorXd q(pmap.size());
    for (std::size_t a = 0; a < pmap.size(); ++a) q[a] = pressure[pmap[a]];
    if (d.reduced()) {
      p.coeffs[c] = q;
    } else {
      p.coeffs[c] = pressure_basis(d.velocity(c)) * q;
    }
  }
  return p;
}

PiecewisePolynomial bernoulli_to_convective(const Discretization& d, const PiecewisePolynomial& bernoulli,
                                            const VectorXd& velocity) {
  PiecewisePolynomial p;
  p.coeffs.resize(d.n_cells());
  const int k = d.k();
  for (int c = 0; c < d.n_cells(); ++c) {
    const VelocityElement& el = d.velocity(c);
    const auto& vmap = d.velocity_map(c);
    VectorXd u = VectorXd::Zero(el.n_dofs);
    for (int i = 0; i < el.n_dofs; ++i)
      if (vmap[i] >= 0) u[i] = velocity[vmap[i]];
    const VectorXd u0 = el.P(0) * u, u1 = el.P(1) * u;
    VectorXd q = 0.5 * (poly_multiply(u0, u0) + poly_multiply(u1, u1));
    q.head(bernoulli.coeffs[c].size()) += bernoulli.coeffs[c];
    p.coeffs[c] = poly_resize(q, 2 * k);
  }
  double area = 0.0;
  for (int c = 0; c < d.n_cells(); ++c) area += d.frame(c).area();
  const double mean = p.integral(d) / area;
  for (auto& q : p.coeffs) q[0] -= mean;
  return p;
}

}  // namespace dfvem
