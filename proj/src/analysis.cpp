#include "dfvem/analysis.hpp"

#include "dfvem/errors.hpp"
#include "dfvem/parallel.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

namespace dfvem {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

int error_degree(const Discretization& d) { return 2 * d.k() + 4; }

VectorXd local_dofs(const std::vector<int>& map, const VectorXd& global) {
  VectorXd v = VectorXd::Zero(map.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] >= 0) v[i] = global[map[i]];
  return v;
}

// Cell contributions summed in a fixed order.
template <class F>
double cell_sum(const Discretization& d, F f) {
  std::vector<double> part(d.n_cells());
  parallel_for(d.n_cells(), d.threads(), [&](int c) { part[c] = f(c); });
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

double domain_mean(const Discretization& d, const ScalarFunction& g) {
  double integral = 0.0, area = 0.0;
  for (int c = 0; c < d.n_cells(); ++c) {
    const auto rule = d.frame(c).quadrature(error_degree(d));
    for (std::size_t q = 0; q < rule.size(); ++q) integral += rule.weights[q] * g(rule.points[q]);
    area += d.frame(c).area();
  }
  return integral / area;
}

}  // namespace

double error_u_h1(const Discretization& d, const ManufacturedProblem& problem, const VectorXd& velocity) {
  return std::sqrt(cell_sum(d, [&](int c) {
    const VelocityElement& el = d.velocity(c);
    const CellFrame& E = d.frame(c);
    const VectorXd u = local_dofs(d.velocity_map(c), velocity);
    VectorXd g[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g[i][j] = el.G(i, j) * u;
    const auto rule = E.quadrature(error_degree(d));
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const RowVectorXd m = monomial_values(d.k() - 1, E.to_local(rule.points[q]));
      const Eigen::Matrix2d ex = problem.grad_u(rule.points[q]);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += rule.weights[q] * std::pow(ex(i, j) - m.dot(g[i][j]), 2);
    }
    return s;
  }));
}

double error_psi_h2(const Discretization& d, const ManufacturedProblem& problem, const VectorXd& stream) {
  return std::sqrt(cell_sum(d, [&](int c) {
    const C1Element& el = d.c1(c);
    const CellFrame& E = d.frame(c);
    const VectorXd psi = local_dofs(d.stream_map(c), stream);
    VectorXd g[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g[i][j] = el.hessian_block(i, j) * psi;
    const auto rule = E.quadrature(error_degree(d));
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const RowVectorXd m = monomial_values(d.k() - 1, E.to_local(rule.points[q]));
      const Eigen::Matrix2d ex = problem.hess_psi(rule.points[q]);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += rule.weights[q] * std::pow(ex(i, j) - m.dot(g[i][j]), 2);
    }
    return s;
  }));
}

double error_p_l2(const Discretization& d, const ManufacturedProblem& problem, const PiecewisePolynomial& ph) {
  const double mean = domain_mean(d, [&](const Vec2& x) { return problem.pressure(x); });
  return std::sqrt(cell_sum(d, [&](int c) {
    const CellFrame& E = d.frame(c);
    const int deg = degree_from_size(ph.coeffs[c].size());
    const auto rule = E.quadrature(std::max(error_degree(d), 2 * deg));
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double e = problem.pressure(rule.points[q]) - mean - poly_eval(ph.coeffs[c], E.to_local(rule.points[q]));
      s += rule.weights[q] * e * e;
    }
    return s;
  }));
}

double divergence_defect(const Discretization& d, const VectorXd& velocity) {
  double worst = 0.0;
  for (int c = 0; c < d.n_cells(); ++c) {
    const VectorXd u = local_dofs(d.velocity_map(c), velocity);
    worst = std::max(worst, (d.velocity(c).divergence * u).cwiseAbs().maxCoeff());
  }
  const double norm = velocity.norm();
  return norm > 0.0 ? worst / norm : worst;
}

std::optional<PiecewisePolynomial> convective_pressure(const Discretization& d, const ManufacturedProblem& problem,
                                                       const Solution& sol) {
  PiecewisePolynomial p;
  if (d.formulation() == Formulation::stream) return std::nullopt;
  if (d.formulation() == Formulation::curl) {
    p = pressure_field(d, recover_pressure(d, problem, sol.velocity, sol.trilinear).pressure);
  } else {
    p = pressure_field(d, sol.pressure);
  }
  if (sol.trilinear == Trilinear::rot && problem.convective) p = bernoulli_to_convective(d, p, sol.velocity);
  return p;
}

LevelResult run_level(const RunConfig& config, std::shared_ptr<const PolygonalMesh> mesh, double h_nominal,
                      Solution* solution_out, std::unique_ptr<Discretization>* disc_out) {
  const ManufacturedProblem problem = problem_by_name(config.problem, config.nu);
  auto d = std::make_unique<Discretization>(mesh, config.k, config.formulation, config.threads);
  SolverSettings settings = config.solver;
  if (!problem.convective) settings.trilinear = Trilinear::none;
  const Solution sol = solve(*d, problem, settings);

  LevelResult r;
  r.h = h_nominal;
  r.h_mesh = mesh->h();
  r.n_cells = mesh->n_cells();
  r.n_dofs = d->n_unknowns();
  r.newton_iters = sol.report.iterations;
  r.converged = sol.report.converged;
  r.message = sol.report.message;
  r.cond = sol.report.condition ? sol.report.condition->value : nan;
  r.err_u = r.err_psi = r.err_p = nan;
  r.div_defect = nan;
  if (d->has_velocity()) {
    r.err_u = error_u_h1(*d, problem, sol.velocity);
    r.div_defect = divergence_defect(*d, sol.velocity);
    // curl psi_h is the discrete velocity, so both norms coincide
    if (d->formulation() == Formulation::curl) r.err_psi = r.err_u;
  } else {
    r.err_psi = error_psi_h2(*d, problem, sol.stream);
    r.err_u = r.err_psi;
  }
  if (const auto p = convective_pressure(*d, problem, sol)) r.err_p = error_p_l2(*d, problem, *p);
  if (solution_out) *solution_out = sol;
  if (disc_out) *disc_out = std::move(d);
  return r;
}

double observed_rate(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

ConvergenceReport make_report(std::vector<LevelResult> rows) {
  ConvergenceReport rep;
  rep.rows = std::move(rows);
  const std::size_t n = rep.rows.size();
  rep.rate_u.assign(n, nan);
  rep.rate_psi.assign(n, nan);
  rep.rate_p.assign(n, nan);
  for (std::size_t i = 1; i < n; ++i) {
    const LevelResult &a = rep.rows[i - 1], &b = rep.rows[i];
    if (!a.converged || !b.converged) continue;
    rep.rate_u[i] = observed_rate(a.err_u, b.err_u, a.h, b.h);
    rep.rate_psi[i] = observed_rate(a.err_psi, b.err_psi, a.h, b.h);
    rep.rate_p[i] = observed_rate(a.err_p, b.err_p, a.h, b.h);
  }
  return rep;
}

ConvergenceReport run_convergence(const RunConfig& config) {
  if (config.levels.size() < 2) throw ConfigError("need >= 2 levels");
  std::vector<LevelResult> rows;
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    const double h = config.levels[i];
    auto mesh = std::make_shared<const PolygonalMesh>(generate_mesh(config.family, h, config.seed + i));
    rows.push_back(run_level(config, mesh, h));
  }
  return make_report(std::move(rows));
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "h,n_dofs,err_u_h1,err_psi_h2,err_p_l2,cond,newton_iters,rate_u,rate_p\n";
  const auto old = out.flags();
  out << std::setprecision(10);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const LevelResult& r = report.rows[i];
    out << r.h << ',' << r.n_dofs << ',' << r.err_u << ',' << r.err_psi << ',' << r.err_p << ',' << r.cond << ','
        << r.newton_iters << (r.converged ? "" : "*") << ',' << report.rate_u[i] << ',' << report.rate_p[i] << '\n';
  }
  out.flags(old);
}

TrilinearIdentityReport trilinear_identity_checks(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto random_poly = [&](int n) {
    VectorXd c(poly_dim(n));
    for (auto& v : c) v = coef(rng);
    return c;
  };
  const MatrixXd dx = derivative_matrix(k + 1, 0), dy = derivative_matrix(k + 1, 1);
  const VectorXd psi = random_poly(k + 1);
  // divergence-free wind u = curl psi, coefficients in P_k
  const VectorXd u1 = dy * psi, u2 = -dx * psi;
  // wind with divergence for the control case
  const VectorXd w1 = random_poly(k), w2 = random_poly(k);
  const VectorXd q1 = random_poly(k), q2 = random_poly(k);

  const CellFrame E({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, 0);
  const auto rule = E.quadrature(3 * k + 8);
  const MatrixXd ex = derivative_matrix(k, 0), ey = derivative_matrix(k, 1);

  struct Forms {
    double conv = 0, skew = 0, rot = 0, grad_sq = 0, div_term = 0;
  };
  const auto forms = [&](const VectorXd& a1, const VectorXd& a2) {
    Forms f;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = rule.points[q];
      const RowVectorXd m = monomial_values(k, x), m1 = monomial_values(k - 1, x);
      const double bubble = x.x() * (1 - x.x()) * x.y() * (1 - x.y());
      const double bx = (1 - 2 * x.x()) * x.y() * (1 - x.y()), by = x.x() * (1 - x.x()) * (1 - 2 * x.y());
      const Vec2 u(m.dot(a1), m.dot(a2));
      Eigen::Matrix2d gu;
      gu << m1.dot(ex * a1), m1.dot(ey * a1), m1.dot(ex * a2), m1.dot(ey * a2);
      const Vec2 qv(m.dot(q1), m.dot(q2));
      Eigen::Matrix2d gq;
      gq << m1.dot(ex * q1), m1.dot(ey * q1), m1.dot(ex * q2), m1.dot(ey * q2);
      const Vec2 v = bubble * qv;
      const Eigen::Matrix2d gv = bubble * gq + qv * Vec2(bx, by).transpose();
      const double w = rule.weights[q];
      const double omega = gu(1, 0) - gu(0, 1);
      f.conv += w * (gu * u).dot(v);
      f.skew += w * 0.5 * ((gu * u).dot(v) - (gv * u).dot(u));
      f.rot += w * omega * (-u.y() * v.x() + u.x() * v.y());
      f.grad_sq += w * (gu.transpose() * u).dot(v);  // 1/2 grad |u|^2 = (grad u)^T u
      f.div_term += w * 0.5 * gu.trace() * u.dot(v);
    }
    return f;
  };
  TrilinearIdentityReport r;
  const Forms a = forms(u1, u2);
  r.conv_skew = std::abs(a.conv - a.skew);
  r.conv_rot = std::abs(a.conv - a.rot - a.grad_sq);
  const Forms b = forms(w1, w2);
  r.control = std::abs(b.conv - b.skew);
  r.control_expected = std::abs(b.div_term);
  return r;
}

}  // namespace dfvem
