#include "dfvem/polybasis.hpp"

#include "dfvem/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace dfvem {

const std::vector<MultiIndex>& multi_indices(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<MultiIndex>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<MultiIndex> list;
  list.reserve(poly_dim(n));
  for (int d = 0; d <= n; ++d)
    for (int b = 0; b <= d; ++b) list.push_back({d - b, b});
  return cache.emplace(n, std::move(list)).first->second;
}

int degree_from_size(Eigen::Index size) {
  if (size == 0) return -1;
  int n = 0;
  while (poly_dim(n) < size) ++n;
  if (poly_dim(n) != size) throw std::invalid_argument("coefficient vector size is not a polynomial dimension");
  return n;
}

RowVectorXd monomial_values(int n, const Vec2& xi) {
  RowVectorXd values(poly_dim(n));
  if (n < 0) return values;
  // powers of xi and eta up to n
  std::vector<double> px(n + 1, 1.0), py(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) {
    px[i] = px[i - 1] * xi.x();
    py[i] = py[i - 1] * xi.y();
  }
  int idx = 0;
  for (int d = 0; d <= n; ++d)
    for (int b = 0; b <= d; ++b) values[idx++] = px[d - b] * py[b];
  return values;
}

double poly_eval(const VectorXd& coeffs, const Vec2& xi) {
  const int n = degree_from_size(coeffs.size());
  if (n < 0) return 0.0;
  return monomial_values(n, xi).dot(coeffs);
}

MatrixXd derivative_matrix(int n, int dir) {
  MatrixXd d = MatrixXd::Zero(poly_dim(n - 1), poly_dim(n));
  const auto& idx = multi_indices(n);
  for (int j = 0; j < static_cast<int>(idx.size()); ++j) {
    const auto [a, b] = idx[j];
    if (dir == 0 && a > 0) d(mono_index(a - 1, b), j) = a;
    if (dir == 1 && b > 0) d(mono_index(a, b - 1), j) = b;
  }
  return d;
}

MatrixXd monomial_shift_matrix(int n, int a, int b) {
  MatrixXd s = MatrixXd::Zero(poly_dim(n + a + b), poly_dim(n));
  const auto& idx = multi_indices(n);
  for (int j = 0; j < static_cast<int>(idx.size()); ++j) s(mono_index(idx[j].a + a, idx[j].b + b), j) = 1.0;
  return s;
}

MatrixXd laplacian_matrix(int n) {
  if (n < 2) return MatrixXd::Zero(poly_dim(n - 2), poly_dim(n));
  return derivative_matrix(n - 1, 0) * derivative_matrix(n, 0) + derivative_matrix(n - 1, 1) * derivative_matrix(n, 1);
}

VectorXd poly_derivative(const VectorXd& coeffs, int dir) {
  const int n = degree_from_size(coeffs.size());
  if (n < 1) return VectorXd::Zero(0);
  return derivative_matrix(n, dir) * coeffs;
}

VectorXd poly_multiply(const VectorXd& p, const VectorXd& q) {
  const int np = degree_from_size(p.size());
  const int nq = degree_from_size(q.size());
  if (np < 0 || nq < 0) return VectorXd::Zero(0);
  VectorXd r = VectorXd::Zero(poly_dim(np + nq));
  const auto& ip = multi_indices(np);
  const auto& iq = multi_indices(nq);
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    for (int j = 0; j < q.size(); ++j) r[mono_index(ip[i].a + iq[j].a, ip[i].b + iq[j].b)] += p[i] * q[j];
  }
  return r;
}

VectorXd poly_resize(const VectorXd& coeffs, int n) {
  const Eigen::Index target = poly_dim(n);
  if (coeffs.size() <= target) {
    VectorXd r = VectorXd::Zero(target);
    r.head(coeffs.size()) = coeffs;
    return r;
  }
  if (coeffs.tail(coeffs.size() - target).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("poly_resize: truncation would drop nonzero coefficients");
  return coeffs.head(target);
}

VectorPolyDecomposition::VectorPolyDecomposition(int n, double scale) : n_(n) {
  const int dim = poly_dim(n);
  basis_ = MatrixXd::Zero(2 * dim, n_gradient() + n_perp());
  // gradients of m_b, 1 <= |b| <= n+1, in physical units
  const MatrixXd dx = derivative_matrix(n + 1, 0) / scale;
  const MatrixXd dy = derivative_matrix(n + 1, 1) / scale;
  for (int j = 1; j < poly_dim(n + 1); ++j) {
    basis_.block(0, j - 1, dim, 1) = dx.col(j);
    basis_.block(dim, j - 1, dim, 1) = dy.col(j);
  }
  // xi_perp m_c = (eta m_c, -xi m_c)
  if (n >= 1) {
    const MatrixXd times_eta = monomial_shift_matrix(n - 1, 0, 1);
    const MatrixXd times_xi = monomial_shift_matrix(n - 1, 1, 0);
    for (int c = 0; c < n_perp(); ++c) {
      basis_.block(0, n_gradient() + c, dim, 1) = times_eta.col(c);
      basis_.block(dim, n_gradient() + c, dim, 1) = -times_xi.col(c);
    }
  }
  lu_.compute(basis_);
}

VectorXd VectorPolyDecomposition::split(const VectorXd& w) const { return lu_.solve(w); }

MatrixXd VectorPolyDecomposition::split_columns(const MatrixXd& w) const { return lu_.solve(w); }

MatrixXd curl_perp_matrix(int m, double scale) {
  // curl(eta p, -xi p) = (1/h) (d/dxi(-xi p) - d/deta(eta p))
  const int dim = poly_dim(m);
  if (dim == 0) return MatrixXd::Zero(0, 0);
  const MatrixXd w1 = monomial_shift_matrix(m, 0, 1);
  const MatrixXd w2 = -monomial_shift_matrix(m, 1, 0);
  const MatrixXd c = (derivative_matrix(m + 1, 0) * w2 - derivative_matrix(m + 1, 1) * w1) / scale;
  return c;
}

VectorXd curl_isomorphism_solve(const VectorXd& q, double scale) {
  const int m = degree_from_size(q.size());
  if (m < 0) return VectorXd::Zero(0);
  const MatrixXd c = curl_perp_matrix(m, scale);
  Eigen::JacobiSVD<MatrixXd> svd(c);
  const auto& s = svd.singularValues();
  const double cond = s[0] / s[s.size() - 1];
  if (!(cond < 1e12)) throw NumericalError("curl isomorphism: local system conditioning " + std::to_string(cond));
  return c.partialPivLu().solve(q);
}

}  // namespace dfvem
