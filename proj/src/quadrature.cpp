#include "dfvem/quadrature.hpp"

#include "dfvem/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace dfvem {

namespace {

// Golub-Welsch on a symmetric tridiagonal Jacobi matrix with zero diagonal.
Eigen::SelfAdjointEigenSolver<MatrixXd> jacobi_eigen(const VectorXd& offdiag) {
  const Eigen::Index n = offdiag.size() + 1;
  MatrixXd j = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) j(i, i + 1) = j(i + 1, i) = offdiag[i];
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(j);
}

LineRule compute_gauss_legendre(int n) {
  LineRule rule;
  if (n == 1) {
    rule.points = {0.5};
    rule.weights = {1.0};
    return rule;
  }
  VectorXd beta(n - 1);
  for (int i = 1; i < n; ++i) beta[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
  const auto es = jacobi_eigen(beta);
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (es.eigenvalues()[i] + 1.0));
    const double v0 = es.eigenvectors()(0, i);
    rule.weights.push_back(v0 * v0);  // 2 v0^2 on [-1,1], halved on [0,1]
  }
  return rule;
}

}  // namespace

LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, LineRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

std::vector<double> gauss_lobatto_nodes(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_nodes: n must be at least 2");
  std::vector<double> nodes{0.0};
  // interior nodes are the zeros of P'_{n-1}, i.e. of the Jacobi polynomial P^{(1,1)}_{n-2}
  const int m = n - 2;
  if (m == 1) nodes.push_back(0.5);
  if (m > 1) {
    VectorXd beta(m - 1);
    for (int j = 1; j < m; ++j) beta[j - 1] = std::sqrt(j * (j + 2.0) / ((2.0 * j + 1.0) * (2.0 * j + 3.0)));
    const auto es = jacobi_eigen(beta);
    for (int i = 0; i < m; ++i) nodes.push_back(0.5 * (es.eigenvalues()[i] + 1.0));
  }
  nodes.push_back(1.0);
  return nodes;
}

std::vector<double> interior_lobatto_nodes(int k) {
  if (k < 2) return {};
  auto nodes = gauss_lobatto_nodes(k + 1);
  return {nodes.begin() + 1, nodes.end() - 1};
}

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

QuadratureRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
  // Duffy collapse of the unit square; the Jacobian adds one degree in u.
  const int n = std::max(1, (degree + 3) / 2);
  const LineRule line = gauss_legendre(n);
  const double twice_area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double u = line.points[i];
    for (int j = 0; j < n; ++j) {
      const double v = line.points[j];
      rule.points.push_back(a + u * (b - a) + u * v * (c - b));
      rule.weights.push_back(twice_area * u * line.weights[i] * line.weights[j]);
    }
  }
  return rule;
}

QuadratureRule segment_rule(const Vec2& a, const Vec2& b, int degree) {
  const LineRule line = gauss_legendre(std::max(1, (degree + 2) / 2));
  const double length = (b - a).norm();
  QuadratureRule rule;
  rule.degree = degree;
  for (std::size_t i = 0; i < line.points.size(); ++i) {
    rule.points.push_back(a + line.points[i] * (b - a));
    rule.weights.push_back(length * line.weights[i]);
  }
  return rule;
}

double shoelace_area(const std::vector<Vec2>& polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % n];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

Vec2 polygon_centroid(const std::vector<Vec2>& polygon) {
  // shifted by the first vertex to limit cancellation
  const Vec2 o = polygon.front();
  double twice = 0.0;
  Vec2 acc = Vec2::Zero();
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = polygon[i] - o;
    const Vec2 q = polygon[(i + 1) % n] - o;
    const double cross = p.x() * q.y() - q.x() * p.y();
    twice += cross;
    acc += cross * (p + q);
  }
  return o + acc / (3.0 * twice);
}

namespace {

double cross(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

bool inside_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0;
}

}  // namespace

std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& polygon) {
  std::vector<int> idx(polygon.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> triangles;
  while (idx.size() > 3) {
    const std::size_t n = idx.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n && !clipped; ++i) {
      const int ip = idx[(i + n - 1) % n], ic = idx[i], in = idx[(i + 1) % n];
      const Vec2 &a = polygon[ip], &b = polygon[ic], &c = polygon[in];
      if (cross(a, b, c) <= 0.0) continue;
      bool blocked = false;
      for (std::size_t j = 0; j < n && !blocked; ++j) {
        const int t = idx[j];
        if (t == ip || t == ic || t == in) continue;
        blocked = inside_triangle(polygon[t], a, b, c);
      }
      if (blocked) continue;
      triangles.push_back({ip, ic, in});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
    }
    if (!clipped) throw MeshError("ear clipping failed: polygon is not simple");
  }
  triangles.push_back({idx[0], idx[1], idx[2]});
  return triangles;
}

QuadratureRule polygon_quadrature(const std::vector<Vec2>& polygon, int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  const Vec2 c = polygon_centroid(polygon);
  const std::size_t n = polygon.size();
  bool fan_ok = true;
  for (std::size_t i = 0; i < n && fan_ok; ++i) fan_ok = cross(c, polygon[i], polygon[(i + 1) % n]) > 0.0;
  if (fan_ok) {
    for (std::size_t i = 0; i < n; ++i) rule.append(triangle_rule(c, polygon[i], polygon[(i + 1) % n], degree));
    return rule;
  }
  for (const auto& t : ear_clip(polygon)) rule.append(triangle_rule(polygon[t[0]], polygon[t[1]], polygon[t[2]], degree));
  return rule;
}

}  // namespace dfvem
