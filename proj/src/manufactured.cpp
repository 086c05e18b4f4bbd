#include "dfvem/manufactured.hpp"

#include "dfvem/errors.hpp"

#include <cmath>

namespace dfvem {

namespace {

double d(const PsiJet& j, int a, int b) { return j[mono_index(a, b)]; }

}  // namespace

Vec2 ManufacturedProblem::u(const Vec2& x) const {
  const PsiJet j = psi(x);
  return {d(j, 0, 1), -d(j, 1, 0)};
}

Eigen::Matrix2d ManufacturedProblem::grad_u(const Vec2& x) const {
  const PsiJet j = psi(x);
  Eigen::Matrix2d g;
  g << d(j, 1, 1), d(j, 0, 2), -d(j, 2, 0), -d(j, 1, 1);
  return g;
}

Eigen::Matrix2d ManufacturedProblem::hess_psi(const Vec2& x) const {
  const PsiJet j = psi(x);
  Eigen::Matrix2d h;
  h << d(j, 2, 0), d(j, 1, 1), d(j, 1, 1), d(j, 0, 2);
  return h;
}

Vec2 ManufacturedProblem::f(const Vec2& x) const {
  const PsiJet j = psi(x);
  // lap u = (lap psi_y, -lap psi_x)
  const Vec2 lap_u(d(j, 2, 1) + d(j, 0, 3), -d(j, 3, 0) - d(j, 1, 2));
  const Eigen::Vector3d pj = p(x);
  Vec2 r = -nu * lap_u - Vec2(pj[1], pj[2]);
  if (convective) r += grad_u(x) * u(x);
  return r;
}

double ManufacturedProblem::curl_f(const Vec2& x) const {
  const PsiJet j = psi(x);
  const double bilap = d(j, 4, 0) + 2 * d(j, 2, 2) + d(j, 0, 4);
  double r = nu * bilap;
  if (convective) {
    const Vec2 grad_lap(d(j, 3, 0) + d(j, 1, 2), d(j, 2, 1) + d(j, 0, 3));
    r -= u(x).dot(grad_lap);
  }
  return r;
}

VectorFunction ManufacturedProblem::velocity_function() const {
  return [self = *this](const Vec2& x) { return self.u(x); };
}

TensorFunction ManufacturedProblem::velocity_gradient() const {
  return [self = *this](const Vec2& x) { return self.grad_u(x); };
}

StreamFunction ManufacturedProblem::stream_function() const {
  return [psi = psi](const Vec2& x) {
    const PsiJet j = psi(x);
    return Eigen::Vector3d(j[0], d(j, 1, 0), d(j, 0, 1));
  };
}

VectorFunction ManufacturedProblem::load() const {
  return [self = *this](const Vec2& x) { return self.f(x); };
}

ScalarFunction ManufacturedProblem::curl_load() const {
  return [self = *this](const Vec2& x) { return self.curl_f(x); };
}

ManufacturedProblem test1(double nu) {
  ManufacturedProblem m;
  m.name = "test1";
  m.nu = nu;
  m.psi = [](const Vec2& x) {
    // g(t) = sin^2(2 pi t) = (1 - cos(4 pi t)) / 2 and its derivatives
    const auto g = [](double t) {
      const double w = 4 * M_PI, s = std::sin(w * t), c = std::cos(w * t);
      return std::array<double, 5>{0.5 * (1 - c), 0.5 * w * s, 0.5 * w * w * c, -0.5 * w * w * w * s,
                                   -0.5 * w * w * w * w * c};
    };
    const auto gx = g(x.x()), gy = g(x.y());
    PsiJet j{};
    for (int n = 0; n <= 4; ++n)
      for (int b = 0; b <= n; ++b) j[mono_index(n - b, b)] = gx[n - b] * gy[b] / (8 * M_PI);
    return j;
  };
  m.p = [](const Vec2& x) {
    const double sx = std::sin(2 * M_PI * x.x()), cx = std::cos(2 * M_PI * x.x());
    const double sy = std::sin(2 * M_PI * x.y()), cy = std::cos(2 * M_PI * x.y());
    const double a = M_PI * M_PI;
    return Eigen::Vector3d(a * sx * cy, 2 * M_PI * a * cx * cy, -2 * M_PI * a * sx * sy);
  };
  return m;
}

ManufacturedProblem test2(double nu) {
  ManufacturedProblem m;
  m.name = "test2";
  m.nu = nu;
  m.on_disk = true;
  m.psi = [](const Vec2& p) {
    const double x = p.x(), y = p.y();
    PsiJet j{};
    j[mono_index(0, 0)] = x * x * y + y * y * y / 3;
    j[mono_index(1, 0)] = 2 * x * y;
    j[mono_index(0, 1)] = x * x + y * y;
    j[mono_index(2, 0)] = 2 * y;
    j[mono_index(1, 1)] = 2 * x;
    j[mono_index(0, 2)] = 2 * y;
    j[mono_index(2, 1)] = 2;
    j[mono_index(0, 3)] = 2;
    return j;
  };
  m.p = [](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return Eigen::Vector3d(x * x * x * y * y * y - 1.0 / 16, 3 * x * x * y * y * y, 3 * x * x * x * y * y);
  };
  return m;
}

ManufacturedProblem stokes_patch(double nu) {
  ManufacturedProblem m;
  m.name = "patch";
  m.nu = nu;
  m.convective = false;
  // psi = x^3 - 2 x^2 y + x y^2 + 0.5 y^3 + x y
  m.psi = [](const Vec2& p) {
    const double x = p.x(), y = p.y();
    PsiJet j{};
    j[mono_index(0, 0)] = x * x * x - 2 * x * x * y + x * y * y + 0.5 * y * y * y + x * y;
    j[mono_index(1, 0)] = 3 * x * x - 4 * x * y + y * y + y;
    j[mono_index(0, 1)] = -2 * x * x + 2 * x * y + 1.5 * y * y + x;
    j[mono_index(2, 0)] = 6 * x - 4 * y;
    j[mono_index(1, 1)] = -4 * x + 2 * y + 1;
    j[mono_index(0, 2)] = 2 * x + 3 * y;
    j[mono_index(3, 0)] = 6;
    j[mono_index(2, 1)] = -4;
    j[mono_index(1, 2)] = 2;
    j[mono_index(0, 3)] = 3;
    return j;
  };
  m.p = [](const Vec2& p) { return Eigen::Vector3d(2 * p.x() - 3 * p.y() + 0.25, 2, -3); };
  return m;
}

ManufacturedProblem zero_problem(double nu) {
  ManufacturedProblem m;
  m.name = "zero";
  m.nu = nu;
  m.psi = [](const Vec2&) { return PsiJet{}; };
  m.p = [](const Vec2&) { return Eigen::Vector3d::Zero().eval(); };
  return m;
}

ManufacturedProblem problem_by_name(const std::string& name, double nu) {
  if (name == "test1") return test1(nu);
  if (name == "test2") return test2(nu);
  if (name == "patch") return stokes_patch(nu);
  if (name == "zero") return zero_problem(nu);
  throw ConfigError("unknown problem '" + name + "' (valid: test1, test2, patch, zero)");
}

}  // namespace dfvem
