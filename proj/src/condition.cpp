#include "dfvem/condition.hpp"

#include "dfvem/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>

namespace dfvem {

namespace {

bool symmetric(const Eigen::SparseMatrix<double>& a) {
  const Eigen::SparseMatrix<double> t = a.transpose();
  return (a - t).norm() <= 1e-12 * a.norm();
}

}  // namespace

ConditionEstimate estimate_condition(const Eigen::SparseMatrix<double>& a, int dense_limit) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("estimate_condition: square nonempty matrix expected");
  ConditionEstimate r;
  const bool sym = symmetric(a);
  if (a.rows() < dense_limit) {
    r.dense = true;
    const Eigen::MatrixXd d(a);
    if (sym) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d, Eigen::EigenvaluesOnly);
      const Eigen::VectorXd ev = eig.eigenvalues().cwiseAbs();
      r.sigma_max = ev.maxCoeff();
      r.sigma_min = ev.minCoeff();
    } else {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(d);
      r.sigma_max = svd.singularValues()[0];
      r.sigma_min = svd.singularValues()[svd.singularValues().size() - 1];
    }
    r.value = r.sigma_min > 0 ? r.sigma_max / r.sigma_min : INFINITY;
    return r;
  }

  const Eigen::Index n = a.rows();
  std::mt19937 gen(1234);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x0(n);
  for (Eigen::Index i = 0; i < n; ++i) x0[i] = nd(gen);
  const Eigen::SparseMatrix<double> at = a.transpose();

  // largest: power iteration on A^T A
  {
    Eigen::VectorXd x = x0.normalized();
    double prev = 0.0;
    r.converged = false;
    for (int it = 0; it < 5000; ++it) {
      Eigen::VectorXd y = at * (a * x);
      const double s = std::sqrt(y.norm());
      x = y / y.norm();
      if (std::abs(s - prev) <= 1e-6 * s) {
        r.converged = true;
        prev = s;
        break;
      }
      prev = s;
    }
    r.sigma_max = prev;
  }
  // smallest: inverse iteration on A^T A through LU factors of A and A^T
  {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu, lut;
    lu.compute(a);
    lut.compute(at);
    if (lu.info() != Eigen::Success || lut.info() != Eigen::Success) throw NumericalError("condition estimate: singular matrix");
    Eigen::VectorXd x = x0.normalized();
    double prev = 0.0;
    bool ok = false;
    for (int it = 0; it < 2000; ++it) {
      const Eigen::VectorXd z = lut.solve(x);
      const Eigen::VectorXd y = lu.solve(z);
      const double s = 1.0 / std::sqrt(y.norm());
      x = y / y.norm();
      if (std::abs(s - prev) <= 1e-6 * s) {
        ok = true;
        prev = s;
        break;
      }
      prev = s;
    }
    r.sigma_min = prev;
    r.converged = r.converged && ok;
  }
  r.value = r.sigma_max / r.sigma_min;
  return r;
}

}  // namespace dfvem
