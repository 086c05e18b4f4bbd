#include "dfvem/local_solve.hpp"

#include "dfvem/errors.hpp"

#include <Eigen/SVD>
#include <string>

namespace dfvem {

double dense_condition(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

Eigen::MatrixXd guarded_solve(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs, const char* what) {
  const double c = dense_condition(lhs);
  if (!(c < 1e12)) throw NumericalError(std::string(what) + ": local system conditioning " + std::to_string(c));
  return lhs.partialPivLu().solve(rhs);
}

}  // namespace dfvem
