#pragma once

#include <Eigen/Dense>

namespace dfvem {

/// 2-norm condition number of a small dense matrix.
double dense_condition(const Eigen::MatrixXd& m);

/// Solves a small local system; throws NumericalError naming `what` when the
/// conditioning exceeds 1e12.
Eigen::MatrixXd guarded_solve(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs, const char* what);

}  // namespace dfvem
