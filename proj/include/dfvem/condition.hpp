#pragma once

#include <Eigen/SparseCore>

#include <string>

namespace dfvem {

struct ConditionEstimate {
  double value = 0.0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  bool dense = false;
  /// False when an iteration stopped at its cap; value is then a partial estimate.
  bool converged = true;
};

/// 2-norm condition number. Dense eigen/singular values below dense_limit
/// unknowns; above it, power iteration for the largest and LU-based inverse
/// iteration for the smallest singular value (about 10% relative accuracy).
ConditionEstimate estimate_condition(const Eigen::SparseMatrix<double>& a, int dense_limit = 5000);

}  // namespace dfvem
