#pragma once

#include "dfvem/condition.hpp"
#include "dfvem/discretization.hpp"
#include "dfvem/manufactured.hpp"

#include <Eigen/SparseCore>

namespace dfvem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Load discretization: Pi0_k f tested with velocities, or the curl of f
/// against Pi0_{k-1} of stream functions. `automatic` picks projected for the
/// velocity and curl formulations and curl for the C1 stream formulation.
enum class RhsMode { automatic, projected, curl };
RhsMode parse_rhs_mode(const std::string& name);
std::string rhs_mode_name(RhsMode m);

struct SolverSettings {
  Trilinear trilinear = Trilinear::rot;
  RhsMode rhs = RhsMode::automatic;
  double tol = 1e-10;
  int max_iterations = 50;
  bool picard = false;
  /// Estimate the condition number of the first (Stokes) operator.
  bool condition = false;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  /// Nonlinear residual norms on the free DoFs, one per check.
  std::vector<double> residuals;
  double tolerance = 0.0;
  int n_unknowns = 0;
  int system_size = 0;
  std::optional<ConditionEstimate> condition;
  std::string message;
};

/// Piecewise polynomial on the cells, coefficients on each cell's scaled monomials.
struct PiecewisePolynomial {
  std::vector<VectorXd> coeffs;
  [[nodiscard]] double value(const Discretization& d, int cell, const Vec2& x) const;
  [[nodiscard]] double integral(const Discretization& d) const;
};

struct Solution {
  Formulation formulation = Formulation::curl;
  Trilinear trilinear = Trilinear::rot;
  VectorXd velocity;  // global velocity DoFs (curl: transferred from the stream DoFs)
  VectorXd pressure;  // per-cell coefficients on the local pressure bases
  VectorXd stream;    // global stream DoFs
  SolveReport report;
};

/// Newton iteration started from the Stokes solution (the Stokes solve counts
/// as the first iteration). Boundary DoFs are fixed to the interpolated exact
/// solution. Throws NumericalError on a singular linear system; non-convergence
/// is reported in the SolveReport.
Solution solve(const Discretization& d, const ManufacturedProblem& problem, const SolverSettings& settings);

/// First-iteration operator restricted to the free DoFs (velocity-pressure
/// systems include the zero-mean multiplier row).
SparseMatrix stokes_operator(const Discretization& d, double nu);

/// Global velocity DoFs of curl psi (curl formulation).
VectorXd transfer_to_velocity(const Discretization& d, const VectorXd& stream);

/// Global divergence matrix: rows per-cell pressure basis, columns velocity DoFs.
SparseMatrix global_divergence(const Discretization& d);
/// Global curl transfer: rows velocity DoFs, columns stream DoFs (curl formulation).
SparseMatrix global_transfer(const Discretization& d);

struct PressureRecovery {
  VectorXd pressure;  // full local bases P_{k-1}
  /// Residual of the rectangular system B^T p = r on the free velocities.
  double residual = 0.0;
  double rhs_norm = 0.0;
};

/// Least-squares pressure B B^T p = B r on the zero-mean pressures, r the
/// momentum residual of the given velocity (curl formulation).
PressureRecovery recover_pressure(const Discretization& d, const ManufacturedProblem& problem, const VectorXd& velocity,
                                  Trilinear trilinear);

/// Pressure polynomials from per-cell basis coefficients.
PiecewisePolynomial pressure_field(const Discretization& d, const VectorXd& pressure);

/// p_h = P_h + |Pi0 u_h|^2 / 2 minus its mean; kept at degree 2k.
PiecewisePolynomial bernoulli_to_convective(const Discretization& d, const PiecewisePolynomial& bernoulli,
                                            const VectorXd& velocity);

}  // namespace dfvem
