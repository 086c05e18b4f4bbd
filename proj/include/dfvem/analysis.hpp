#pragma once

#include "dfvem/mesh_generators.hpp"
#include "dfvem/solver.hpp"

#include <cstdint>
#include <iosfwd>

namespace dfvem {

/// sqrt(sum_E ||grad u - Pi0_{k-1} grad u_h||^2) from global velocity DoFs.
double error_u_h1(const Discretization& d, const ManufacturedProblem& problem, const VectorXd& velocity);
/// Same quantity for the C1 stream formulation: ||hess psi - Pi0_{k-1} hess psi_h||.
double error_psi_h2(const Discretization& d, const ManufacturedProblem& problem, const VectorXd& stream);
/// ||(p - mean p) - p_h||_0 over the mesh.
double error_p_l2(const Discretization& d, const ManufacturedProblem& problem, const PiecewisePolynomial& ph);

/// max over the full local pressure bases of |b(u_h, q)| divided by the DoF norm of u_h.
double divergence_defect(const Discretization& d, const VectorXd& velocity);

/// Convective pressure of a solution: the velocity-pressure pressure or the
/// recovered one for the curl formulation, converted from the Bernoulli
/// pressure when the rot form was used. Empty for the stream formulation.
std::optional<PiecewisePolynomial> convective_pressure(const Discretization& d, const ManufacturedProblem& problem,
                                                       const Solution& sol);

struct RunConfig {
  std::string problem = "test1";
  double nu = 1.0;
  int k = 2;
  Formulation formulation = Formulation::curl;
  MeshFamily family = MeshFamily::cvt;
  std::vector<double> levels{1.0 / 8, 1.0 / 16, 1.0 / 32};
  std::uint64_t seed = 1;
  int threads = 1;
  SolverSettings solver;
};

struct LevelResult {
  double h = 0.0;       // nominal
  double h_mesh = 0.0;  // max cell diameter
  int n_cells = 0;
  int n_dofs = 0;
  double err_u = 0.0;
  double err_psi = 0.0;
  double err_p = 0.0;
  double cond = 0.0;
  int newton_iters = 0;
  bool converged = false;
  double div_defect = 0.0;
  std::string message;
};

/// Solves one level on the given mesh and evaluates every applicable error
/// (NaN where a quantity does not exist for the formulation).
LevelResult run_level(const RunConfig& config, std::shared_ptr<const PolygonalMesh> mesh, double h_nominal,
                      Solution* solution_out = nullptr, std::unique_ptr<Discretization>* disc_out = nullptr);

struct ConvergenceReport {
  std::vector<LevelResult> rows;
  /// rate between row i - 1 and i (NaN for the first row and around non-converged rows).
  std::vector<double> rate_u, rate_psi, rate_p;
};

double observed_rate(double e0, double e1, double h0, double h1);
ConvergenceReport make_report(std::vector<LevelResult> rows);
/// Generates one mesh per level (seed + level index) and runs them all.
ConvergenceReport run_convergence(const RunConfig& config);

/// CSV with header h,n_dofs,err_u_h1,err_psi_h2,err_p_l2,cond,newton_iters,rate_u,rate_p.
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

/// Continuous trilinear identities evaluated by quadrature on polynomial samples.
struct TrilinearIdentityReport {
  double conv_skew = 0.0;      // |c_conv - c_skew| for a divergence-free wind, v vanishing on the boundary
  double conv_rot = 0.0;       // |c_conv - c_rot - 1/2 int grad|u|^2 . v|
  double control = 0.0;        // |c_conv - c_skew| for a wind with nonzero divergence
  double control_expected = 0.0;  // |1/2 int div u (u . v)| for the same wind
};
TrilinearIdentityReport trilinear_identity_checks(int k, std::uint64_t seed = 7);

}  // namespace dfvem
