#include "commands.hpp"

#include "dfvem/analysis.hpp"
#include "dfvem/complex_check.hpp"
#include "dfvem/errors.hpp"
#include "dfvem/mesh_io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace dfvem::cli {

namespace {

struct Options {
  std::string problem = "test1";
  int k = 2;
  double nu = 1.0;
  std::string formulation = "curl";
  std::string trilinear = "rot";
  std::string rhs = "auto";
  std::string family = "cvt";
  double h = 0.125;
  std::vector<double> levels{0.125, 0.0625, 0.03125};
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int max_iters = 50;
  bool picard = false;
  bool condition = false;
  int threads = 1;
  std::string out_dir = ".";
  bool no_timestamp = false;
  std::string mesh_file;
  // mesh subcommands
  std::string mesh_out;
  std::string check_file;
  double rho_min = 0.01;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

RunConfig make_config(const Options& o) {
  RunConfig c;
  c.problem = o.problem;
  c.nu = o.nu;
  c.k = o.k;
  if (o.k < 2) throw ConfigError("k must be >= 2");
  if (!(o.nu > 0.0)) throw ConfigError("nu must be positive");
  c.formulation = parse_formulation(o.formulation);
  c.family = parse_mesh_family(o.family);
  c.levels = o.levels;
  c.seed = o.seed;
  c.threads = std::max(1, o.threads);
  c.solver.trilinear = parse_trilinear(o.trilinear);
  if (c.solver.trilinear == Trilinear::none) throw ConfigError("trilinear must be conv, skew or rot");
  c.solver.rhs = parse_rhs_mode(o.rhs);
  if (c.solver.rhs == RhsMode::curl && c.formulation != Formulation::curl && c.formulation != Formulation::stream)
    throw ConfigError("rhs mode curl-f is only valid for the curl and stream formulations");
  if (c.solver.rhs == RhsMode::projected && c.formulation == Formulation::stream)
    throw ConfigError("the stream formulation needs rhs mode curl-f");
  c.solver.tol = o.tol;
  c.solver.max_iterations = o.max_iters;
  c.solver.picard = o.picard;
  c.solver.condition = o.condition;
  const ManufacturedProblem p = problem_by_name(o.problem, o.nu);
  if (o.mesh_file.empty() && p.on_disk != family_on_disk(c.family))
    throw ConfigError("problem '" + o.problem + "' lives on the " + (p.on_disk ? "disk" : "unit square") +
                      " but mesh family '" + o.family + "' does not");
  return c;
}

std::shared_ptr<const PolygonalMesh> make_mesh(const Options& o) {
  if (!o.mesh_file.empty()) return std::make_shared<const PolygonalMesh>(read_mesh(o.mesh_file));
  return std::make_shared<const PolygonalMesh>(generate_mesh(parse_mesh_family(o.family), o.h, o.seed));
}

std::filesystem::path out_path(const Options& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return std::filesystem::path(o.out_dir) / name;
}

void print_level(std::ostream& out, const LevelResult& r) {
  out << "h = " << r.h << " (max diameter " << r.h_mesh << "), cells = " << r.n_cells << ", unknowns = " << r.n_dofs
      << '\n'
      << "newton iterations = " << r.newton_iters << (r.converged ? " (converged)" : " (NOT converged)") << '\n'
      << "error(u,H1) = " << r.err_u << ", error(psi,H2) = " << r.err_psi << ", error(p,L2) = " << r.err_p << '\n';
  if (!std::isnan(r.cond)) out << "condition = " << r.cond << '\n';
  if (!std::isnan(r.div_defect)) out << "divergence defect = " << r.div_defect << '\n';
  if (!r.message.empty()) out << r.message << '\n';
}

int cmd_mesh_gen(const Options& o, std::ostream& out) {
  const PolygonalMesh m = generate_mesh(parse_mesh_family(o.family), o.h, o.seed);
  write_mesh(m, o.mesh_out);
  out << "wrote " << o.mesh_out << ": " << m.n_vertices() << " vertices, " << m.n_cells() << " cells, h = " << m.h()
      << '\n';
  return exit_ok;
}

int cmd_mesh_check(const Options& o, std::ostream& out) {
  const PolygonalMesh m = read_mesh(o.check_file);
  const ShapeReport r = check_mesh(m, o.rho_min);
  out << m.n_vertices() << " vertices, " << m.n_cells() << " cells, h = " << m.h() << '\n'
      << "rho = " << r.rho << " (rho_min " << r.rho_min << "): " << (r.passed() ? "PASS" : "FAIL") << '\n';
  for (int c : r.failing)
    out << "  cell " << c << ": star ratio " << r.cells[c].star_ratio << ", vertex ratio " << r.cells[c].vertex_ratio
        << '\n';
  return r.passed() ? exit_ok : exit_failure;
}

int cmd_run(const Options& o, std::ostream& out) {
  const RunConfig cfg = make_config(o);
  const auto mesh = make_mesh(o);
  Solution sol;
  std::unique_ptr<Discretization> d;
  const LevelResult r = run_level(cfg, mesh, o.mesh_file.empty() ? o.h : mesh->h(), &sol, &d);
  print_level(out, r);

  std::ofstream f(out_path(o, "solution.txt"));
  f << "# formulation=" << formulation_name(cfg.formulation) << " k=" << cfg.k
    << " mesh=" << (o.mesh_file.empty() ? o.family + ":h=" + std::to_string(o.h) + ":seed=" + std::to_string(o.seed)
                                        : o.mesh_file)
    << " trilinear=" << trilinear_name(sol.trilinear) << '\n';
  f << std::setprecision(17);
  if (d->has_stream()) {
    f << "# stream " << sol.stream.size() << '\n';
    for (double v : sol.stream) f << v << '\n';
  } else {
    f << "# velocity " << sol.velocity.size() << '\n';
    for (double v : sol.velocity) f << v << '\n';
    f << "# pressure " << sol.pressure.size() << '\n';
    for (double v : sol.pressure) f << v << '\n';
  }
  std::ofstream rep(out_path(o, "report.txt"));
  if (!o.no_timestamp) rep << "# " << timestamp() << '\n';
  print_level(rep, r);
  rep << "residuals =";
  for (double v : sol.report.residuals) rep << ' ' << v;
  rep << '\n';
  return r.converged ? exit_ok : exit_failure;
}

int cmd_convergence(const Options& o, std::ostream& out) {
  if (o.levels.size() < 2) throw ConfigError("need >= 2 levels");
  const RunConfig cfg = make_config(o);
  const ConvergenceReport rep = run_convergence(cfg);
  std::ofstream csv(out_path(o, "convergence.csv"));
  if (!o.no_timestamp) csv << "# " << timestamp() << '\n';
  write_convergence_csv(csv, rep);
  write_convergence_csv(out, rep);
  const auto series = [&](const std::string& name, double LevelResult::*field) {
    std::ofstream f(out_path(o, "plot_" + name + ".dat"));
    f << "# log10(h) log10(" << name << ")\n" << std::setprecision(10);
    for (const auto& r : rep.rows)
      if (r.converged && r.*field > 0.0) f << std::log10(r.h) << ' ' << std::log10(r.*field) << '\n';
  };
  series("err_u_h1", &LevelResult::err_u);
  series("err_psi_h2", &LevelResult::err_psi);
  series("err_p_l2", &LevelResult::err_p);
  bool ok = true;
  for (const auto& r : rep.rows)
    if (!r.converged) {
      out << "level h = " << r.h << " did not converge: " << r.message << '\n';
      ok = false;
    }
  return ok ? exit_ok : exit_failure;
}

int cmd_verify_complex(const Options& o, std::ostream& out) {
  if (o.k < 2) throw ConfigError("k must be >= 2");
  const auto mesh = make_mesh(o);
  const ComplexReport rep = verify_complex(mesh, o.k, std::max(1, o.threads));
  for (const auto& c : rep.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  return rep.passed() ? exit_ok : exit_failure;
}

int cmd_compare(const Options& o, std::ostream& out) {
  RunConfig cfg = make_config(o);
  const auto mesh = make_mesh(o);
  const ManufacturedProblem p = problem_by_name(cfg.problem, cfg.nu);
  SolverSettings s = cfg.solver;
  s.condition = true;
  if (!p.convective) s.trilinear = Trilinear::none;
  const Discretization vp(mesh, cfg.k, Formulation::velocity_pressure, cfg.threads);
  const Discretization red(mesh, cfg.k, Formulation::reduced, cfg.threads);
  const Discretization cu(mesh, cfg.k, Formulation::curl, cfg.threads);
  const Solution a = solve(vp, p, s), b = solve(red, p, s), c = solve(cu, p, s);
  const long np = mesh->n_cells();
  const long diff = red.n_unknowns() - cu.n_unknowns();
  const double discrepancy = (c.velocity - a.velocity).norm() / std::max(1e-300, a.velocity.norm());
  const auto cond = [](const Solution& x) { return x.report.condition ? x.report.condition->value : NAN; };
  out << std::setprecision(6) << "cells = " << np << '\n'
      << "velocity-pressure unknowns = " << vp.n_unknowns() << ", condition = " << cond(a) << '\n'
      << "reduced unknowns = " << red.n_unknowns() << ", condition = " << cond(b) << '\n'
      << "curl unknowns = " << cu.n_unknowns() << ", condition = " << cond(c) << '\n'
      << "reduced - curl = " << diff << " (2 (n_P - 1) = " << 2 * (np - 1) << ")\n"
      << "velocity DoF discrepancy (relative) = " << discrepancy << '\n'
      << "error(u,H1): velocity-pressure " << error_u_h1(vp, p, a.velocity) << ", curl " << error_u_h1(cu, p, c.velocity)
      << '\n';
  const bool ok = a.report.converged && b.report.converged && c.report.converged && diff == 2 * (np - 1) &&
                  discrepancy <= 1e-8;
  return ok ? exit_ok : exit_failure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Divergence-free virtual elements for the 2D steady Navier-Stokes equations", "dfvem"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--problem", o.problem, "test1, test2, patch or zero")->capture_default_str();
  app.add_option("--k", o.k, "polynomial order (>= 2)")->capture_default_str();
  app.add_option("--nu", o.nu, "viscosity")->capture_default_str();
  app.add_option("--formulation", o.formulation, "velocity-pressure, reduced, curl or stream")->capture_default_str();
  app.add_option("--trilinear", o.trilinear, "conv, skew or rot")->capture_default_str();
  app.add_option("--rhs-mode", o.rhs, "auto, projected-f or curl-f")->capture_default_str();
  app.add_option("--mesh-family", o.family, "cvt, dquad, tri or mapped-cvt")->capture_default_str();
  app.add_option("--h", o.h, "target mesh size")->capture_default_str();
  app.add_option("--levels", o.levels, "comma-separated mesh sizes")->delimiter(',')->capture_default_str();
  app.add_option("--seed", o.seed, "mesh generator seed")->capture_default_str();
  app.add_option("--mesh", o.mesh_file, "mesh file instead of a generated mesh");
  app.add_option("--tol", o.tol, "Newton tolerance")->capture_default_str();
  app.add_option("--max-iters", o.max_iters, "Newton iteration limit")->capture_default_str();
  app.add_flag("--picard", o.picard, "fixed-point instead of Newton iterations");
  app.add_flag("--condition", o.condition, "estimate the condition number of the first operator");
  app.add_option("--threads", o.threads, "worker threads for element computations")->capture_default_str();
  app.add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  app.add_flag("--no-timestamp", o.no_timestamp, "omit the timestamp line from outputs");

  auto* mesh = app.add_subcommand("mesh", "generate or check meshes");
  mesh->require_subcommand(1);
  auto* gen = mesh->add_subcommand("gen", "generate a mesh file");
  gen->add_option("--family", o.family, "cvt, dquad, tri or mapped-cvt")->capture_default_str();
  gen->add_option("--out", o.mesh_out, "output file")->required();
  auto* check = mesh->add_subcommand("check", "shape-regularity report");
  check->add_option("--rho-min", o.rho_min, "smallest accepted ratio")->capture_default_str();
  check->add_option("file", o.check_file, "mesh file")->required();
  auto* run_cmd = app.add_subcommand("run", "solve one problem on one mesh");
  auto* conv = app.add_subcommand("convergence", "refinement sweep with CSV and plot data");
  auto* verify = app.add_subcommand("verify-complex", "check exactness of the discrete complex");
  auto* compare = app.add_subcommand("compare-formulations", "velocity-pressure vs curl on one mesh");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (gen->parsed()) return cmd_mesh_gen(o, out);
    if (check->parsed()) return cmd_mesh_check(o, out);
    if (run_cmd->parsed()) return cmd_run(o, out);
    if (conv->parsed()) return cmd_convergence(o, out);
    if (verify->parsed()) return cmd_verify_complex(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ParseError& e) {
    err << "error: mesh file: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace dfvem::cli
