#include "doctest.h"
#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "dfvem");
  std::ostringstream out, err;
  const int code = dfvem::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dfvem_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 2") {
    const Outcome a = run({"run", "--formulation", "bogus"});
    CHECK(a.code == 2);
    CHECK(a.err.find("velocity-pressure, reduced, curl, stream") != std::string::npos);
    CHECK(run({"run", "--trilinear", "none"}).code == 2);
    CHECK(run({"run", "--formulation", "velocity-pressure", "--rhs-mode", "curl-f"}).code == 2);
    CHECK(run({"run", "--problem", "test2", "--mesh-family", "cvt"}).code == 2);
    CHECK(run({"--no-such-flag", "run"}).code == 2);
    CHECK(run({}).code == 2);
    const Outcome c = run({"convergence", "--levels", "0.25"});
    CHECK(c.code == 2);
    CHECK(c.err.find("need >= 2 levels") != std::string::npos);
  }

  TEST_CASE("run writes a solution file and report") {
    const fs::path dir = scratch("run");
    const Outcome a = run({"run", "--problem", "patch", "--mesh-family", "dquad", "--h", "0.25", "--formulation",
                           "velocity-pressure", "--out-dir", dir.string(), "--no-timestamp"});
    CHECK(a.code == 0);
    CHECK(a.out.find("(converged)") != std::string::npos);
    const std::string sol = slurp(dir / "solution.txt");
    CHECK(sol.rfind("# formulation=velocity-pressure k=2 mesh=dquad", 0) == 0);
    CHECK(sol.find("trilinear=none") != std::string::npos);
    CHECK(fs::exists(dir / "report.txt"));
  }

  TEST_CASE("zero problem gives zero errors") {
    const fs::path dir = scratch("zero");
    const Outcome a = run({"run", "--problem", "zero", "--mesh-family", "dquad", "--h", "0.25", "--out-dir", dir.string()});
    CHECK(a.code == 0);
    CHECK(a.out.find("error(u,H1) = 0, error(psi,H2) = 0, error(p,L2) = 0") != std::string::npos);
  }

  TEST_CASE("mesh generation and check round trip") {
    const fs::path dir = scratch("mesh");
    const std::string file = (dir / "q.mesh").string();
    CHECK(run({"mesh", "gen", "--family", "dquad", "--h", "0.1", "--seed", "4", "--out", file}).code == 0);
    const Outcome c = run({"mesh", "check", "--rho-min", "0.01", file});
    CHECK(c.code == 0);
    CHECK(c.out.find("121 vertices, 100 cells") != std::string::npos);
    CHECK(run({"mesh", "check", "--rho-min", "0.99", file}).code == 1);
    CHECK(run({"verify-complex", "--mesh", file}).code == 0);
  }

  TEST_CASE("verify-complex and compare-formulations") {
    const Outcome v = run({"verify-complex", "--mesh-family", "tri", "--h", "0.25", "--k", "3"});
    CHECK(v.code == 0);
    CHECK(v.out.find("FAIL") == std::string::npos);
    const Outcome c = run({"compare-formulations", "--mesh-family", "dquad", "--h", "0.1"});
    CHECK(c.code == 0);
    CHECK(c.out.find("reduced - curl = 198 (2 (n_P - 1) = 198)") != std::string::npos);
  }

  TEST_CASE("convergence output is deterministic without the timestamp") {
    const fs::path a = scratch("conv_a"), b = scratch("conv_b");
    for (const auto& dir : {a, b}) {
      const Outcome o = run({"convergence", "--mesh-family", "dquad", "--levels", "0.25,0.125", "--formulation",
                             "stream", "--out-dir", dir.string(), "--no-timestamp"});
      CHECK(o.code == 0);
    }
    const std::string csv = slurp(a / "convergence.csv");
    CHECK(csv.rfind("h,n_dofs,err_u_h1,err_psi_h2,err_p_l2,cond,newton_iters,rate_u,rate_p\n", 0) == 0);
    CHECK(csv == slurp(b / "convergence.csv"));
    CHECK(slurp(a / "plot_err_psi_h2.dat").rfind("# log10(h) log10(err_psi_h2)\n", 0) == 0);
  }

  TEST_CASE("config file with flag overrides") {
    const fs::path dir = scratch("config");
    {
      std::ofstream cfg(dir / "run.cfg");
      cfg << "problem=patch\nmesh-family=dquad\nh=0.25\nformulation=bogus\n";
    }
    const std::string cfg = (dir / "run.cfg").string();
    CHECK(run({"--config", cfg, "run", "--out-dir", dir.string()}).code == 2);
    CHECK(run({"--config", cfg, "run", "--formulation", "curl", "--out-dir", dir.string()}).code == 0);
    {
      std::ofstream bad(dir / "bad.cfg");
      bad << "no-such-key=1\n";
    }
    CHECK(run({"--config", (dir / "bad.cfg").string(), "run"}).code == 2);
  }
}
