#pragma once

#include "dfvem/mesh.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dfvem {

struct ComplexCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ComplexReport {
  std::vector<ComplexCheck> checks;
  [[nodiscard]] bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// Exactness of the discrete sequence stream -> velocity -> pressure with
/// homogeneous boundary constraints:
///   div-curl:  |B T| <= 1e-13 max|B| max|T|
///   curl-rank: rank T_0 = dim of the constrained stream space = dim V_0 - rank B_0
///   div-rank:  rank B_0 = dim Q - 1
///   dimension: stream DoF count formula, Euler relation n_V - n_E + n_P = 1 on
///              interior entities, and dim V_0 - (dim Q - 1) = dim Phi_0
///   reduced:   the same with the reduced velocity space and piecewise constants.
ComplexReport verify_complex(std::shared_ptr<const PolygonalMesh> mesh, int k, int threads = 1);

}  // namespace dfvem
