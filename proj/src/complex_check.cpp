#include "dfvem/complex_check.hpp"

#include "dfvem/solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseQR>

#include <sstream>

namespace dfvem {

namespace {

int sparse_rank(const SparseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  SparseMatrix m = a.rows() >= a.cols() ? a : SparseMatrix(a.transpose());
  m.makeCompressed();
  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
  qr.compute(m);
  return static_cast<int>(qr.rank());
}

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (int o = 0; o < a.outerSize(); ++o)
    for (SparseMatrix::InnerIterator it(a, o); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// Selection matrix of the unmasked indices: columns are the kept indices.
SparseMatrix selector(const std::vector<bool>& fixed) {
  std::vector<Eigen::Triplet<double>> t;
  int j = 0;
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (!fixed[i]) t.emplace_back(static_cast<int>(i), j++, 1.0);
  SparseMatrix s(static_cast<Eigen::Index>(fixed.size()), j);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

std::string counts(std::initializer_list<std::pair<const char*, long>> items) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [name, v] : items) {
    s << (first ? "" : ", ") << name << " = " << v;
    first = false;
  }
  return s.str();
}

// Checks shared by the full and reduced sequences.
void sequence_checks(ComplexReport& rep, const std::string& prefix, const SparseMatrix& b, const SparseMatrix& t,
                     const std::vector<bool>& velocity_fixed, const std::vector<bool>& stream_fixed) {
  const SparseMatrix bt = b * t;
  const double scale = max_abs(b) * max_abs(t);
  const double defect = scale > 0.0 ? max_abs(bt) / scale : max_abs(bt);
  {
    std::ostringstream s;
    s << "max|B T| / (max|B| max|T|) = " << defect;
    rep.checks.push_back({prefix + "div-curl", defect <= 1e-13, s.str()});
  }
  const SparseMatrix sv = selector(velocity_fixed), ss = selector(stream_fixed);
  const SparseMatrix b0 = b * sv;
  const SparseMatrix t0 = SparseMatrix(sv.transpose()) * t * ss;
  const int rank_b = sparse_rank(b0), rank_t = sparse_rank(t0);
  const long nq = b.rows(), nv0 = sv.cols(), ns0 = ss.cols();
  rep.checks.push_back({prefix + "div-rank", rank_b == nq - 1,
                        counts({{"rank B_0", rank_b}, {"dim Q - 1", nq - 1}})});
  rep.checks.push_back({prefix + "curl-rank", rank_t == ns0 && ns0 == nv0 - rank_b,
                        counts({{"rank T_0", rank_t}, {"dim Phi_0", ns0}, {"dim V_0 - rank B_0", nv0 - rank_b}})});
}

}  // namespace

ComplexReport verify_complex(std::shared_ptr<const PolygonalMesh> mesh, int k, int threads) {
  ComplexReport rep;
  const Discretization d(mesh, k, Formulation::curl, threads);
  const PolygonalMesh& m = *mesh;
  sequence_checks(rep, "", global_divergence(d), global_transfer(d), d.velocity_on_boundary(), d.stream_on_boundary());

  long nv_int = 0, ne_int = 0;
  for (int v = 0; v < m.n_vertices(); ++v) nv_int += !m.boundary_vertex(v);
  for (int e = 0; e < m.n_edges(); ++e) ne_int += !m.boundary_edge(e);
  const long np = m.n_cells(), n5 = poly_dim(k - 3);
  const long formula_all = 3L * m.n_vertices() + (2L * k - 3) * m.n_edges() + np * n5;
  const long formula_int = 3 * nv_int + (2L * k - 3) * ne_int + np * n5;
  const long euler = nv_int - ne_int + np;
  const long exact = d.free_velocity_count() - (d.n_pressure() - 1);
  rep.checks.push_back(
      {"dimension",
       formula_all == d.n_stream() && formula_int == d.free_stream_count() && euler == 1 &&
           exact == d.free_stream_count(),
       counts({{"dim Phi", d.n_stream()}, {"formula", formula_all}, {"dim Phi_0", d.free_stream_count()},
               {"interior formula", formula_int}, {"n_V - n_E + n_P (interior)", euler},
               {"dim V_0 - dim Q + 1", exact}})});

  // reduced sequence: drop the divergence moments, keep the cell constants
  const Discretization r(mesh, k, Formulation::reduced, threads);
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<bool> done(r.n_velocity(), false);
  for (int c = 0; c < d.n_cells(); ++c) {
    const MatrixXd& t = d.stream(c).transfer;
    const auto& rmap = r.velocity_map(c);
    const auto& smap = d.stream_map(c);
    for (std::size_t i = 0; i < rmap.size(); ++i) {
      if (rmap[i] < 0 || done[rmap[i]]) continue;
      done[rmap[i]] = true;
      for (std::size_t j = 0; j < smap.size(); ++j)
        if (t(i, j) != 0.0) trip.emplace_back(rmap[i], smap[j], t(i, j));
    }
  }
  SparseMatrix tr(r.n_velocity(), d.n_stream());
  tr.setFromTriplets(trip.begin(), trip.end());
  sequence_checks(rep, "reduced ", global_divergence(r), tr, r.velocity_on_boundary(), d.stream_on_boundary());
  return rep;
}

}  // namespace dfvem
