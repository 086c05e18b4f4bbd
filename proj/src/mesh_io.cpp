#include "dfvem/mesh_io.hpp"

#include "dfvem/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace dfvem {

void write_mesh(const PolygonalMesh& mesh, std::ostream& out) {
  out << "vem-mesh 1\n" << mesh.n_vertices() << ' ' << mesh.n_cells() << '\n';
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  for (const auto& cell : mesh.cells()) {
    out << cell.size();
    for (int v : cell) out << ' ' << v;
    out << '\n';
  }
}

void write_mesh(const PolygonalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_mesh(mesh, out);
}

namespace {

struct LineReader {
  std::istream& in;
  int number = 0;

  std::istringstream next() {
    std::string line;
    while (std::getline(in, line)) {
      ++number;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    ++number;
    throw ParseError(number, "unexpected end of file");
  }
};

void expect_end(std::istringstream& s, int line) {
  std::string rest;
  if (s >> rest) throw ParseError(line, "trailing content '" + rest + "'");
}

}  // namespace

PolygonalMesh read_mesh(std::istream& in) {
  LineReader reader{in};
  {
    auto s = reader.next();
    std::string tag;
    int version = 0;
    if (!(s >> tag >> version) || tag != "vem-mesh" || version != 1)
      throw ParseError(reader.number, "expected header 'vem-mesh 1'");
    expect_end(s, reader.number);
  }
  long nv = 0, nc = 0;
  {
    auto s = reader.next();
    if (!(s >> nv >> nc) || nv < 3 || nc < 1) throw ParseError(reader.number, "expected '<n_vertices> <n_cells>'");
    expect_end(s, reader.number);
  }
  std::vector<Vec2> vertices(nv);
  for (long i = 0; i < nv; ++i) {
    auto s = reader.next();
    double x = 0, y = 0;
    if (!(s >> x >> y)) throw ParseError(reader.number, "expected vertex coordinates 'x y'");
    expect_end(s, reader.number);
    vertices[i] = Vec2(x, y);
  }
  std::vector<std::vector<int>> cells(nc);
  std::vector<int> cell_line(nc);
  for (long c = 0; c < nc; ++c) {
    auto s = reader.next();
    cell_line[c] = reader.number;
    long m = 0;
    if (!(s >> m)) throw ParseError(reader.number, "expected vertex count of cell");
    if (m < 3) throw ParseError(reader.number, "open polygon: a cell needs at least 3 vertices");
    for (long j = 0; j < m; ++j) {
      long v = 0;
      if (!(s >> v)) throw ParseError(reader.number, "cell lists fewer vertices than declared");
      if (v < 0 || v >= nv) throw ParseError(reader.number, "vertex index " + std::to_string(v) + " out of range");
      cells[c].push_back(static_cast<int>(v));
    }
    expect_end(s, reader.number);
    for (long j = 0; j < m; ++j)
      for (long l = j + 1; l < m; ++l)
        if (cells[c][j] == cells[c][l]) throw ParseError(reader.number, "cell repeats vertex " + std::to_string(cells[c][j]));
  }
  try {
    return PolygonalMesh::from_cells(std::move(vertices), std::move(cells));
  } catch (const MeshError& e) {
    throw ParseError(reader.number, std::string("invalid mesh: ") + e.what());
  }
}

PolygonalMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path);
  return read_mesh(in);
}

}  // namespace dfvem
