#include <relax2d/io.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relax2d::io {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  return in;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw std::runtime_error("malformed number in table: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

CsvTable CsvTable::read(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && !line.empty() && line.front() == '#') {
      t.comments.push_back(line);
      continue;
    }
    if (line.empty()) continue;
    if (!have_header) {
      t.header = split_csv(line);
      have_header = true;
    } else {
      auto cells = split_csv(line);
      if (cells.size() != t.header.size()) {
        throw std::runtime_error("CsvTable: row width differs from header");
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw std::runtime_error("CsvTable: missing header row");
  return t;
}

CsvTable CsvTable::read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read(in);
}

void CsvTable::write(std::ostream& out) const {
  for (const auto& c : comments) out << c << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

void CsvTable::write_file(const std::filesystem::path& path) const {
  auto out = open_out(path);
  write(out);
}

void write_grid(const std::filesystem::path& prefix, const Grid4& grid,
                const std::vector<SweepStats>& trace) {
  {
    auto bin = open_out(prefix.string() + ".bin", true);
    bin.write(reinterpret_cast<const char*>(grid.values().data()),
              std::streamsize(grid.values().size() * sizeof(double)));
  }
  {
    CsvTable meta;
    meta.comments.push_back(
        "# lattice over 2x2 matrices, component order a11,a12,a21,a22");
    meta.header = {"axis", "lo", "hi", "count", "delta"};
    for (int j = 0; j < 4; ++j) {
      meta.add_row({std::to_string(j),
                    format_double(grid.bounds()[std::size_t(j)].lo),
                    format_double(grid.bounds()[std::size_t(j)].hi),
                    std::to_string(grid.shape()[std::size_t(j)]),
                    format_double(grid.delta())});
    }
    meta.write_file(prefix.string() + ".meta.csv");
  }
  {
    CsvTable tr;
    tr.header = {"sweep", "max_decrease", "seconds"};
    for (const auto& s : trace) {
      tr.add_row({std::to_string(s.sweep), format_double(s.max_decrease),
                  format_double(s.seconds)});
    }
    tr.write_file(prefix.string() + ".trace.csv");
  }
}

Grid4 read_grid(const std::filesystem::path& prefix) {
  const CsvTable meta = CsvTable::read_file(prefix.string() + ".meta.csv");
  if (meta.rows.size() != 4) {
    throw std::runtime_error("read_grid: expected 4 axis rows");
  }
  RocConfig cfg;
  cfg.delta = parse_double(meta.rows[0][4]);
  std::size_t total = 1;
  for (int j = 0; j < 4; ++j) {
    cfg.bounds[std::size_t(j)] = {parse_double(meta.rows[std::size_t(j)][1]),
                                  parse_double(meta.rows[std::size_t(j)][2])};
    total *= std::size_t(std::stoi(meta.rows[std::size_t(j)][3]));
  }
  cfg.memory_budget_bytes = std::max<std::size_t>(
      cfg.memory_budget_bytes, 2 * total * sizeof(double));
  Grid4 grid = Grid4::from_config(cfg);
  if (grid.size() != total) {
    throw std::runtime_error("read_grid: metadata is inconsistent");
  }
  auto bin = open_in(prefix.string() + ".bin", true);
  bin.read(reinterpret_cast<char*>(grid.values().data()),
           std::streamsize(total * sizeof(double)));
  if (std::size_t(bin.gcount()) != total * sizeof(double)) {
    throw std::runtime_error("read_grid: value file too short");
  }
  return grid;
}

namespace {

nlohmann::json node_to_json(const LaminationNode& node) {
  nlohmann::json j;
  j["F"] = {node.F(0, 0), node.F(0, 1), node.F(1, 0), node.F(1, 1)};
  j["weight"] = node.weight;
  j["value"] = node.value;
  j["ties"] = node.ties;
  if (node.direction) {
    const Mat2d& R = *node.direction;
    j["direction"] = {R(0, 0), R(0, 1), R(1, 0), R(1, 1)};
  } else {
    j["direction"] = nullptr;
  }
  j["children"] = nlohmann::json::array();
  for (const auto& c : node.children) j["children"].push_back(node_to_json(c));
  return j;
}

LaminationNode node_from_json(const nlohmann::json& j) {
  LaminationNode node;
  const auto& F = j.at("F");
  node.F << F.at(0).get<double>(), F.at(1).get<double>(),
      F.at(2).get<double>(), F.at(3).get<double>();
  node.weight = j.at("weight").get<double>();
  node.value = j.value("value", 0.0);
  node.ties = j.value("ties", 0);
  if (j.contains("direction") && !j.at("direction").is_null()) {
    const auto& R = j.at("direction");
    Mat2d M;
    M << R.at(0).get<double>(), R.at(1).get<double>(), R.at(2).get<double>(),
        R.at(3).get<double>();
    node.direction = M;
  }
  for (const auto& c : j.at("children")) {
    node.children.push_back(node_from_json(c));
  }
  if (!node.children.empty() && node.children.size() != 2) {
    throw std::runtime_error("laminate tree: nodes must have 0 or 2 children");
  }
  return node;
}

}  // namespace

nlohmann::json tree_to_json(const LaminationTree& tree) {
  nlohmann::json j;
  j["sweeps"] = tree.sweeps;
  j["root"] = node_to_json(tree.root);
  return j;
}

LaminationTree tree_from_json(const nlohmann::json& j) {
  LaminationTree tree;
  tree.sweeps = j.at("sweeps").get<int>();
  tree.root = node_from_json(j.at("root"));
  return tree;
}

void write_tree(const std::filesystem::path& path, const LaminationTree& tree) {
  auto out = open_out(path);
  out << tree_to_json(tree).dump(2) << '\n';
}

LaminationTree read_tree(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  in >> j;
  return tree_from_json(j);
}

void write_microstructure_csv(const std::filesystem::path& path,
                              const MicrostructureField& field) {
  CsvTable t;
  t.comments.push_back("# reconstructed laminate deformation on [-1,1]^2");
  if (field.has_reversed_leaf) {
    t.comments.push_back("# warning: contains orientation-reversing phases");
  }
  t.header = {"x", "y", "u1", "u2", "det"};
  const int res = field.resolution;
  const int nc = res - 1;
  for (int iy = 0; iy < res; ++iy) {
    for (int ix = 0; ix < res; ++ix) {
      const Vec2d x = field.node_coord(ix, iy);
      const Vec2d u = field.phi[std::size_t(iy) * std::size_t(res) +
                                std::size_t(ix)] -
                      x;
      const int cx = std::min(ix, nc - 1), cy = std::min(iy, nc - 1);
      const double det =
          field.cell_dets[std::size_t(cy) * std::size_t(nc) + std::size_t(cx)];
      t.add_row({format_double(x(0)), format_double(x(1)), format_double(u(0)),
                 format_double(u(1)), format_double(det)});
    }
  }
  t.write_file(path);
}

void write_microstructure_vtk(const std::filesystem::path& path,
                              const MicrostructureField& field) {
  auto out = open_out(path);
  const int res = field.resolution;
  const std::size_t n = std::size_t(res) * std::size_t(res);
  out << "# vtk DataFile Version 3.0\n";
  out << "laminate microstructure (deformed configuration)\n";
  out << "ASCII\nDATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << res << ' ' << res << " 1\n";
  out << "POINTS " << n << " double\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << format_double(field.phi[i](0)) << ' '
        << format_double(field.phi[i](1)) << " 0\n";
  }
  out << "POINT_DATA " << n << "\nVECTORS displacement double\n";
  for (int iy = 0; iy < res; ++iy) {
    for (int ix = 0; ix < res; ++ix) {
      const Vec2d u = field.phi[std::size_t(iy) * std::size_t(res) +
                                std::size_t(ix)] -
                      field.node_coord(ix, iy);
      out << format_double(u(0)) << ' ' << format_double(u(1)) << " 0\n";
    }
  }
  out << "CELL_DATA " << field.cell_dets.size()
      << "\nSCALARS det_grad double 1\nLOOKUP_TABLE default\n";
  for (double d : field.cell_dets) out << format_double(d) << '\n';
}

void write_deformed_mesh_csv(const std::filesystem::path& path,
                             const QuadMesh& mesh, const Mat2d& F0,
                             const DisplacementField& field) {
  CsvTable t;
  t.comments.push_back("# reference and deformed nodal positions");
  t.header = {"node", "X", "Y", "x", "y"};
  for (int a = 0; a < mesh.node_count(); ++a) {
    const Vec2d X = mesh.node_coord(a);
    const Vec2d x = F0 * X + field.theta[std::size_t(a)];
    t.add_row({std::to_string(a), format_double(X(0)), format_double(X(1)),
               format_double(x(0)), format_double(x(1))});
  }
  t.write_file(path);
}

void write_deformed_mesh_vtk(const std::filesystem::path& path,
                             const QuadMesh& mesh, const Mat2d& F0,
                             const DisplacementField& field) {
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "deformed finite-element mesh\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (int a = 0; a < mesh.node_count(); ++a) {
    const Vec2d x = F0 * mesh.node_coord(a) + field.theta[std::size_t(a)];
    out << format_double(x(0)) << ' ' << format_double(x(1)) << " 0\n";
  }
  const int ne = mesh.element_count();
  out << "CELLS " << ne << ' ' << 5 * ne << '\n';
  for (int e = 0; e < ne; ++e) {
    const auto nodes = mesh.element_nodes(e);
    out << "4 " << nodes[0] << ' ' << nodes[1] << ' ' << nodes[2] << ' '
        << nodes[3] << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) out << "9\n";
  out << "POINT_DATA " << mesh.node_count()
      << "\nVECTORS displacement double\n";
  for (int a = 0; a < mesh.node_count(); ++a) {
    const Vec2d u =
        F0 * mesh.node_coord(a) + field.theta[std::size_t(a)] -
        mesh.node_coord(a);
    out << format_double(u(0)) << ' ' << format_double(u(1)) << " 0\n";
  }
  out << "CELL_DATA " << ne << "\nSCALARS det_grad double 1\nLOOKUP_TABLE default\n";
  // determinant of the deformation gradient at each element centre
  const double jac = mesh.h() / 2;
  const std::array<Vec2d, 4> dN = {Vec2d(-0.25, -0.25), Vec2d(0.25, -0.25),
                                   Vec2d(0.25, 0.25), Vec2d(-0.25, 0.25)};
  for (int e = 0; e < ne; ++e) {
    const auto nodes = mesh.element_nodes(e);
    Mat2d G = F0;
    for (int a = 0; a < 4; ++a) {
      G += field.theta[std::size_t(nodes[std::size_t(a)])] *
           (dN[std::size_t(a)].transpose() / jac);
    }
    out << format_double(G.determinant()) << '\n';
  }
}

}  // namespace relax2d::io
