#pragma once

#include <relax2d/fem.hpp>
#include <relax2d/lamination.hpp>
#include <relax2d/microstructure.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

// Artifact formats: comment-preserving CSV tables (byte-identical round
// trip), raw lattice snapshots with CSV metadata, laminate trees as JSON,
// and legacy-VTK exports of reconstructed microstructures and deformed
// meshes.

namespace relax2d::io {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

// '#'-prefixed comment lines, a header row, then comma-separated cells kept
// verbatim as strings.  Writing emits exactly: comments, header, rows, each
// line '\n'-terminated, so read/write round-trips byte for byte.
struct CsvTable {
  std::vector<std::string> comments;  // full lines including '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static CsvTable read(std::istream& in);
  static CsvTable read_file(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void write_file(const std::filesystem::path& path) const;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

// Lattice snapshot: <prefix>.bin holds the node values as little-endian
// doubles in linear-index order, <prefix>.meta.csv the geometry, and
// <prefix>.trace.csv the per-sweep convergence trace (may be empty).
void write_grid(const std::filesystem::path& prefix, const Grid4& grid,
                const std::vector<SweepStats>& trace);
Grid4 read_grid(const std::filesystem::path& prefix);

nlohmann::json tree_to_json(const LaminationTree& tree);
LaminationTree tree_from_json(const nlohmann::json& j);
void write_tree(const std::filesystem::path& path, const LaminationTree& tree);
LaminationTree read_tree(const std::filesystem::path& path);

// Node table (x, y, u1, u2, det) of a reconstructed microstructure; u is
// the displacement phi(x) - x and det is taken from the adjacent cell
// (cell indices clamped at the far edges).
void write_microstructure_csv(const std::filesystem::path& path,
                              const MicrostructureField& field);
// Legacy-VTK structured grid over the deformed configuration with point
// displacement vectors and per-cell determinants.
void write_microstructure_vtk(const std::filesystem::path& path,
                              const MicrostructureField& field);

// Node table (node, X, Y, x, y): reference and deformed positions of a
// finite-element field under phi(X) = F0 X + theta(X).
void write_deformed_mesh_csv(const std::filesystem::path& path,
                             const QuadMesh& mesh, const Mat2d& F0,
                             const DisplacementField& field);
// Legacy-VTK unstructured quad mesh of the deformed configuration with
// point displacements and per-element centre determinants.
void write_deformed_mesh_vtk(const std::filesystem::path& path,
                             const QuadMesh& mesh, const Mat2d& F0,
                             const DisplacementField& field);

}  // namespace relax2d::io
