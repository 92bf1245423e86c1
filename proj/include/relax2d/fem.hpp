#pragma once

#include <relax2d/density.hpp>
#include <relax2d/errors.hpp>
#include <relax2d/matrix.hpp>

#include <array>
#include <cstdint>
#include <vector>

// Direct energy minimisation over conforming bilinear elements on the
// square (-1,1)^2 with affine Dirichlet data phi(x) = F0 x on the boundary.
// The unknown is the deviation theta = phi - F0 x, zero on the boundary.

namespace relax2d {

struct QuadMesh {
  int n = 20;  // elements per side

  explicit QuadMesh(int elements_per_side = 20) : n(elements_per_side) {
    if (n < 1) throw std::invalid_argument("QuadMesh: need n >= 1");
  }

  static constexpr double lo = -1.0, hi = 1.0;
  double h() const { return (hi - lo) / n; }
  double area() const { return (hi - lo) * (hi - lo); }
  int nodes_per_side() const { return n + 1; }
  int node_count() const { return (n + 1) * (n + 1); }
  int element_count() const { return n * n; }

  // node a = iy * (n+1) + ix
  Vec2d node_coord(int a) const {
    const int ix = a % (n + 1), iy = a / (n + 1);
    return Vec2d(lo + ix * h(), lo + iy * h());
  }
  bool boundary_node(int a) const {
    const int ix = a % (n + 1), iy = a / (n + 1);
    return ix == 0 || iy == 0 || ix == n || iy == n;
  }
  // Counter-clockwise corner nodes of element e = ey * n + ex.
  std::array<int, 4> element_nodes(int e) const {
    const int ex = e % n, ey = e / n;
    const int a = ey * (n + 1) + ex;
    return {a, a + 1, a + n + 2, a + n + 1};
  }
};

struct DisplacementField {
  int n = 0;                 // matching QuadMesh::n
  std::vector<Vec2d> theta;  // one per node, zero on the boundary

  static DisplacementField zero(const QuadMesh& mesh) {
    DisplacementField f;
    f.n = mesh.n;
    f.theta.assign(std::size_t(mesh.node_count()), Vec2d::Zero());
    return f;
  }
};

struct EnergyAndGradient {
  double energy = 0;
  std::vector<Vec2d> gradient;  // projected: zero at boundary nodes
};

// Total energy int_Omega W(F0 + grad theta) and its nodal gradient,
// 2x2 Gauss quadrature per element.  Throws NumericalError if some
// quadrature point evaluates to a non-finite value.
EnergyAndGradient assemble_energy(const QuadMesh& mesh, const Mat2d& F0,
                                  const DisplacementField& field,
                                  const EnergyDensity& W, int threads = 1);
double assemble_value(const QuadMesh& mesh, const Mat2d& F0,
                      const DisplacementField& field, const EnergyDensity& W,
                      int threads = 1);

struct DetStats {
  double min_det = 0;
  double max_det = 0;
  int nonpositive_points = 0;  // quadrature points with det grad phi <= 0
};
DetStats det_stats(const QuadMesh& mesh, const Mat2d& F0,
                   const DisplacementField& field);

struct FemOptions {
  int max_iterations = 1000;
  double gradient_tol = 1e-7;     // 2-norm of the projected gradient
  double initial_radius = 0.05;   // trust region
  double max_radius = 2.0;
  int max_cg_iterations = 250;
  double perturbation = 1e-3;     // amplitude of the seeded initial field
  std::uint64_t seed = 1;
  int threads = 1;
  // Start from the caller-provided field (interior values only) instead of
  // the seeded random perturbation; enables warm-started continuation.
  bool use_initial_field = false;

  void validate() const {
    if (max_iterations < 1 || max_cg_iterations < 1) {
      throw std::invalid_argument("FemOptions: iteration caps must be >= 1");
    }
    if (!(gradient_tol > 0) || !(initial_radius > 0) ||
        !(max_radius >= initial_radius) || !(perturbation >= 0)) {
      throw std::invalid_argument("FemOptions: invalid numeric option");
    }
  }
};

struct SolveReport {
  double energy = 0;
  double energy_per_area = 0;
  double gradient_norm = 0;
  int iterations = 0;
  bool converged = false;
  DetStats dets;
  double seconds = 0;
};

// Trust-region minimisation (Steihaug-CG on a finite-difference
// Hessian-vector model) of the assembled energy over interior nodal values.
// Deterministic for a fixed seed and thread count.  The initial deviation is
// a seeded uniform perturbation of amplitude `perturbation`.
SolveReport minimize(const QuadMesh& mesh, const EnergyDensity& W,
                     const Mat2d& F0, const FemOptions& options,
                     DisplacementField& field);

}  // namespace relax2d
