#pragma once

#include <relax2d/lamination.hpp>

#include <vector>

// Turns a laminate tree into an explicit deformation of the unit square:
// each split contributes a sawtooth profile across its interface normal,
// nested splits oscillate at a geometrically growing frequency, and the
// boundary is clamped to the affine map of the tree root so the discrete
// mean gradient matches the prescribed average exactly.

namespace relax2d {

struct MicrostructureField {
  // Nodes on a uniform (resolution x resolution) lattice over [-1,1]^2;
  // node (ix, iy) at index iy * resolution + ix maps to phi.
  int resolution = 0;
  Mat2d F0;
  std::vector<Vec2d> phi;

  // Per-cell gradient of the bilinear interpolant at the cell centre,
  // (resolution-1)^2 entries, and its determinant.
  std::vector<Mat2d> cell_gradients;
  std::vector<double> cell_dets;

  int negative_det_cells = 0;
  bool has_reversed_leaf = false;  // some laminate phase has det F <= 0

  double spacing() const { return 2.0 / (resolution - 1); }
  Vec2d node_coord(int ix, int iy) const {
    return Vec2d(-1 + ix * spacing(), -1 + iy * spacing());
  }

  // Area average of the cell gradients.
  Mat2d mean_gradient() const;
};

// frequency >= 1 controls the strip count of the top split (deeper splits
// use frequency^(depth+1)); resolution >= 2 is the nodes per side.  Throws
// std::invalid_argument if some split of the tree is not rank-one
// compatible or does not average back to its parent.
MicrostructureField reconstruct_microstructure(const LaminationTree& tree,
                                               int frequency, int resolution);

// Pointwise oscillation phi(x) - F0 x of the laminate deformation at an
// arbitrary point (same profile the field reconstruction uses); useful as a
// microstructure-informed initial guess for mesh-based minimisation.
Vec2d laminate_deviation(const LaminationTree& tree, const Vec2d& x,
                         int frequency);

}  // namespace relax2d
