#pragma once

#include <relax2d/grid.hpp>

#include <cstdint>
#include <optional>
#include <vector>

// Iterative lattice relaxation: every sweep replaces each node value by the
// best two-point mixture along the rank-one rays through it (value of the
// lower convex hull of the line samples at the node), reading the previous
// sweep's values.  The fixed point approximates the rank-one convex
// envelope on the box; with the orientation constraint, mixing is limited
// to det > 0 segments.

namespace relax2d {

// Split recorded at one node during one sweep: the hull chord supporting
// l = 0 ran from l1 to l2 along direction dir (index into the direction
// set).  dir == -1 means the node kept its value.  `ties` counts further
// directions whose best chord matched the winner to within the shared
// oracle tolerance; ties are annotated, never resolved.
struct MinimizerRecord {
  std::int16_t dir = -1;
  std::int16_t l1 = 0;
  std::int16_t l2 = 0;
  std::int16_t ties = 0;
};

struct SweepStats {
  int sweep = 0;          // 1-based
  double max_decrease = 0;
  double seconds = 0;
};

struct RocResult {
  Grid4 grid;                      // values after the last sweep
  std::vector<double> initial;     // values before the first sweep
  std::vector<Mat2d> directions;   // the ray set used
  std::vector<SweepStats> trace;
  std::vector<std::vector<MinimizerRecord>> records;  // [sweep][node]
  RocConfig config;

  double value_at(const Mat2d& F) const { return grid.interpolate(F); }
};

// Run up to cfg.k_max sweeps, stopping early once the largest nodewise
// decrease drops to cfg.early_stop or below.  Node values never increase.
RocResult roc_iterate(Grid4 grid, const std::vector<Mat2d>& dirs,
                      const RocConfig& cfg);

// Laminate tree read off the recorded splits.  Weights are relative to the
// parent; `value` is the mixture value certified by the subtree (for a leaf,
// the unrelaxed density at its node).
struct LaminationNode {
  Mat2d F;
  double weight = 1;
  double value = 0;
  int ties = 0;
  std::optional<Mat2d> direction;  // lattice ray of the split (integer entries)
  std::vector<LaminationNode> children;  // empty or exactly two

  bool leaf() const { return children.empty(); }
};

struct LaminationTree {
  LaminationNode root;
  int sweeps = 0;

  struct Leaf {
    double weight;  // cumulative
    const LaminationNode* node;
  };
  std::vector<Leaf> leaves() const;
  int depth() const;
};

// Descend the minimizer records starting from the lattice node at F0 (which
// must hit the lattice to within `lattice_tol`).  Requires a run made with
// record_minimizers = true.
LaminationTree extract_laminates(const RocResult& result, const Mat2d& F0,
                                 double lattice_tol = 1e-9);

}  // namespace relax2d
