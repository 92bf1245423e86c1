#pragma once

#include <relax2d/constants.hpp>
#include <relax2d/convexify.hpp>
#include <relax2d/density.hpp>
#include <relax2d/errors.hpp>
#include <relax2d/matrix.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

// Uniform lattice over a box of 2x2 matrices, the rank-one direction set,
// and line sampling along rank-one rays.  Matrix components are ordered
// (a11, a12, a21, a22) throughout.

namespace relax2d {

struct AxisBounds {
  double lo = 0;
  double hi = 0;
};

// Parameters of a lattice relaxation run.
struct RocConfig {
  double delta = 0.1;                  // lattice spacing
  std::array<AxisBounds, 4> bounds{};  // per-component box
  int direction_order = 1;             // max |entry| of the direction vectors
  int k_max = 10;                      // sweep cap
  bool constrained = false;            // restrict mixing to det > 0 segments
  bool record_minimizers = false;      // keep per-node split records
  double early_stop = tol::kSweepEarlyStop;
  std::size_t memory_budget_bytes = std::size_t(2) << 30;
  int threads = 1;

  // Symmetric box [-radius, radius]^4.
  static RocConfig cube(double delta, double radius);
  // Orientation-constrained compression box: diagonal components in
  // [delta, 1], off-diagonal components in [-1, 1].
  static RocConfig compression_box(double delta);

  void validate() const;
};

// Values sampled on the lattice.  Node i = (i0,i1,i2,i3) sits at
// component_j = lo_j + i_j * delta.
class Grid4 {
 public:
  static Grid4 from_config(const RocConfig& cfg);

  double delta() const { return delta_; }
  const std::array<AxisBounds, 4>& bounds() const { return bounds_; }
  const std::array<int, 4>& shape() const { return shape_; }
  const std::array<std::ptrdiff_t, 4>& strides() const { return strides_; }
  std::size_t size() const { return values_.size(); }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t linear(const std::array<int, 4>& idx) const {
    return std::size_t(((idx[0] * shape_[1] + idx[1]) * shape_[2] + idx[2]) *
                           shape_[3] +
                       idx[3]);
  }

  std::array<int, 4> unravel(std::size_t lin) const;
  Mat2d matrix_at(const std::array<int, 4>& idx) const;
  Mat2d matrix_at(std::size_t lin) const { return matrix_at(unravel(lin)); }

  // Box membership with the shared lattice slack.
  bool inside(const Mat2d& F) const;

  // Exact lattice hit within an absolute component tolerance.
  std::optional<std::array<int, 4>> lattice_index(const Mat2d& F,
                                                  double tolerance) const;

  // Multilinear interpolation of the stored values; F must be inside().
  double interpolate(const Mat2d& F) const;

 private:
  double delta_ = 0;
  std::array<AxisBounds, 4> bounds_{};
  std::array<int, 4> shape_{};
  std::array<std::ptrdiff_t, 4> strides_{};
  std::vector<double> values_;
};

// Evaluate a density at every lattice node.
Grid4 build_grid(const EnergyDensity& W, const RocConfig& cfg);

// All rank-one matrices a b^T with integer vectors |a|_inf, |b|_inf <= order,
// deduplicated up to sign and scalar multiples.  Entries are integers:
// stepping one lattice unit along direction R moves by delta * R.
std::vector<Mat2d> directions(int order);

// Values along the rank-one ray F + l * delta * R for integer l, restricted
// to the grid box; with `constrained`, further restricted to the contiguous
// det > 0 segment containing l = 0 (throws std::domain_error if det F <= 0).
// Off-lattice base points are handled by interpolation.  The abscissae of
// the returned curve are the integers l.
SampledCurve line_points(const Mat2d& F, const Mat2d& R, const Grid4& grid,
                         bool constrained);

}  // namespace relax2d
