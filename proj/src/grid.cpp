#include <relax2d/grid.hpp>

#include <relax2d/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relax2d {

namespace {

// Number of lattice points on [lo, hi] with spacing delta; the span must be
// an integer multiple of delta up to the shared slack.
int axis_count(const AxisBounds& b, double delta) {
  const double span = b.hi - b.lo;
  if (!(span >= 0)) throw std::invalid_argument("Grid4: axis with hi < lo");
  const double steps = span / delta;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) * delta > 1e-9) {
    throw std::invalid_argument(
        "Grid4: axis span must be an integer multiple of delta");
  }
  return int(rounded) + 1;
}

}  // namespace

RocConfig RocConfig::cube(double delta, double radius) {
  RocConfig cfg;
  cfg.delta = delta;
  for (auto& b : cfg.bounds) b = {-radius, radius};
  return cfg;
}

RocConfig RocConfig::compression_box(double delta) {
  RocConfig cfg;
  cfg.delta = delta;
  cfg.bounds[0] = {delta, 1.0};   // a11
  cfg.bounds[1] = {-1.0, 1.0};    // a12
  cfg.bounds[2] = {-1.0, 1.0};    // a21
  cfg.bounds[3] = {delta, 1.0};   // a22
  cfg.constrained = true;
  return cfg;
}

void RocConfig::validate() const {
  if (!(delta > 0)) throw std::invalid_argument("RocConfig: delta must be > 0");
  if (direction_order < 1) {
    throw std::invalid_argument("RocConfig: direction_order must be >= 1");
  }
  if (k_max < 1) throw std::invalid_argument("RocConfig: k_max must be >= 1");
  if (!(early_stop >= 0)) {
    throw std::invalid_argument("RocConfig: early_stop must be >= 0");
  }
  for (const auto& b : bounds) {
    axis_count(b, delta);  // throws on misaligned spans
  }
}

Grid4 Grid4::from_config(const RocConfig& cfg) {
  cfg.validate();
  Grid4 g;
  g.delta_ = cfg.delta;
  g.bounds_ = cfg.bounds;
  std::size_t total = 1;
  for (int j = 0; j < 4; ++j) {
    g.shape_[j] = axis_count(cfg.bounds[std::size_t(j)], cfg.delta);
    total *= std::size_t(g.shape_[j]);
  }
  g.strides_[3] = 1;
  g.strides_[2] = g.shape_[3];
  g.strides_[1] = std::ptrdiff_t(g.shape_[2]) * g.shape_[3];
  g.strides_[0] = std::ptrdiff_t(g.shape_[1]) * g.shape_[2] * g.shape_[3];
  const std::size_t bytes = total * sizeof(double);
  if (bytes > cfg.memory_budget_bytes) {
    throw ResourceLimitError(
        "Grid4: lattice of " + std::to_string(total) + " nodes needs " +
            std::to_string(bytes) + " bytes, budget is " +
            std::to_string(cfg.memory_budget_bytes),
        bytes, cfg.memory_budget_bytes);
  }
  g.values_.assign(total, 0.0);
  return g;
}

std::array<int, 4> Grid4::unravel(std::size_t lin) const {
  std::array<int, 4> idx;
  idx[3] = int(lin % std::size_t(shape_[3]));
  lin /= std::size_t(shape_[3]);
  idx[2] = int(lin % std::size_t(shape_[2]));
  lin /= std::size_t(shape_[2]);
  idx[1] = int(lin % std::size_t(shape_[1]));
  idx[0] = int(lin / std::size_t(shape_[1]));
  return idx;
}

Mat2d Grid4::matrix_at(const std::array<int, 4>& idx) const {
  Mat2d F;
  F(0, 0) = bounds_[0].lo + idx[0] * delta_;
  F(0, 1) = bounds_[1].lo + idx[1] * delta_;
  F(1, 0) = bounds_[2].lo + idx[2] * delta_;
  F(1, 1) = bounds_[3].lo + idx[3] * delta_;
  return F;
}

bool Grid4::inside(const Mat2d& F) const {
  const double c[4] = {F(0, 0), F(0, 1), F(1, 0), F(1, 1)};
  for (int j = 0; j < 4; ++j) {
    if (!(c[j] >= bounds_[std::size_t(j)].lo - tol::kLatticeSlack &&
          c[j] < bounds_[std::size_t(j)].hi + tol::kLatticeSlack)) {
      return false;
    }
  }
  return true;
}

std::optional<std::array<int, 4>> Grid4::lattice_index(
    const Mat2d& F, double tolerance) const {
  const double c[4] = {F(0, 0), F(0, 1), F(1, 0), F(1, 1)};
  std::array<int, 4> idx;
  for (int j = 0; j < 4; ++j) {
    const double u = (c[j] - bounds_[std::size_t(j)].lo) / delta_;
    const double r = std::round(u);
    if (std::abs(u - r) * delta_ > tolerance) return std::nullopt;
    const int i = int(r);
    if (i < 0 || i >= shape_[j]) return std::nullopt;
    idx[std::size_t(j)] = i;
  }
  return idx;
}

double Grid4::interpolate(const Mat2d& F) const {
  if (!inside(F)) {
    throw std::out_of_range("Grid4::interpolate: point outside the box");
  }
  const double c[4] = {F(0, 0), F(0, 1), F(1, 0), F(1, 1)};
  int base[4];
  double w[4];
  for (int j = 0; j < 4; ++j) {
    const double u = (c[j] - bounds_[std::size_t(j)].lo) / delta_;
    int i = int(std::floor(u));
    i = std::clamp(i, 0, shape_[j] - 2 >= 0 ? shape_[j] - 2 : 0);
    base[j] = i;
    w[j] = std::clamp(u - i, 0.0, 1.0);
  }
  double acc = 0;
  for (int m = 0; m < 16; ++m) {
    double weight = 1;
    std::size_t lin = 0;
    for (int j = 0; j < 4; ++j) {
      const int bit = (m >> j) & 1;
      const int i = std::min(base[j] + bit, shape_[j] - 1);
      weight *= bit ? w[j] : 1 - w[j];
      lin += std::size_t(i) * std::size_t(strides_[std::size_t(j)]);
    }
    if (weight != 0) acc += weight * values_[lin];
  }
  return acc;
}

Grid4 build_grid(const EnergyDensity& W, const RocConfig& cfg) {
  Grid4 g = Grid4::from_config(cfg);
  const int threads = resolve_threads(cfg.threads);
  auto& vals = g.values();
  parallel_chunks(g.size(), threads,
                  [&](std::size_t b, std::size_t e, int /*worker*/) {
                    for (std::size_t lin = b; lin < e; ++lin) {
                      vals[lin] = W(g.matrix_at(lin));
                    }
                  });
  return g;
}

std::vector<Mat2d> directions(int order) {
  if (order < 1) throw std::invalid_argument("directions: order must be >= 1");
  std::vector<Mat2d> out;
  const auto canonicalize = [](Eigen::Matrix<long, 2, 2> N) {
    long g = 0;
    for (int k = 0; k < 4; ++k) g = std::gcd(g, std::abs(N(k / 2, k % 2)));
    if (g > 1) N /= g;
    for (int k = 0; k < 4; ++k) {
      const long e = N(k / 2, k % 2);
      if (e > 0) break;
      if (e < 0) {
        N = -N;
        break;
      }
    }
    return N;
  };
  std::vector<Eigen::Matrix<long, 2, 2>> seen;
  for (long a0 = -order; a0 <= order; ++a0)
    for (long a1 = -order; a1 <= order; ++a1) {
      if (a0 == 0 && a1 == 0) continue;
      for (long b0 = -order; b0 <= order; ++b0)
        for (long b1 = -order; b1 <= order; ++b1) {
          if (b0 == 0 && b1 == 0) continue;
          Eigen::Matrix<long, 2, 2> N;
          N << a0 * b0, a0 * b1, a1 * b0, a1 * b1;
          N = canonicalize(N);
          bool dup = false;
          for (const auto& M : seen) {
            if (M == N) {
              dup = true;
              break;
            }
          }
          if (!dup) seen.push_back(N);
        }
    }
  out.reserve(seen.size());
  for (const auto& N : seen) out.push_back(N.cast<double>());
  return out;
}

SampledCurve line_points(const Mat2d& F, const Mat2d& R, const Grid4& grid,
                         bool constrained) {
  const double delta = grid.delta();
  const double r[4] = {R(0, 0), R(0, 1), R(1, 0), R(1, 1)};
  const double f[4] = {F(0, 0), F(0, 1), F(1, 0), F(1, 1)};

  // Intersect the ray with the slacked box, axis by axis.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4; ++j) {
    if (r[j] == 0) {
      if (!(f[j] >= grid.bounds()[std::size_t(j)].lo - tol::kLatticeSlack &&
            f[j] < grid.bounds()[std::size_t(j)].hi + tol::kLatticeSlack)) {
        throw std::out_of_range("line_points: base point outside the box");
      }
      continue;
    }
    const double step = delta * r[j];
    double a = (grid.bounds()[std::size_t(j)].lo - tol::kLatticeSlack - f[j]) /
               step;
    double b = (grid.bounds()[std::size_t(j)].hi + tol::kLatticeSlack - f[j]) /
               step;
    if (step < 0) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  long lmin = long(std::ceil(lo));
  long lmax = long(std::floor(hi));
  if (lmin > 0 || lmax < 0) {
    throw std::out_of_range("line_points: base point outside the box");
  }

  if (constrained) {
    // det(F + l delta R) is affine in l because det R = 0; keep the
    // contiguous positive segment around l = 0.
    const double det0 = F.determinant();
    if (!(det0 > 0)) {
      throw std::domain_error(
          "line_points: constrained ray needs det F > 0 at the base point");
    }
    const double slope = delta * (cofactor(F).array() * R.array()).sum();
    long up = 0;
    while (up + 1 <= lmax && det0 + double(up + 1) * slope > 0) ++up;
    long dn = 0;
    while (dn - 1 >= lmin && det0 + double(dn - 1) * slope > 0) --dn;
    lmin = dn;
    lmax = up;
  }

  SampledCurve curve;
  curve.t.reserve(std::size_t(lmax - lmin + 1));
  curve.v.reserve(std::size_t(lmax - lmin + 1));
  for (long l = lmin; l <= lmax; ++l) {
    curve.t.push_back(double(l));
    curve.v.push_back(grid.interpolate(F + double(l) * delta * R));
  }
  return curve;
}

}  // namespace relax2d
