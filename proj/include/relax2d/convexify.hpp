#pragma once

#include <relax2d/matrix.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

// One-dimensional lower convex envelopes of sampled curves, plus the
// separable stretch construction that lifts a scalar envelope to an
// isotropic matrix envelope.

namespace relax2d {

// Strictly increasing abscissae with one value each.
struct SampledCurve {
  std::vector<double> t;
  std::vector<double> v;

  void validate() const {
    if (t.size() != v.size()) {
      throw std::invalid_argument("SampledCurve: size mismatch");
    }
    if (t.size() < 2) {
      throw std::invalid_argument("SampledCurve: need at least 2 samples");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!std::isfinite(t[i]) || !std::isfinite(v[i])) {
        throw std::invalid_argument("SampledCurve: non-finite sample");
      }
      if (i > 0 && !(t[i - 1] < t[i])) {
        throw std::invalid_argument("SampledCurve: t must strictly increase");
      }
    }
  }

  static SampledCurve from_function(const std::function<double(double)>& f,
                                    double lo, double hi, std::size_t n) {
    if (n < 2 || !(lo < hi)) {
      throw std::invalid_argument("SampledCurve::from_function: bad range");
    }
    SampledCurve c;
    c.t.resize(n);
    c.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c.t[i] = lo + (hi - lo) * double(i) / double(n - 1);
      c.v[i] = f(c.t[i]);
    }
    c.validate();
    return c;
  }
};

// Piecewise-linear lower convex envelope of a SampledCurve.  hull_index maps
// each hull vertex back to the position of the sample it came from, so
// callers can recover which lattice points support a chord.
struct ConvexEnvelope1D {
  std::vector<double> hull_t;
  std::vector<double> hull_v;
  std::vector<std::size_t> hull_index;

  // Index i of the segment [hull_t[i], hull_t[i+1]] containing t.
  std::size_t segment_of(double t) const {
    if (!(t >= hull_t.front() && t <= hull_t.back())) {
      throw std::out_of_range("ConvexEnvelope1D: t outside hull range");
    }
    const auto it = std::upper_bound(hull_t.begin(), hull_t.end(), t);
    std::size_t i = std::size_t(it - hull_t.begin());
    if (i > 0) --i;
    if (i + 1 >= hull_t.size()) i = hull_t.size() - 2;
    return i;
  }

  double operator()(double t) const {
    const std::size_t i = segment_of(t);
    const double t0 = hull_t[i], t1 = hull_t[i + 1];
    const double w = (t - t0) / (t1 - t0);
    return (1 - w) * hull_v[i] + w * hull_v[i + 1];
  }
};

// Monotone-chain lower hull.  A vertex is popped only when it lies strictly
// above the chord of its neighbours, so samples on a straight segment are
// all kept and the hull of a convex curve is the curve itself.
inline ConvexEnvelope1D lower_convex_hull(const SampledCurve& curve) {
  curve.validate();
  const std::size_t n = curve.t.size();
  std::vector<std::size_t> stack;
  stack.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (stack.size() >= 2) {
      const std::size_t a = stack[stack.size() - 2];
      const std::size_t b = stack[stack.size() - 1];
      // cross < 0 <=> b strictly above the chord a--i.
      const double cross = (curve.t[b] - curve.t[a]) * (curve.v[i] - curve.v[a]) -
                           (curve.t[i] - curve.t[a]) * (curve.v[b] - curve.v[a]);
      if (cross < 0) {
        stack.pop_back();
      } else {
        break;
      }
    }
    stack.push_back(i);
  }
  ConvexEnvelope1D env;
  env.hull_index = std::move(stack);
  env.hull_t.reserve(env.hull_index.size());
  env.hull_v.reserve(env.hull_index.size());
  for (std::size_t i : env.hull_index) {
    env.hull_t.push_back(curve.t[i]);
    env.hull_v.push_back(curve.v[i]);
  }
  return env;
}

// Separable envelope of an isotropic stretch energy h applied to both
// singular values:
//   (Vh)(F) = Ch~(lambda1) + Ch~(lambda2),   h~(t) = h(|t|),
// where Ch~ is the scalar convex envelope of the even extension of h,
// sampled on [-radius, radius] with the given step.  Samples are laid out
// symmetrically so t and -t are paired exactly.
inline double vl_envelope(const std::function<double(double)>& h,
                          const Mat2d& F, double radius = 4.0,
                          double step = 1e-3) {
  if (!(radius > 0) || !(step > 0) || step >= radius) {
    throw std::invalid_argument("vl_envelope: need 0 < step < radius");
  }
  const SingularPair<double> sv = singular_values(F);
  if (sv.lambda1 > radius) {
    throw std::invalid_argument(
        "vl_envelope: radius must cover the largest stretch");
  }
  const auto ni = static_cast<std::ptrdiff_t>(std::ceil(radius / step - 1e-9));
  SampledCurve curve;
  curve.t.reserve(std::size_t(2 * ni + 1));
  curve.v.reserve(std::size_t(2 * ni + 1));
  for (std::ptrdiff_t i = -ni; i <= ni; ++i) {
    const double t = double(i) * step;
    curve.t.push_back(t);
    curve.v.push_back(h(std::abs(t)));
  }
  const ConvexEnvelope1D env = lower_convex_hull(curve);
  return env(sv.lambda1) + env(sv.lambda2);
}

}  // namespace relax2d
