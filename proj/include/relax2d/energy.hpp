#pragma once

#include <relax2d/constants.hpp>
#include <relax2d/matrix.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

// Planar isotropic energy densities built on the two stretches
// (singular values) of the deformation gradient, together with their
// closed-form relaxed envelopes and analytic gradients.
//
// Conventions used throughout:
//   q(F)      = |F|^2 + 2 det F      (squared distance proxy; q = (l1+l2)^2
//                                     when det F >= 0)
//   [x]+      = max(x, 0)
//   densities are frame-indifferent and isotropic; envelopes are the
//   largest semiconvex functions below them on their stated domain.

namespace relax2d {

// --- primitive densities ---------------------------------------------------

// Squared distance of the stretch pair to (1, 1):
//   (lambda1 - 1)^2 + (lambda2 - 1)^2 = |F|^2 - 2 (lambda1 + lambda2) + 2.
// Vanishes on O(2), in particular on orientation-reversing isometries.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar w_biot(const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::abs;
  using std::sqrt;
  const Real n2 = F.squaredNorm();
  const Real sp = sqrt(std::max<Real>(n2 + 2 * abs(F.determinant()), Real(0)));
  return n2 - 2 * sp + 2;
}

// Squared Euclidean distance of F to the rotation group SO(2):
//   |F|^2 - 2 sqrt(|F|^2 + 2 det F) + 2.
// Agrees with w_biot where det F > 0 and penalises reversed orientation.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar w_dist(const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::sqrt;
  const Real n2 = F.squaredNorm();
  const Real q = std::max<Real>(n2 + 2 * F.determinant(), Real(0));
  return n2 - 2 * sqrt(q) + 2;
}

// Two-parameter family of stretch energies
//   W_m(F) = f_m(lambda1)^2 + f_m(lambda2)^2,
//   f_m(x) = (x^{2m} - 1) / (2m)  for m != 0,   f_0(x) = log x.
// m = 1/2 recovers w_biot, m = 1 a quadratic Green-strain measure, m = 0 the
// logarithmic (Hencky) energy.  For m <= 0 a vanishing stretch is outside the
// domain.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar seth_hill_energy(const Eigen::MatrixBase<Derived>& F,
                                          double m) {
  using Real = typename Derived::Scalar;
  using std::log;
  using std::pow;
  const SingularPair<Real> sv = singular_values(F);
  if (m <= 0 && !(sv.lambda2 > Real(0))) {
    throw std::domain_error(
        "seth_hill_energy: m <= 0 requires strictly positive stretches");
  }
  const auto f = [m](Real x) -> Real {
    if (m == 0) return log(x);
    return (pow(x, Real(2 * m)) - Real(1)) / Real(2 * m);
  };
  const Real f1 = f(sv.lambda1);
  const Real f2 = f(sv.lambda2);
  return f1 * f1 + f2 * f2;
}

// --- closed-form envelopes -------------------------------------------------

// Relaxation of w_biot over all of R^{2x2}: each stretch contributes only
// its tensile excess, [lambda_k - 1]+^2.  Compressive states relax to zero
// through fine mixtures.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar q_biot_unconstrained(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  const SingularPair<Real> sv = singular_values(F);
  const Real e1 = std::max<Real>(sv.lambda1 - 1, Real(0));
  const Real e2 = std::max<Real>(sv.lambda2 - 1, Real(0));
  return e1 * e1 + e2 * e2;
}

// Relaxation of w_dist over all of R^{2x2}:
//   1 - 2 det F                          if q(F) < 1,
//   (sqrt(q) - 1)^2 + 1 - 2 det F        otherwise.
// The 1 - 2 det F part is a null Lagrangian; the envelope is smooth across
// q = 1.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar q_dist_unconstrained(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::sqrt;
  const Real det = F.determinant();
  const Real q = std::max<Real>(F.squaredNorm() + 2 * det, Real(0));
  if (q < Real(1)) return 1 - 2 * det;
  const Real r = sqrt(q) - 1;
  return r * r + 1 - 2 * det;
}

// Relaxation restricted to orientation-preserving deformations
// (det F > 0).  On that domain it coincides with q_dist_unconstrained;
// elsewhere the value is undefined.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar q_glp(const Eigen::MatrixBase<Derived>& F) {
  if (!(F.determinant() > typename Derived::Scalar(0))) {
    throw std::domain_error("q_glp: det F must be positive");
  }
  return q_dist_unconstrained(F);
}

// Independent oracle for q_biot_unconstrained: minimise the membrane
// expression over slack in each principal direction.  Works on the
// eigenvalues c_1 >= c_2 of C = F^T F obtained from trace and determinant
// (a different algebraic path than the singular-value split): a principal
// stretch with c <= 1 is slack and contributes nothing, otherwise it
// contributes (sqrt(c) - 1)^2.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar q_biot_pipkin_oracle(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::sqrt;
  const Mat2<Real> C = F.transpose() * F;
  const Real tr = C.trace();
  const Real dt = C.determinant();
  const Real disc = sqrt(std::max<Real>(tr * tr / 4 - dt, Real(0)));
  const Real c1 = std::max<Real>(tr / 2 + disc, Real(0));
  const Real c2 = std::max<Real>(tr / 2 - disc, Real(0));
  const auto part = [](Real c) -> Real {
    if (c <= Real(1)) return Real(0);
    const Real r = sqrt(c) - 1;
    return r * r;
  };
  return part(c1) + part(c2);
}

// Brute-force squared distance to SO(2): minimise |F - R(alpha)|^2 over n
// equally spaced angles.  The minimisation is left visible on purpose; the
// closed-form w_dist is validated against it.
template <typename Derived, detail::RequireMat2<Derived> = 0>
typename Derived::Scalar dist_so2_bruteforce(const Eigen::MatrixBase<Derived>& F,
                                             int n_angles) {
  using Real = typename Derived::Scalar;
  if (n_angles < 3) {
    throw std::invalid_argument("dist_so2_bruteforce: need at least 3 angles");
  }
  const Mat2<Real> Fm = F;
  Real best = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < n_angles; ++i) {
    const Real alpha =
        Real(2) * std::numbers::pi_v<Real> * Real(i) / Real(n_angles);
    const Real d2 = (Fm - rotation(alpha)).squaredNorm();
    best = std::min(best, d2);
  }
  return best;
}

// --- analytic gradients ----------------------------------------------------
//
// Each density above is smooth away from a thin set (listed per function).
// On that set the returned value is a declared one-sided choice: limits are
// taken from the side where |F|^2 + 2 det F is larger (det F > 0), and at
// genuinely conical points the symmetric midpoint of the two one-sided
// limits is used.

template <typename Derived, detail::RequireMat2<Derived> = 0>
Mat2<typename Derived::Scalar> w_dist_gradient(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::sqrt;
  const Real q = std::max<Real>(F.squaredNorm() + 2 * F.determinant(), Real(0));
  const Real sq = sqrt(q);
  if (sq <= Real(0)) return 2 * F;  // conical ridge: F + cof F == 0 there
  return 2 * F - Real(2) / sq * (F + cofactor(F));
}

template <typename Derived, detail::RequireMat2<Derived> = 0>
Mat2<typename Derived::Scalar> w_biot_gradient(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::abs;
  using std::sqrt;
  const Real det = F.determinant();
  const Real s = det >= 0 ? Real(1) : Real(-1);
  const Real sp = sqrt(std::max<Real>(F.squaredNorm() + 2 * abs(det), Real(0)));
  if (sp <= Real(0)) return Mat2<Real>::Zero();  // F == 0
  return 2 * F - Real(2) / sp * (F + s * cofactor(F));
}

template <typename Derived, detail::RequireMat2<Derived> = 0>
Mat2<typename Derived::Scalar> q_dist_gradient(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::sqrt;
  const Mat2<Real> cof = cofactor(F);
  const Real q = std::max<Real>(F.squaredNorm() + 2 * F.determinant(), Real(0));
  if (q < Real(1)) return -2 * cof;
  return (Real(2) - Real(2) / sqrt(q)) * (F + cof) - 2 * cof;
}

template <typename Derived, detail::RequireMat2<Derived> = 0>
Mat2<typename Derived::Scalar> q_biot_gradient(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  const Real det = F.determinant();
  const Real s = det >= 0 ? Real(1) : Real(-1);
  const SingularPair<Real> sv = singular_values(F);
  if (sv.lambda1 <= Real(1)) return Mat2<Real>::Zero();
  const Mat2<Real> cof = cofactor(F);
  const Real sp = sv.lambda1 + sv.lambda2;
  if (sv.lambda2 >= Real(1)) {
    return 2 * F - Real(2) / sp * (F + s * cof);  // both stretches taut
  }
  // lambda1 > 1 > lambda2: only the large stretch contributes.  Note
  // s_minus = lambda1 - lambda2 > 0 here, so the split is well defined.
  const Real sm = sv.lambda1 - sv.lambda2;
  return (sv.lambda1 - 1) *
         ((F + s * cof) / sp + (F - s * cof) / sm);
}

}  // namespace relax2d
