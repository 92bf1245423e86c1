#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <type_traits>

// Dense 2x2 primitives shared by all energy and envelope routines.
// Everything is templated on the scalar and accepts arbitrary Eigen
// expressions of static size 2x2.

namespace relax2d {

template <typename Real>
using Mat2 = Eigen::Matrix<Real, 2, 2>;
template <typename Real>
using Vec2 = Eigen::Matrix<Real, 2, 1>;

using Mat2d = Mat2<double>;
using Vec2d = Vec2<double>;

namespace detail {

template <typename Derived>
inline constexpr bool is_static_2x2_v =
    Derived::RowsAtCompileTime == 2 && Derived::ColsAtCompileTime == 2;

template <typename Derived>
using RequireMat2 = std::enable_if_t<is_static_2x2_v<Derived>, int>;

}  // namespace detail

// Ordered singular values lambda1 >= lambda2 >= 0 of a 2x2 matrix.
template <typename Real>
struct SingularPair {
  Real lambda1;
  Real lambda2;
};

// Cofactor matrix: cof(F) = [[F22, -F21], [-F12, F11]].  For 2x2 matrices
// this is simultaneously the gradient of the determinant.
template <typename Derived, detail::RequireMat2<Derived> = 0>
Mat2<typename Derived::Scalar> cofactor(const Eigen::MatrixBase<Derived>& F) {
  Mat2<typename Derived::Scalar> C;
  C << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
  return C;
}

// Rotation by angle alpha (counter-clockwise), an element of SO(2).
template <typename Real>
Mat2<Real> rotation(Real alpha) {
  using std::cos;
  using std::sin;
  Mat2<Real> R;
  R << cos(alpha), -sin(alpha), sin(alpha), cos(alpha);
  return R;
}

// Rank-one product a b^T.
template <typename DA, typename DB>
Mat2<typename DA::Scalar> rank_one(const Eigen::MatrixBase<DA>& a,
                                   const Eigen::MatrixBase<DB>& b) {
  return a * b.transpose();
}

// Singular values via the closed two-term form
//   s_plus  = sqrt(|F|^2 + 2 |det F|) = lambda1 + lambda2,
//   s_minus = sqrt(|F|^2 - 2 |det F|) = lambda1 - lambda2.
// Both radicands are clamped at zero to absorb roundoff; the result is
// exact for diagonal and orthogonal inputs.
template <typename Derived, detail::RequireMat2<Derived> = 0>
SingularPair<typename Derived::Scalar> singular_values(
    const Eigen::MatrixBase<Derived>& F) {
  using Real = typename Derived::Scalar;
  using std::abs;
  using std::sqrt;
  const Real n2 = F.squaredNorm();
  const Real ad = abs(F.determinant());
  const Real sp = sqrt(std::max<Real>(n2 + 2 * ad, Real(0)));
  const Real sm = sqrt(std::max<Real>(n2 - 2 * ad, Real(0)));
  return {(sp + sm) / 2, (sp - sm) / 2};
}

}  // namespace relax2d
