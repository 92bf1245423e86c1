#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <relax2d/energy.hpp>
#include <relax2d/grid.hpp>

#include "test_util.hpp"

#include <numeric>
#include <set>

using namespace relax2d;

namespace {

// Exhaustive oracle for the direction count: enumerate every integer
// rank-one product, reduce by gcd and sign, count distinct matrices.
int direction_count_oracle(int order) {
  std::set<std::array<long, 4>> classes;
  for (long a0 = -order; a0 <= order; ++a0)
    for (long a1 = -order; a1 <= order; ++a1)
      for (long b0 = -order; b0 <= order; ++b0)
        for (long b1 = -order; b1 <= order; ++b1) {
          if ((a0 == 0 && a1 == 0) || (b0 == 0 && b1 == 0)) continue;
          std::array<long, 4> n = {a0 * b0, a0 * b1, a1 * b0, a1 * b1};
          long g = 0;
          for (long e : n) g = std::gcd(g, std::abs(e));
          for (long& e : n) e /= g;
          for (long e : n) {
            if (e > 0) break;
            if (e < 0) {
              for (long& x : n) x = -x;
              break;
            }
          }
          classes.insert(n);
        }
  return int(classes.size());
}

}  // namespace

TEST_CASE("lattice geometry") {
  const RocConfig cfg = RocConfig::cube(1.0, 1.0);
  Grid4 g = Grid4::from_config(cfg);
  CHECK(g.size() == 81);
  CHECK(g.shape() == std::array<int, 4>{3, 3, 3, 3});

  const auto idx = g.lattice_index(Mat2d::Identity(), 1e-12);
  REQUIRE(idx.has_value());
  CHECK(*idx == std::array<int, 4>{2, 1, 1, 2});
  CHECK((g.matrix_at(*idx) - Mat2d::Identity()).norm() == 0.0);

  CHECK(g.inside(Mat2d::Identity()));
  CHECK(g.inside(-Mat2d::Ones()));
  CHECK(!g.inside(1.5 * Mat2d::Identity()));
  CHECK(!g.lattice_index(0.5 * Mat2d::Identity(), 1e-9).has_value());

  CHECK_THROWS_AS(Grid4::from_config(RocConfig::cube(0.3, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("lattice evaluation of densities") {
  {
    const Grid4 g = build_grid(biot_density(), RocConfig::cube(1.0, 1.0));
    const auto idx = g.lattice_index(Mat2d::Identity(), 1e-12);
    CHECK(g.values()[g.linear(*idx)] == 0.0);
  }
  {
    const Grid4 g = build_grid(dist_density(), RocConfig::cube(0.5, 1.0));
    const Mat2d refl = (Mat2d() << 1, 0, 0, -1).finished();
    const auto idx = g.lattice_index(refl, 1e-12);
    REQUIRE(idx.has_value());
    CHECK(g.values()[g.linear(*idx)] == doctest::Approx(4.0).epsilon(1e-13));
  }
  {
    // the desk-scale box: 41^4 nodes; spot check the compressive state
    RocConfig cfg = RocConfig::cube(0.1, 2.0);
    const Grid4 g = build_grid(biot_density(), cfg);
    CHECK(g.size() == 41u * 41u * 41u * 41u);
    const Mat2d F0 = 0.4 * Mat2d::Identity();
    CHECK(g.interpolate(F0) == doctest::Approx(0.72).epsilon(1e-11));
  }
}

TEST_CASE("memory budget is enforced before allocation") {
  RocConfig cfg = RocConfig::cube(0.1, 2.0);
  cfg.memory_budget_bytes = 1 << 20;  // far below the 41^4 lattice
  CHECK_THROWS_AS(Grid4::from_config(cfg), ResourceLimitError);
  try {
    Grid4::from_config(cfg);
  } catch (const ResourceLimitError& e) {
    CHECK(e.requested_bytes == 41u * 41u * 41u * 41u * sizeof(double));
    CHECK(e.budget_bytes == std::size_t(1 << 20));
  }
}

TEST_CASE("multilinear interpolation is exact for multilinear data") {
  RocConfig cfg = RocConfig::cube(0.5, 1.0);
  // f(A) = a11 * a22 - 2 a12 + 3 a21 * a11 is multilinear per component
  const auto f = [](const Mat2d& A) {
    return A(0, 0) * A(1, 1) - 2 * A(0, 1) + 3 * A(1, 0) * A(0, 0);
  };
  Grid4 g = Grid4::from_config(cfg);
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    g.values()[lin] = f(g.matrix_at(lin));
  }
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    Mat2d F;
    F << u(rng), u(rng), u(rng), u(rng);
    CHECK(g.interpolate(F) == doctest::Approx(f(F)).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)g.interpolate(2.0 * Mat2d::Ones()), std::out_of_range);
}

TEST_CASE("direction set: canonical rank-one rays") {
  const auto dirs = directions(1);
  CHECK(int(dirs.size()) == direction_count_oracle(1));

  bool has_e1e2 = false;
  for (const auto& R : dirs) {
    CHECK(R.determinant() == 0.0);  // every ray is rank-one
    CHECK(R.cwiseAbs().maxCoeff() >= 1.0);
    const Mat2d e1e2 = (Mat2d() << 0, 1, 0, 0).finished();
    if ((R - e1e2).norm() == 0.0) has_e1e2 = true;
    // no duplicates up to sign
    int matches = 0;
    for (const auto& S : dirs) {
      if ((S - R).norm() == 0.0 || (S + R).norm() == 0.0) ++matches;
    }
    CHECK(matches == 1);
  }
  CHECK(has_e1e2);

  const auto dirs2 = directions(2);
  CHECK(int(dirs2.size()) == direction_count_oracle(2));
  CHECK(dirs2.size() > dirs.size());
  CHECK_THROWS_AS(directions(0), std::invalid_argument);
}

TEST_CASE("ray sampling inside the box") {
  const Grid4 g = build_grid(biot_density(), RocConfig::cube(0.1, 2.0));
  const Mat2d F0 = 0.4 * Mat2d::Identity();
  const Mat2d e1e1 = (Mat2d() << 1, 0, 0, 0).finished();

  // a11 runs over [-2, 2]: 41 lattice points, 0.4 sits at offset 0
  const SampledCurve line = line_points(F0, e1e1, g, false);
  REQUIRE(line.t.size() == 41);
  CHECK(line.t.front() == -24.0);
  CHECK(line.t.back() == 16.0);
  for (std::size_t i = 0; i < line.t.size(); ++i) {
    const Mat2d F = F0 + line.t[i] * 0.1 * e1e1;
    CHECK(line.v[i] == doctest::Approx(w_biot(F)).epsilon(1e-10));
  }
}

TEST_CASE("constrained rays keep the orientation-preserving segment") {
  const Grid4 g = build_grid(biot_density(), RocConfig::cube(0.1, 2.0));
  const Mat2d F0 = 0.4 * Mat2d::Identity();
  const Mat2d e1e1 = (Mat2d() << 1, 0, 0, 0).finished();

  // det(F0 + t e1e1) = (0.4 + t) * 0.4 > 0 <=> t > -0.4 <=> l >= -3
  const SampledCurve line = line_points(F0, e1e1, g, true);
  CHECK(line.t.front() == -3.0);
  CHECK(line.t.back() == 16.0);

  // determinant is constant along rays F * n with n = e1 tensor e2
  const Mat2d H = F0 * (Mat2d() << 0, 1, 0, 0).finished();
  for (double l : {-5.0, 0.0, 7.0}) {
    const Mat2d F = F0 + l * 0.1 * H;
    CHECK(F.determinant() == doctest::Approx(F0.determinant()).epsilon(1e-12));
  }

  const Mat2d refl = (Mat2d() << 1, 0, 0, -1).finished();
  CHECK_THROWS_AS((void)line_points(refl, e1e1, g, true), std::domain_error);
  CHECK_THROWS_AS((void)line_points(3.0 * Mat2d::Identity(), e1e1, g, false),
                  std::out_of_range);
}
