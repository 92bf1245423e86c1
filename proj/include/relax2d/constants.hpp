#pragma once

// Shared numerical tolerances. Every module pulls its thresholds from this
// table so that a tolerance is never re-declared (or silently diverges)
// at a use site.

namespace relax2d::tol {

// Frame-indifference / isotropy identities W(Q1 F Q2) == W(F).
inline constexpr double kInvarianceIdentity = 1e-10;

// Agreement between two independent evaluation paths of the same quantity
// (e.g. envelope formula vs. eigenvalue-case oracle).
inline constexpr double kOracleEquality = 1e-12;

// Directional finite-difference gradient checks: relative mismatch and step.
inline constexpr double kGradientCheckRel = 1e-5;
inline constexpr double kGradientCheckStep = 1e-6;

// Rank-one chord inequalities and lattice envelope values.
inline constexpr double kRankOneChord = 1e-9;

// Per-sweep early-stop threshold and lower-hull slack of the lattice solver.
inline constexpr double kSweepEarlyStop = 1e-12;
inline constexpr double kLatticeSlack = 1e-12;

// Rank-one compatibility of laminate splits (|det(F2 - F1)| scale-relative).
inline constexpr double kLaminateRankOne = 1e-10;

// Mean deformation gradient of a reconstructed microstructure vs. its
// prescribed average.
inline constexpr double kMeanGradient = 1e-10;

// Energy of laminate leaves vs. the relaxed value they certify.
inline constexpr double kLaminateEnergy = 1e-9;

// Distance to a non-smooth set below which analytic gradients defer to
// finite differences.
inline constexpr double kKinkGuard = 1e-8;

}  // namespace relax2d::tol
