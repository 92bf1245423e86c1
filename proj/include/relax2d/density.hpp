#pragma once

#include <relax2d/energy.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

// Runtime wrapper around an energy density: a named value map W(F) with an
// optional analytic gradient and a finite-difference fallback.  The grid
// solver, the mesh minimiser and the command-line tool all consume densities
// through this type, so penalisation and user selection compose uniformly.

namespace relax2d {

// Orientation penalty appended to a density:
//   W_pen(F) = W(F)                        if det F > 0,
//   W_pen(F) = W(F) + k (-det F)^exponent  otherwise.
struct PenaltyConfig {
  double k = 1e5;
  int exponent = 1;  // 1: kinked at det = 0; 2: C^1 across det = 0

  void validate() const {
    if (!(k > 0)) throw std::invalid_argument("PenaltyConfig: k must be > 0");
    if (exponent != 1 && exponent != 2) {
      throw std::invalid_argument("PenaltyConfig: exponent must be 1 or 2");
    }
  }
};

class EnergyDensity {
 public:
  using ValueFn = std::function<double(const Mat2d&)>;
  using GradientFn = std::function<Mat2d(const Mat2d&)>;

  EnergyDensity(std::string name, ValueFn value, GradientFn gradient = {})
      : name_(std::move(name)),
        value_(std::move(value)),
        gradient_(std::move(gradient)) {
    if (!value_) throw std::invalid_argument("EnergyDensity: empty value map");
  }

  const std::string& name() const { return name_; }
  double operator()(const Mat2d& F) const { return value_(F); }

  bool has_gradient() const { return static_cast<bool>(gradient_); }

  // Analytic gradient if available, otherwise central differences.
  Mat2d gradient(const Mat2d& F) const {
    return gradient_ ? gradient_(F) : fd_gradient(F);
  }

  Mat2d fd_gradient(const Mat2d& F,
                    double step = tol::kGradientCheckStep) const {
    Mat2d g;
    Mat2d Fp = F, Fm = F;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        Fp(i, j) += step;
        Fm(i, j) -= step;
        g(i, j) = (value_(Fp) - value_(Fm)) / (2 * step);
        Fp(i, j) = F(i, j);
        Fm(i, j) = F(i, j);
      }
    }
    return g;
  }

 private:
  std::string name_;
  ValueFn value_;
  GradientFn gradient_;
};

namespace detail {

// Wraps an analytic gradient so that evaluations within tol::kKinkGuard of
// the density's non-smooth set defer to symmetric differences of the value
// map.  `kink_distance` returns a scale-relative distance measure.
inline EnergyDensity::GradientFn guarded_gradient(
    EnergyDensity::ValueFn value, EnergyDensity::GradientFn analytic,
    std::function<double(const Mat2d&)> kink_distance) {
  return [value = std::move(value), analytic = std::move(analytic),
          kink_distance = std::move(kink_distance)](const Mat2d& F) -> Mat2d {
    if (kink_distance(F) < tol::kKinkGuard) {
      EnergyDensity tmp("fd", value);
      return tmp.fd_gradient(F);
    }
    return analytic(F);
  };
}

inline double scale2(const Mat2d& F) { return 1.0 + F.squaredNorm(); }

}  // namespace detail

// --- factories ---------------------------------------------------------

inline EnergyDensity biot_density() {
  EnergyDensity::ValueFn v = [](const Mat2d& F) { return w_biot(F); };
  return EnergyDensity(
      "biot", v,
      detail::guarded_gradient(
          v, [](const Mat2d& F) { return w_biot_gradient(F); },
          [](const Mat2d& F) {
            return std::abs(F.determinant()) / detail::scale2(F);
          }));
}

inline EnergyDensity dist_density() {
  EnergyDensity::ValueFn v = [](const Mat2d& F) { return w_dist(F); };
  return EnergyDensity(
      "dist", v,
      detail::guarded_gradient(
          v, [](const Mat2d& F) { return w_dist_gradient(F); },
          [](const Mat2d& F) {
            const double q = F.squaredNorm() + 2 * F.determinant();
            return std::max(q, 0.0) / detail::scale2(F);
          }));
}

inline EnergyDensity q_biot_density() {
  EnergyDensity::ValueFn v = [](const Mat2d& F) {
    return q_biot_unconstrained(F);
  };
  return EnergyDensity(
      "q_biot", v,
      detail::guarded_gradient(
          v, [](const Mat2d& F) { return q_biot_gradient(F); },
          [](const Mat2d& F) {
            const SingularPair<double> sv = singular_values(F);
            const double conical =
                sv.lambda1 > 1 ? (sv.lambda1 - sv.lambda2) : 1.0;
            return std::min(std::abs(F.determinant()) / detail::scale2(F),
                            conical);
          }));
}

inline EnergyDensity q_dist_density() {
  EnergyDensity::ValueFn v = [](const Mat2d& F) {
    return q_dist_unconstrained(F);
  };
  // Smooth everywhere (the q = 1 seam is C^1), no guard needed.
  return EnergyDensity("q_dist", v,
                       [](const Mat2d& F) { return q_dist_gradient(F); });
}

inline EnergyDensity seth_hill_density(double m) {
  return EnergyDensity("seth_hill(" + std::to_string(m) + ")",
                       [m](const Mat2d& F) { return seth_hill_energy(F, m); });
}

// Compose a density with the orientation penalty.  The analytic gradient
// adds k * e * (-det F)^{e-1} * (-cof F) on det F < 0 and keeps the guard of
// the underlying density; the det = 0 seam itself is covered by the guard.
inline EnergyDensity penalize(const EnergyDensity& W, PenaltyConfig cfg) {
  cfg.validate();
  EnergyDensity::ValueFn v = [W, cfg](const Mat2d& F) {
    const double det = F.determinant();
    if (det > 0) return W(F);
    const double p = cfg.exponent == 1 ? -det : det * det;
    return W(F) + cfg.k * p;
  };
  EnergyDensity::GradientFn g;
  if (W.has_gradient()) {
    g = detail::guarded_gradient(
        v,
        [W, cfg](const Mat2d& F) -> Mat2d {
          const double det = F.determinant();
          Mat2d base = W.gradient(F);
          if (det < 0) {
            const double dp =
                cfg.exponent == 1 ? 1.0 : -2.0 * det;  // d(-det)^e / d(-det)
            base -= cfg.k * dp * cofactor(F);
          }
          return base;
        },
        [](const Mat2d& F) {
          return std::abs(F.determinant()) / detail::scale2(F);
        });
  }
  return EnergyDensity(
      W.name() + "+penalty(k=" + std::to_string(cfg.k) +
          ",e=" + std::to_string(cfg.exponent) + ")",
      std::move(v), std::move(g));
}

// Lookup used by the command-line tool; understands "biot", "dist",
// "q_biot", "q_dist" and "seth_hill:<m>".
inline EnergyDensity density_by_name(
    const std::string& name,
    const std::optional<PenaltyConfig>& penalty = std::nullopt) {
  EnergyDensity base = [&]() -> EnergyDensity {
    if (name == "biot") return biot_density();
    if (name == "dist") return dist_density();
    if (name == "q_biot") return q_biot_density();
    if (name == "q_dist") return q_dist_density();
    constexpr std::string_view kPrefix = "seth_hill:";
    if (name.rfind(kPrefix, 0) == 0) {
      return seth_hill_density(std::stod(name.substr(kPrefix.size())));
    }
    throw std::invalid_argument("unknown energy density: " + name);
  }();
  if (penalty) return penalize(base, *penalty);
  return base;
}

}  // namespace relax2d
