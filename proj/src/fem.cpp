#include <relax2d/fem.hpp>

#include <relax2d/parallel.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace relax2d {

namespace {

// 2x2 Gauss points on the reference square [-1,1]^2 (unit weights) and the
// reference gradients of the four bilinear shape functions at each point.
struct Quadrature {
  std::array<Vec2d, 4> xi;
  std::array<std::array<Vec2d, 4>, 4> dN;  // [gauss point][shape function]

  Quadrature() {
    const double g = 1.0 / std::sqrt(3.0);
    xi = {Vec2d(-g, -g), Vec2d(g, -g), Vec2d(g, g), Vec2d(-g, g)};
    for (int q = 0; q < 4; ++q) {
      const double x = xi[std::size_t(q)](0), y = xi[std::size_t(q)](1);
      // shape functions in CCW corner order (-1,-1), (1,-1), (1,1), (-1,1)
      dN[std::size_t(q)][0] = Vec2d(-(1 - y), -(1 - x)) / 4;
      dN[std::size_t(q)][1] = Vec2d((1 - y), -(1 + x)) / 4;
      dN[std::size_t(q)][2] = Vec2d((1 + y), (1 + x)) / 4;
      dN[std::size_t(q)][3] = Vec2d(-(1 + y), (1 - x)) / 4;
    }
  }
};

const Quadrature& quadrature() {
  static const Quadrature q;
  return q;
}

template <bool WithGradient>
void assemble_impl(const QuadMesh& mesh, const Mat2d& F0,
                   const DisplacementField& field, const EnergyDensity& W,
                   int threads, double& energy_out,
                   std::vector<Vec2d>* grad_out) {
  if (field.n != mesh.n ||
      field.theta.size() != std::size_t(mesh.node_count())) {
    throw std::invalid_argument("assemble_energy: field does not match mesh");
  }
  const Quadrature& Q = quadrature();
  const double jac = mesh.h() / 2;         // reference-to-physical scaling
  const double wdet = jac * jac;           // quadrature weight * Jacobian
  const int nw = resolve_threads(threads);
  const std::size_t ne = std::size_t(mesh.element_count());

  std::vector<double> energies(std::size_t(nw), 0.0);
  std::vector<std::vector<Vec2d>> grads;
  std::vector<std::ptrdiff_t> bad(std::size_t(nw), -1);
  if constexpr (WithGradient) {
    grads.assign(std::size_t(nw),
                 std::vector<Vec2d>(std::size_t(mesh.node_count()),
                                    Vec2d::Zero()));
  }

  parallel_chunks(ne, nw, [&](std::size_t b, std::size_t e, int worker) {
    double acc = 0;
    std::vector<Vec2d>* g =
        WithGradient ? &grads[std::size_t(worker)] : nullptr;
    for (std::size_t el = b; el < e; ++el) {
      const std::array<int, 4> nodes = mesh.element_nodes(int(el));
      for (int q = 0; q < 4; ++q) {
        Mat2d G = F0;
        for (int a = 0; a < 4; ++a) {
          // physical shape gradient = reference gradient / jac
          G += field.theta[std::size_t(nodes[std::size_t(a)])] *
               (Q.dN[std::size_t(q)][std::size_t(a)].transpose() / jac);
        }
        const double w = W(G);
        if (!std::isfinite(w)) {
          bad[std::size_t(worker)] = std::ptrdiff_t(el);
          return;
        }
        acc += wdet * w;
        if constexpr (WithGradient) {
          const Mat2d P = W.gradient(G);
          for (int a = 0; a < 4; ++a) {
            (*g)[std::size_t(nodes[std::size_t(a)])] +=
                wdet * (P * (Q.dN[std::size_t(q)][std::size_t(a)] / jac));
          }
        }
      }
    }
    energies[std::size_t(worker)] = acc;
  });

  for (int w = 0; w < nw; ++w) {
    if (bad[std::size_t(w)] >= 0) {
      throw NumericalError("assemble_energy: non-finite density at element " +
                           std::to_string(bad[std::size_t(w)]));
    }
  }

  energy_out = 0;
  for (int w = 0; w < nw; ++w) energy_out += energies[std::size_t(w)];
  if constexpr (WithGradient) {
    auto& g = *grad_out;
    g.assign(std::size_t(mesh.node_count()), Vec2d::Zero());
    for (int w = 0; w < nw; ++w) {
      for (std::size_t a = 0; a < g.size(); ++a) g[a] += grads[std::size_t(w)][a];
    }
    for (int a = 0; a < mesh.node_count(); ++a) {
      if (mesh.boundary_node(a)) g[std::size_t(a)].setZero();
    }
  }
}

}  // namespace

EnergyAndGradient assemble_energy(const QuadMesh& mesh, const Mat2d& F0,
                                  const DisplacementField& field,
                                  const EnergyDensity& W, int threads) {
  EnergyAndGradient out;
  assemble_impl<true>(mesh, F0, field, W, threads, out.energy, &out.gradient);
  return out;
}

double assemble_value(const QuadMesh& mesh, const Mat2d& F0,
                      const DisplacementField& field, const EnergyDensity& W,
                      int threads) {
  double energy = 0;
  assemble_impl<false>(mesh, F0, field, W, threads, energy, nullptr);
  return energy;
}

DetStats det_stats(const QuadMesh& mesh, const Mat2d& F0,
                   const DisplacementField& field) {
  const Quadrature& Q = quadrature();
  const double jac = mesh.h() / 2;
  DetStats stats;
  stats.min_det = std::numeric_limits<double>::infinity();
  stats.max_det = -std::numeric_limits<double>::infinity();
  for (int el = 0; el < mesh.element_count(); ++el) {
    const std::array<int, 4> nodes = mesh.element_nodes(el);
    for (int q = 0; q < 4; ++q) {
      Mat2d G = F0;
      for (int a = 0; a < 4; ++a) {
        G += field.theta[std::size_t(nodes[std::size_t(a)])] *
             (Q.dN[std::size_t(q)][std::size_t(a)].transpose() / jac);
      }
      const double det = G.determinant();
      stats.min_det = std::min(stats.min_det, det);
      stats.max_det = std::max(stats.max_det, det);
      if (!(det > 0)) ++stats.nonpositive_points;
    }
  }
  return stats;
}

namespace {

// Flat views over interior degrees of freedom only.
struct DofMap {
  std::vector<int> nodes;  // interior node ids

  explicit DofMap(const QuadMesh& mesh) {
    for (int a = 0; a < mesh.node_count(); ++a) {
      if (!mesh.boundary_node(a)) nodes.push_back(a);
    }
  }
  std::size_t size() const { return 2 * nodes.size(); }

  void scatter(const std::vector<double>& x, DisplacementField& f) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      f.theta[std::size_t(nodes[i])] = Vec2d(x[2 * i], x[2 * i + 1]);
    }
  }
  void gather(const std::vector<Vec2d>& nodal, std::vector<double>& x) const {
    x.resize(size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      x[2 * i] = nodal[std::size_t(nodes[i])](0);
      x[2 * i + 1] = nodal[std::size_t(nodes[i])](1);
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// positive root tau of |z + tau d| = radius
double boundary_tau(const std::vector<double>& z, const std::vector<double>& d,
                    double radius) {
  const double dd = dot(d, d);
  const double zd = dot(z, d);
  const double zz = dot(z, z);
  const double disc = std::max(zd * zd + dd * (radius * radius - zz), 0.0);
  return (-zd + std::sqrt(disc)) / dd;
}

}  // namespace

SolveReport minimize(const QuadMesh& mesh, const EnergyDensity& W,
                     const Mat2d& F0, const FemOptions& options,
                     DisplacementField& field) {
  options.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const DofMap dofs(mesh);

  if (options.use_initial_field) {
    if (field.n != mesh.n ||
        field.theta.size() != std::size_t(mesh.node_count())) {
      throw std::invalid_argument("minimize: initial field does not match mesh");
    }
    for (int a = 0; a < mesh.node_count(); ++a) {
      if (mesh.boundary_node(a)) field.theta[std::size_t(a)].setZero();
    }
  } else {
    field = DisplacementField::zero(mesh);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> uni(-options.perturbation,
                                               options.perturbation);
    std::vector<double> x(dofs.size());
    for (auto& xi : x) xi = uni(rng);
    dofs.scatter(x, field);
  }

  DisplacementField trial = field;
  std::vector<double> x, g, xs;
  dofs.gather(field.theta, x);

  const auto eval = [&](const std::vector<double>& at, DisplacementField& into,
                        std::vector<double>* grad) -> double {
    dofs.scatter(at, into);
    if (grad) {
      EnergyAndGradient eg =
          assemble_energy(mesh, F0, into, W, options.threads);
      dofs.gather(eg.gradient, *grad);
      return eg.energy;
    }
    return assemble_value(mesh, F0, into, W, options.threads);
  };

  // Hessian-vector product by central differences of the assembled gradient.
  std::vector<double> gp, gm, xt;
  const auto hvp = [&](const std::vector<double>& at, double xnorm,
                       const std::vector<double>& p,
                       std::vector<double>& out) {
    const double pn = norm(p);
    const double eps = 1e-6 * (1 + xnorm) / std::max(pn, 1e-300);
    xt = at;
    axpy(eps, p, xt);
    eval(xt, trial, &gp);
    xt = at;
    axpy(-eps, p, xt);
    eval(xt, trial, &gm);
    out.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i] = (gp[i] - gm[i]) / (2 * eps);
    }
  };

  SolveReport report;
  double f = eval(x, field, &g);
  double gn = norm(g);
  double radius = options.initial_radius;

  std::vector<double> z, r, d, Hd, p, Hp;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (gn <= options.gradient_tol) {
      report.converged = true;
      break;
    }
    if (radius < 1e-13) break;

    // --- Steihaug truncated CG on the local quadratic model ---
    const double xnorm = norm(x);
    z.assign(x.size(), 0.0);
    r = g;
    d = g;
    for (auto& v : d) v = -v;
    double rr = dot(r, r);
    const double forcing =
        std::min(0.5, std::sqrt(gn)) * gn;  // superlinear forcing sequence
    bool on_boundary = false;
    p = z;
    for (int cg = 0; cg < options.max_cg_iterations; ++cg) {
      hvp(x, xnorm, d, Hd);
      const double dHd = dot(d, Hd);
      if (dHd <= 0) {
        const double tau = boundary_tau(z, d, radius);
        p = z;
        axpy(tau, d, p);
        on_boundary = true;
        break;
      }
      const double alpha = rr / dHd;
      xs = z;
      axpy(alpha, d, xs);
      if (norm(xs) >= radius) {
        const double tau = boundary_tau(z, d, radius);
        p = z;
        axpy(tau, d, p);
        on_boundary = true;
        break;
      }
      z = xs;
      axpy(alpha, Hd, r);
      const double rr_new = dot(r, r);
      p = z;
      if (std::sqrt(rr_new) <= forcing) break;
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = -r[i] + beta * d[i];
    }

    const double pn = norm(p);
    if (pn == 0) {
      report.converged = true;
      break;
    }
    hvp(x, xnorm, p, Hp);
    const double predicted = -(dot(g, p) + 0.5 * dot(p, Hp));
    if (!(predicted > 0)) {
      radius /= 4;
      continue;
    }

    xt = x;
    axpy(1.0, p, xt);
    const double ft = eval(xt, trial, nullptr);
    const double rho = (f - ft) / predicted;

    if (rho > 0.05 && ft < f) {
      x = xt;
      f = eval(x, field, &g);
      gn = norm(g);
    }
    if (rho < 0.25) {
      radius = std::max(pn / 4, 1e-14);
    } else if (rho > 0.75 && on_boundary) {
      radius = std::min(2 * radius, options.max_radius);
    }
  }

  dofs.scatter(x, field);
  // boundary values must have stayed exactly zero
  for (int a = 0; a < mesh.node_count(); ++a) {
    if (mesh.boundary_node(a) &&
        field.theta[std::size_t(a)].squaredNorm() != 0) {
      throw NumericalError("minimize: boundary condition violated");
    }
  }

  report.energy = f;
  report.energy_per_area = f / mesh.area();
  report.gradient_norm = gn;
  report.iterations = iter;
  report.dets = det_stats(mesh, F0, field);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

}  // namespace relax2d
