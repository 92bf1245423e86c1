#include <relax2d/microstructure.hpp>

#include <relax2d/constants.hpp>

#include <cmath>
#include <stdexcept>

namespace relax2d {

namespace {

// Split geometry: F2 - F1 = a n^T with |n| = 1.
struct Interface {
  Vec2d a;
  Vec2d n;
  double lambda;  // volume fraction of child 1
};

Interface split_geometry(const LaminationNode& node) {
  const Mat2d D = node.children[1].F - node.children[0].F;
  const Vec2d row0 = D.row(0).transpose();
  const Vec2d row1 = D.row(1).transpose();
  const Vec2d nraw = row0.norm() >= row1.norm() ? row0 : row1;
  const double scale = std::max(1.0, D.squaredNorm());
  if (nraw.norm() <= 0 ||
      std::abs(D.determinant()) > tol::kLaminateRankOne * scale) {
    throw std::invalid_argument(
        "reconstruct_microstructure: split is not rank-one compatible");
  }
  Interface itf;
  itf.n = nraw.normalized();
  itf.a = D * itf.n;
  if ((itf.a * itf.n.transpose() - D).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, D.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(
        "reconstruct_microstructure: split is not rank-one compatible");
  }
  itf.lambda = node.children[0].weight;
  if (!(itf.lambda > 0 && itf.lambda < 1)) {
    throw std::invalid_argument(
        "reconstruct_microstructure: split weights must lie in (0,1)");
  }
  const Mat2d mean = itf.lambda * node.children[0].F +
                     (1 - itf.lambda) * node.children[1].F;
  if ((mean - node.F).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, node.F.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(
        "reconstruct_microstructure: split weights do not reproduce the "
        "parent state");
  }
  return itf;
}

// Continuous 1-periodic sawtooth with slope -(1-lambda) on [0, lambda) and
// +lambda on [lambda, 1); zero mean slope, zero at integers.
inline double sawtooth(double u, double lambda) {
  if (u < lambda) return -(1 - lambda) * u;
  return -(1 - lambda) * lambda + lambda * (u - lambda);
}

// Oscillating displacement of the subtree rooted at `node` evaluated at x;
// descends only into the phase strip containing x.
Vec2d laminate_displacement(const LaminationNode& node, const Vec2d& x,
                            int frequency, int depth) {
  if (node.leaf()) return Vec2d::Zero();
  const Interface itf = split_geometry(node);
  const double f = std::pow(double(frequency), double(depth + 1));
  const double s = f * itf.n.dot(x);
  const double u = s - std::floor(s);
  const Vec2d here = itf.a * (sawtooth(u, itf.lambda) / f);
  const LaminationNode& phase =
      u < itf.lambda ? node.children[0] : node.children[1];
  return here + laminate_displacement(phase, x, frequency, depth + 1);
}

void flag_reversed(const LaminationNode& node, bool& flag) {
  if (node.leaf()) {
    if (!(node.F.determinant() > 0)) flag = true;
    return;
  }
  for (const auto& c : node.children) flag_reversed(c, flag);
}

}  // namespace

Vec2d laminate_deviation(const LaminationTree& tree, const Vec2d& x,
                         int frequency) {
  if (frequency < 1) {
    throw std::invalid_argument("laminate_deviation: frequency must be >= 1");
  }
  return laminate_displacement(tree.root, x, frequency, 0);
}

Mat2d MicrostructureField::mean_gradient() const {
  Mat2d acc = Mat2d::Zero();
  for (const Mat2d& G : cell_gradients) acc += G;
  return acc / double(cell_gradients.size());
}

MicrostructureField reconstruct_microstructure(const LaminationTree& tree,
                                               int frequency, int resolution) {
  if (frequency < 1) {
    throw std::invalid_argument(
        "reconstruct_microstructure: frequency must be >= 1");
  }
  if (resolution < 2) {
    throw std::invalid_argument(
        "reconstruct_microstructure: resolution must be >= 2");
  }

  MicrostructureField field;
  field.resolution = resolution;
  field.F0 = tree.root.F;
  flag_reversed(tree.root, field.has_reversed_leaf);

  const int res = resolution;
  field.phi.resize(std::size_t(res) * std::size_t(res));
  for (int iy = 0; iy < res; ++iy) {
    for (int ix = 0; ix < res; ++ix) {
      const Vec2d x = field.node_coord(ix, iy);
      Vec2d p = field.F0 * x;
      const bool boundary = ix == 0 || iy == 0 || ix == res - 1 || iy == res - 1;
      if (!boundary) {
        p += laminate_displacement(tree.root, x, frequency, 0);
      }
      field.phi[std::size_t(iy) * std::size_t(res) + std::size_t(ix)] = p;
    }
  }

  const double h = field.spacing();
  const int nc = res - 1;
  field.cell_gradients.resize(std::size_t(nc) * std::size_t(nc));
  field.cell_dets.resize(field.cell_gradients.size());
  const auto at = [&](int ix, int iy) -> const Vec2d& {
    return field.phi[std::size_t(iy) * std::size_t(res) + std::size_t(ix)];
  };
  for (int iy = 0; iy < nc; ++iy) {
    for (int ix = 0; ix < nc; ++ix) {
      // Gradient of the bilinear interpolant at the cell centre.
      const Vec2d dx =
          (at(ix + 1, iy) + at(ix + 1, iy + 1) - at(ix, iy) - at(ix, iy + 1)) /
          (2 * h);
      const Vec2d dy =
          (at(ix, iy + 1) + at(ix + 1, iy + 1) - at(ix, iy) - at(ix + 1, iy)) /
          (2 * h);
      Mat2d G;
      G.col(0) = dx;
      G.col(1) = dy;
      const std::size_t c = std::size_t(iy) * std::size_t(nc) + std::size_t(ix);
      field.cell_gradients[c] = G;
      field.cell_dets[c] = G.determinant();
      if (!(field.cell_dets[c] > 0)) ++field.negative_det_cells;
    }
  }
  return field;
}

}  // namespace relax2d
