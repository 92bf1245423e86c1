#include <relax2d/lamination.hpp>

#include <relax2d/parallel.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace relax2d {

namespace {

struct DirectionData {
  long steps[4];          // integer lattice steps per unit l
  std::ptrdiff_t stride;  // linear-index step per unit l
};

// Integer range of l keeping index_j + l * steps_j inside [0, shape_j).
// Both bounds are exact integer computations.
inline void axis_range(const std::array<int, 4>& idx,
                       const std::array<int, 4>& shape, const long* steps,
                       long& lmin, long& lmax) {
  lmin = std::numeric_limits<long>::min() / 4;
  lmax = std::numeric_limits<long>::max() / 4;
  for (int j = 0; j < 4; ++j) {
    const long n = steps[j];
    if (n == 0) continue;
    const long i = idx[std::size_t(j)];
    const long room_up = shape[std::size_t(j)] - 1 - i;
    if (n > 0) {
      lmax = std::min(lmax, room_up / n);
      lmin = std::max(lmin, -(i / n));
    } else {
      const long m = -n;
      lmax = std::min(lmax, i / m);
      lmin = std::max(lmin, -(room_up / m));
    }
  }
}

// Lower-hull chord value at l = 0 for samples (l, v), lmin <= 0 <= lmax.
// Returns the hull value and the supporting pair (relative to lmin).
struct HullAtZero {
  double value;
  long l1, l2;
};

inline HullAtZero hull_at_zero(const double* v, long lmin, long lmax,
                               std::vector<long>& stack) {
  stack.clear();
  const long n = lmax - lmin + 1;
  for (long i = 0; i < n; ++i) {
    const double vi = v[i];
    while (stack.size() >= 2) {
      const long a = stack[stack.size() - 2];
      const long b = stack[stack.size() - 1];
      // pop b when it lies strictly above the chord a--i
      const double cross =
          double(b - a) * (vi - v[a]) - double(i - a) * (v[b] - v[a]);
      if (cross < 0) {
        stack.pop_back();
      } else {
        break;
      }
    }
    stack.push_back(i);
  }
  // locate the hull segment containing l = 0 (offset index -lmin)
  const long zero = -lmin;
  std::size_t klo = 0, khi = stack.size() - 1;
  while (khi - klo > 1) {
    const std::size_t mid = (klo + khi) / 2;
    if (stack[mid] <= zero) {
      klo = mid;
    } else {
      khi = mid;
    }
  }
  if (stack[klo] == zero || stack[khi] == zero) {
    return {v[zero], 0, 0};  // the node itself is a hull vertex
  }
  const long a = stack[klo];
  const long b = stack[khi];
  const double la = double(a + lmin);
  const double lb = double(b + lmin);
  const double c = (v[a] * lb - v[b] * la) / (lb - la);
  return {c, a + lmin, b + lmin};
}

}  // namespace

RocResult roc_iterate(Grid4 grid, const std::vector<Mat2d>& dirs,
                      const RocConfig& cfg) {
  cfg.validate();
  if (dirs.empty()) {
    throw std::invalid_argument("roc_iterate: empty direction set");
  }
  const std::size_t n = grid.size();

  // Budget: double buffer plus (optionally) per-sweep records.
  {
    const std::size_t record_bytes =
        cfg.record_minimizers
            ? n * sizeof(MinimizerRecord) * std::size_t(cfg.k_max)
            : 0;
    const std::size_t bytes = 2 * n * sizeof(double) + record_bytes;
    if (bytes > cfg.memory_budget_bytes) {
      throw ResourceLimitError(
          "roc_iterate: run needs " + std::to_string(bytes) +
              " bytes, budget is " + std::to_string(cfg.memory_budget_bytes),
          bytes, cfg.memory_budget_bytes);
    }
  }

  std::vector<DirectionData> dd(dirs.size());
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    std::ptrdiff_t stride = 0;
    const Mat2d& R = dirs[d];
    const double entries[4] = {R(0, 0), R(0, 1), R(1, 0), R(1, 1)};
    for (int j = 0; j < 4; ++j) {
      const double e = entries[j];
      const long le = std::lround(e);
      if (std::abs(e - double(le)) > 1e-12) {
        throw std::invalid_argument(
            "roc_iterate: direction entries must be integers (lattice steps)");
      }
      dd[d].steps[j] = le;
      stride += le * grid.strides()[std::size_t(j)];
    }
    if (dd[d].steps[0] * dd[d].steps[3] != dd[d].steps[1] * dd[d].steps[2]) {
      throw std::invalid_argument("roc_iterate: direction is not rank-one");
    }
    dd[d].stride = stride;
  }

  RocResult result;
  result.initial = grid.values();
  result.directions = dirs;
  result.config = cfg;

  const int threads = resolve_threads(cfg.threads);
  const double delta = grid.delta();
  const auto& shape = grid.shape();

  std::vector<double> next(n);
  std::vector<double> node_det;  // cached det at every node (constrained mode)
  if (cfg.constrained) {
    node_det.resize(n);
    for (std::size_t lin = 0; lin < n; ++lin) {
      node_det[lin] = grid.matrix_at(lin).determinant();
    }
  }

  for (int sweep = 1; sweep <= cfg.k_max; ++sweep) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double>& cur = grid.values();
    std::vector<MinimizerRecord>* rec_sweep = nullptr;
    if (cfg.record_minimizers) {
      result.records.emplace_back(n);
      rec_sweep = &result.records.back();
    }

    std::vector<double> chunk_max(std::size_t(threads), 0.0);
    parallel_chunks(n, threads, [&](std::size_t bidx, std::size_t eidx,
                                    int worker) {
      std::vector<double> scratch;
      scratch.reserve(128);
      std::vector<long> stack;
      stack.reserve(128);
      double local_max = 0;
      for (std::size_t lin = bidx; lin < eidx; ++lin) {
        const std::array<int, 4> idx = grid.unravel(lin);
        const double v0 = cur[lin];
        double det0 = 0;
        Mat2d cof;
        if (cfg.constrained) {
          det0 = node_det[lin];
          if (!(det0 > 0)) {
            next[lin] = v0;  // node outside the admissible set: frozen
            continue;
          }
          cof = cofactor(grid.matrix_at(idx));
        }

        double best = v0;
        MinimizerRecord rec;
        for (std::size_t d = 0; d < dd.size(); ++d) {
          long lmin, lmax;
          axis_range(idx, shape, dd[d].steps, lmin, lmax);
          if (cfg.constrained && (lmin < 0 || lmax > 0)) {
            // det is affine along the ray; trim to the contiguous
            // positive segment around l = 0.
            const Mat2d& R = dirs[d];
            const double slope = delta * (cof.array() * R.array()).sum();
            long up = 0;
            while (up + 1 <= lmax && det0 + double(up + 1) * slope > 0) ++up;
            long dn = 0;
            while (dn - 1 >= lmin && det0 + double(dn - 1) * slope > 0) --dn;
            lmin = dn;
            lmax = up;
          }
          if (lmin == lmax) continue;
          const long len = lmax - lmin + 1;
          scratch.resize(std::size_t(len));
          {
            const double* src = cur.data() + std::ptrdiff_t(lin) +
                                lmin * dd[d].stride;
            const std::ptrdiff_t stride = dd[d].stride;
            for (long i = 0; i < len; ++i) scratch[std::size_t(i)] = src[i * stride];
          }
          const HullAtZero h =
              hull_at_zero(scratch.data(), lmin, lmax, stack);
          if (h.l1 == h.l2) continue;  // node on the hull: no mixture
          if (h.value < best - tol::kOracleEquality) {
            best = h.value;
            rec.dir = std::int16_t(d);
            rec.l1 = std::int16_t(h.l1);
            rec.l2 = std::int16_t(h.l2);
            rec.ties = 0;
          } else if (rec.dir >= 0 && h.value <= best + tol::kOracleEquality) {
            ++rec.ties;  // annotated, never resolved
          } else if (h.value < best) {
            best = h.value;  // sub-tolerance improvement, not worth a record
          }
        }

        const double improvement = v0 - best;
        if (improvement > 0) {
          next[lin] = best;
          local_max = std::max(local_max, improvement);
        } else {
          next[lin] = v0;
        }
        if (rec_sweep && improvement > cfg.early_stop) {
          (*rec_sweep)[lin] = rec;
        }
      }
      chunk_max[std::size_t(worker)] = local_max;
    });

    grid.values().swap(next);
    const double max_decrease =
        *std::max_element(chunk_max.begin(), chunk_max.end());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.trace.push_back({sweep, max_decrease, seconds});
    if (max_decrease <= cfg.early_stop) break;
  }

  result.grid = std::move(grid);
  return result;
}

namespace {

LaminationNode build_node(const RocResult& res, std::size_t lin, int level) {
  for (int k = level; k >= 1; --k) {
    const MinimizerRecord rec = res.records[std::size_t(k - 1)][lin];
    if (rec.dir < 0) continue;

    const Mat2d& R = res.directions[std::size_t(rec.dir)];
    const double delta = res.grid.delta();
    std::ptrdiff_t stride = 0;
    for (int j = 0; j < 4; ++j) {
      stride += std::lround(R(j / 2, j % 2)) * res.grid.strides()[std::size_t(j)];
    }
    const double l1 = rec.l1, l2 = rec.l2;
    const double lambda = l2 / (l2 - l1);  // weight of the l1 endpoint

    LaminationNode node;
    node.F = res.grid.matrix_at(lin);
    node.direction = R;
    node.ties = rec.ties;

    LaminationNode c1 = build_node(
        res, std::size_t(std::ptrdiff_t(lin) + rec.l1 * stride), k - 1);
    LaminationNode c2 = build_node(
        res, std::size_t(std::ptrdiff_t(lin) + rec.l2 * stride), k - 1);
    c1.weight = lambda;
    c2.weight = 1 - lambda;
    c1.F = node.F + l1 * delta * R;  // equals the lattice node it came from
    c2.F = node.F + l2 * delta * R;
    node.value = lambda * c1.value + (1 - lambda) * c2.value;
    node.children.push_back(std::move(c1));
    node.children.push_back(std::move(c2));
    return node;
  }
  LaminationNode leaf;
  leaf.F = res.grid.matrix_at(lin);
  leaf.value = res.initial[lin];
  return leaf;
}

void collect_leaves(const LaminationNode& node, double cumulative,
                    std::vector<LaminationTree::Leaf>& out) {
  if (node.leaf()) {
    out.push_back({cumulative, &node});
    return;
  }
  for (const auto& c : node.children) {
    collect_leaves(c, cumulative * c.weight, out);
  }
}

int node_depth(const LaminationNode& node) {
  int d = 0;
  for (const auto& c : node.children) d = std::max(d, 1 + node_depth(c));
  return d;
}

}  // namespace

std::vector<LaminationTree::Leaf> LaminationTree::leaves() const {
  std::vector<Leaf> out;
  collect_leaves(root, 1.0, out);
  return out;
}

int LaminationTree::depth() const { return node_depth(root); }

LaminationTree extract_laminates(const RocResult& result, const Mat2d& F0,
                                 double lattice_tol) {
  if (!result.config.record_minimizers || result.records.empty()) {
    throw std::invalid_argument(
        "extract_laminates: run was made without minimizer records");
  }
  const auto idx = result.grid.lattice_index(F0, lattice_tol);
  if (!idx) {
    throw std::invalid_argument(
        "extract_laminates: F0 does not hit the lattice");
  }
  LaminationTree tree;
  tree.sweeps = int(result.records.size());
  tree.root = build_node(result, result.grid.linear(*idx), tree.sweeps);
  tree.root.weight = 1.0;
  return tree;
}

}  // namespace relax2d
