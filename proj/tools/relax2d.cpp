// Command-line surface of the relaxation toolkit: analytic envelope
// evaluation, lattice rank-one convexification runs, mesh-based energy
// minimisation, a method-comparison table and plot-data emission.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 resource-limit refusal.

#include <relax2d/convexify.hpp>
#include <relax2d/density.hpp>
#include <relax2d/energy.hpp>
#include <relax2d/errors.hpp>
#include <relax2d/fem.hpp>
#include <relax2d/grid.hpp>
#include <relax2d/io.hpp>
#include <relax2d/lamination.hpp>
#include <relax2d/microstructure.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace relax2d;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where +
                        " config (known keys: " + known + ")");
    }
  }
}

double get_double(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ConfigError("config key \"" + key + "\" must be a number");
  }
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw ConfigError("config key \"" + key + "\" must be an integer");
  }
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) {
    throw ConfigError("config key \"" + key + "\" must be a boolean");
  }
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) {
    throw ConfigError("config key \"" + key + "\" must be a string");
  }
  return j.at(key).get<std::string>();
}

// "F0": [a11, a12, a21, a22], row-major.
Mat2d get_f0(const json& j, const Mat2d& fallback) {
  if (!j.contains("F0")) return fallback;
  const json& v = j.at("F0");
  if (!v.is_array() || v.size() != 4) {
    throw ConfigError("config key \"F0\" must be an array of 4 numbers");
  }
  Mat2d F;
  for (int i = 0; i < 4; ++i) {
    if (!v[std::size_t(i)].is_number()) {
      throw ConfigError("config key \"F0\" must be an array of 4 numbers");
    }
    F(i / 2, i % 2) = v[std::size_t(i)].get<double>();
  }
  if (!F.allFinite()) throw ConfigError("F0 must be finite");
  return F;
}

// Named density with optional penalty parameters (for "biot_penalized").
EnergyDensity make_density(const std::string& name, double k, int exponent) {
  if (name == "biot_penalized") {
    PenaltyConfig pen{k, exponent};
    pen.validate();
    return penalize(biot_density(), pen);
  }
  try {
    return density_by_name(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
  return p;
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string describe(const Mat2d& F) {
  return "[" + fmt6(F(0, 0)) + ", " + fmt6(F(0, 1)) + "; " + fmt6(F(1, 0)) +
         ", " + fmt6(F(1, 1)) + "]";
}

// ---------------------------------------------------------------------------
// envelope: analytic point values at F0
// ---------------------------------------------------------------------------

int cmd_envelope(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg, {"F0"}, "envelope");
  const Mat2d F0 = get_f0(cfg, Mat2d::Identity() * 0.4);

  const double wb = w_biot(F0);
  const double wd = w_dist(F0);
  const double qb = q_biot_unconstrained(F0);
  const double qd = q_dist_unconstrained(F0);
  const double oracle = q_biot_pipkin_oracle(F0);
  std::optional<double> qg;
  try {
    qg = q_glp(F0);
  } catch (const std::domain_error&) {
    qg.reset();
  }

  std::printf("F0 = %s  (det = %s)\n", describe(F0).c_str(),
              fmt6(F0.determinant()).c_str());
  std::printf("  %-28s %s\n", "w_biot", fmt6(wb).c_str());
  std::printf("  %-28s %s\n", "w_dist", fmt6(wd).c_str());
  std::printf("  %-28s %s\n", "q_biot_unconstrained", fmt6(qb).c_str());
  std::printf("  %-28s %s\n", "q_dist_unconstrained", fmt6(qd).c_str());
  std::printf("  %-28s %s\n", "q_glp",
              qg ? fmt6(*qg).c_str() : "domain error (det F0 <= 0)");
  std::printf("  %-28s %s\n", "q_biot_pipkin_oracle", fmt6(oracle).c_str());

  const fs::path out = prepare_out(args.out_dir);
  io::CsvTable t;
  t.comments.push_back("# analytic energies and envelopes at F0 = " +
                       describe(F0));
  t.header = {"w_biot",
              "w_dist",
              "q_biot_unconstrained",
              "q_dist_unconstrained",
              "q_glp",
              "q_biot_pipkin_oracle"};
  t.add_row({io::format_double(wb), io::format_double(wd),
             io::format_double(qb), io::format_double(qd),
             qg ? io::format_double(*qg) : "domain_error",
             io::format_double(oracle)});
  t.write_file(out / "envelope.csv");
  std::printf("wrote %s\n", (out / "envelope.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// roc: lattice convexification -> laminate tree -> microstructure
// ---------------------------------------------------------------------------

// Analytic reference for a run, when one is known.
std::optional<double> analytic_reference(const std::string& energy,
                                         bool constrained, const Mat2d& F0) {
  try {
    if (constrained) return q_glp(F0);
    if (energy == "biot") return q_biot_unconstrained(F0);
    if (energy == "dist") return q_dist_unconstrained(F0);
  } catch (const std::domain_error&) {
  }
  return std::nullopt;
}

int cmd_roc(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg,
             {"F0", "energy", "k", "exponent", "constrained", "delta",
              "radius", "k_max", "early_stop", "direction_order",
              "record_minimizers", "frequency", "resolution",
              "memory_budget_bytes"},
             "roc");

  const Mat2d F0 = get_f0(cfg, Mat2d::Identity() * 0.4);
  const std::string energy = get_string(cfg, "energy", "biot");
  const bool constrained = get_bool(cfg, "constrained", false);
  const double delta = get_double(cfg, "delta", 0.1);
  const double radius = get_double(cfg, "radius", 2.0);
  const EnergyDensity W =
      make_density(energy, get_double(cfg, "k", 1e5), get_int(cfg, "exponent", 1));

  RocConfig rc = constrained ? RocConfig::compression_box(delta)
                             : RocConfig::cube(delta, radius);
  rc.k_max = get_int(cfg, "k_max", 10);
  rc.early_stop = get_double(cfg, "early_stop", rc.early_stop);
  rc.direction_order = get_int(cfg, "direction_order", 1);
  rc.record_minimizers = get_bool(cfg, "record_minimizers", true);
  if (cfg.contains("memory_budget_bytes")) {
    rc.memory_budget_bytes =
        std::size_t(get_double(cfg, "memory_budget_bytes", 0));
  }
  rc.threads = args.threads;
  rc.validate();

  const fs::path out = prepare_out(args.out_dir);

  std::printf("building lattice (delta = %s, %s)\n", fmt6(delta).c_str(),
              constrained ? "orientation-constrained compression box"
                          : ("cube radius " + fmt6(radius)).c_str());
  Grid4 grid = build_grid(W, rc);
  if (!grid.inside(F0)) {
    throw ConfigError("F0 = " + describe(F0) + " lies outside the lattice box");
  }
  std::printf("lattice nodes: %zu, directions of order %d: %zu\n", grid.size(),
              rc.direction_order, directions(rc.direction_order).size());

  RocResult result = roc_iterate(std::move(grid), directions(rc.direction_order), rc);

  const double value = result.value_at(F0);
  const auto reference = analytic_reference(energy, constrained, F0);
  std::printf("sweeps run: %zu", result.trace.size());
  if (!result.trace.empty()) {
    std::printf(", final max decrease %s",
                fmt6(result.trace.back().max_decrease).c_str());
  }
  std::printf("\nrelaxed value at F0 %s: %s\n", describe(F0).c_str(),
              fmt6(value).c_str());
  if (reference) {
    std::printf("analytic envelope:  %s   |difference| = %s\n",
                fmt6(*reference).c_str(), fmt6(std::abs(value - *reference)).c_str());
  }

  io::write_grid(out / "roc_grid", result.grid, result.trace);
  std::printf("wrote %s{.bin,.meta.csv,.trace.csv}\n",
              (out / "roc_grid").c_str());

  if (rc.record_minimizers) {
    const LaminationTree tree = extract_laminates(result, F0);
    io::write_tree(out / "roc_tree.json", tree);
    std::printf("laminate tree: depth %d, %zu leaves -> %s\n", tree.depth(),
                tree.leaves().size(), (out / "roc_tree.json").c_str());

    const int frequency = get_int(cfg, "frequency", 10);
    const int resolution = get_int(cfg, "resolution", 201);
    const MicrostructureField field =
        reconstruct_microstructure(tree, frequency, resolution);
    io::write_microstructure_csv(out / "microstructure.csv", field);
    io::write_microstructure_vtk(out / "microstructure.vtk", field);
    std::printf("microstructure (frequency %d, %dx%d nodes) -> %s{.csv,.vtk}\n",
                frequency, resolution, resolution,
                (out / "microstructure").c_str());
    if (field.has_reversed_leaf) {
      std::printf("note: laminate contains orientation-reversing phases "
                  "(self-intersecting reconstruction)\n");
    }
  } else {
    std::printf("minimizer recording disabled: no tree/microstructure output\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// fem: direct minimisation, optionally multi-stage with warm starts
// ---------------------------------------------------------------------------

struct FemStage {
  std::string energy = "dist";
  double k = 1e5;
  int exponent = 1;
};

int cmd_fem(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg,
             {"F0", "elements", "energy", "k", "exponent", "stages",
              "max_iterations", "gradient_tol", "initial_radius", "max_radius",
              "max_cg_iterations", "perturbation"},
             "fem");

  const Mat2d F0 = get_f0(cfg, Mat2d::Identity() * 0.4);
  const int elements = get_int(cfg, "elements", 20);

  std::vector<FemStage> stages;
  if (cfg.contains("stages")) {
    if (cfg.contains("energy")) {
      throw ConfigError("fem config: give either \"energy\" or \"stages\"");
    }
    const json& st = cfg.at("stages");
    if (!st.is_array() || st.empty()) {
      throw ConfigError("fem config: \"stages\" must be a non-empty array");
    }
    for (const json& s : st) {
      if (!s.is_object()) {
        throw ConfigError("fem config: each stage must be an object");
      }
      check_keys(s, {"energy", "k", "exponent"}, "fem stage");
      FemStage stage;
      stage.energy = get_string(s, "energy", "dist");
      stage.k = get_double(s, "k", 1e5);
      stage.exponent = get_int(s, "exponent", 1);
      stages.push_back(stage);
    }
  } else {
    FemStage stage;
    stage.energy = get_string(cfg, "energy", "dist");
    stage.k = get_double(cfg, "k", 1e5);
    stage.exponent = get_int(cfg, "exponent", 1);
    stages.push_back(stage);
  }

  FemOptions opt;
  opt.max_iterations = get_int(cfg, "max_iterations", opt.max_iterations);
  opt.gradient_tol = get_double(cfg, "gradient_tol", opt.gradient_tol);
  opt.initial_radius = get_double(cfg, "initial_radius", opt.initial_radius);
  opt.max_radius = get_double(cfg, "max_radius", opt.max_radius);
  opt.max_cg_iterations =
      get_int(cfg, "max_cg_iterations", opt.max_cg_iterations);
  opt.perturbation = get_double(cfg, "perturbation", opt.perturbation);
  if (args.seed) opt.seed = *args.seed;
  opt.threads = args.threads;
  opt.validate();

  const fs::path out = prepare_out(args.out_dir);
  QuadMesh mesh(elements);
  DisplacementField field = DisplacementField::zero(mesh);

  io::CsvTable report;
  report.comments.push_back("# trust-region minimisation, F0 = " +
                            describe(F0));
  report.header = {"stage",        "energy",       "converged",
                   "iterations",   "energy_total", "energy_per_area",
                   "gradient_norm", "min_det",      "max_det",
                   "nonpositive_quadrature_points", "seconds"};

  bool all_converged = true;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const FemStage& stage = stages[i];
    const EnergyDensity W = make_density(stage.energy, stage.k, stage.exponent);
    FemOptions stage_opt = opt;
    stage_opt.use_initial_field = i > 0;  // warm-start later stages
    const SolveReport rep = minimize(mesh, W, F0, stage_opt, field);
    all_converged = all_converged && rep.converged;

    std::printf(
        "stage %zu %-16s I = %-10s I/|Omega| = %-10s %s in %d iterations "
        "(|g| = %s, det in [%s, %s], %d nonpositive)\n",
        i + 1, stage.energy.c_str(), fmt6(rep.energy).c_str(),
        fmt6(rep.energy_per_area).c_str(),
        rep.converged ? "converged" : "NOT converged", rep.iterations,
        fmt6(rep.gradient_norm).c_str(), fmt6(rep.dets.min_det).c_str(),
        fmt6(rep.dets.max_det).c_str(), rep.dets.nonpositive_points);

    report.add_row({std::to_string(i + 1), stage.energy,
                    rep.converged ? "true" : "false",
                    std::to_string(rep.iterations),
                    io::format_double(rep.energy),
                    io::format_double(rep.energy_per_area),
                    io::format_double(rep.gradient_norm),
                    io::format_double(rep.dets.min_det),
                    io::format_double(rep.dets.max_det),
                    std::to_string(rep.dets.nonpositive_points),
                    io::format_double(rep.seconds)});
  }

  report.write_file(out / "fem_report.csv");
  io::write_deformed_mesh_csv(out / "fem_mesh.csv", mesh, F0, field);
  io::write_deformed_mesh_vtk(out / "fem_mesh.vtk", mesh, F0, field);
  std::printf("wrote %s, %s, %s\n", (out / "fem_report.csv").c_str(),
              (out / "fem_mesh.csv").c_str(), (out / "fem_mesh.vtk").c_str());

  if (!all_converged) {
    std::fprintf(stderr, "error: optimizer did not converge in some stage\n");
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// compare: per-unit-volume values for raw / analytic / lattice / mesh methods
// ---------------------------------------------------------------------------

int cmd_compare(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg,
             {"delta", "radius", "k_max", "elements", "max_iterations",
              "penalty_k", "penalty_exponent"},
             "compare");
  const double delta = get_double(cfg, "delta", 0.1);
  const double radius = get_double(cfg, "radius", 2.0);
  const int k_max = get_int(cfg, "k_max", 10);
  const int elements = get_int(cfg, "elements", 20);
  const int max_iterations = get_int(cfg, "max_iterations", 1000);
  const double penalty_k = get_double(cfg, "penalty_k", 1e5);
  const int penalty_exponent = get_int(cfg, "penalty_exponent", 1);

  const Mat2d F0 = Mat2d::Identity() * 0.4;

  struct Row {
    std::string energy, domain;
    std::string raw, analytic, roc, fem;
  };
  std::vector<Row> rows = {{"biot", "R2x2", "", "", "", ""},
                           {"dist", "R2x2", "", "", "", ""},
                           {"biot", "GLp", "", "", "", ""}};
  bool failed = false;
  const auto guard = [&](std::string& cell, auto&& fn) {
    try {
      cell = io::format_double(fn());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "compare: sub-run failed: %s\n", e.what());
      cell = "FAILED";
      failed = true;
    }
  };

  // Raw and analytic columns straight from the closed forms.
  guard(rows[0].raw, [&] { return w_biot(F0); });
  guard(rows[1].raw, [&] { return w_dist(F0); });
  guard(rows[2].raw, [&] { return w_biot(F0); });
  guard(rows[0].analytic, [&] { return q_biot_unconstrained(F0); });
  guard(rows[1].analytic, [&] { return q_dist_unconstrained(F0); });
  guard(rows[2].analytic, [&] { return q_glp(F0); });

  // Lattice convexification column.
  const auto roc_value = [&](const std::string& energy, bool constrained) {
    RocConfig rc = constrained ? RocConfig::compression_box(delta)
                               : RocConfig::cube(delta, radius);
    rc.k_max = k_max;
    rc.threads = args.threads;
    rc.validate();
    std::printf("compare: lattice run %s/%s ...\n", energy.c_str(),
                constrained ? "GLp" : "R2x2");
    std::fflush(stdout);
    RocResult result = roc_iterate(
        build_grid(make_density(energy, penalty_k, penalty_exponent), rc),
        directions(rc.direction_order), rc);
    return result.value_at(F0);
  };
  guard(rows[0].roc, [&] { return roc_value("biot", false); });
  guard(rows[1].roc, [&] { return roc_value("dist", false); });
  guard(rows[2].roc, [&] { return roc_value("biot", true); });

  // Mesh minimisation column (per unit volume).  The orientation-constrained
  // row warm-starts the penalized energy from the dist minimiser; on
  // det > 0 the two functionals coincide.
  const auto fem_value = [&](const std::vector<FemStage>& stages) {
    QuadMesh mesh(elements);
    DisplacementField field = DisplacementField::zero(mesh);
    FemOptions opt;
    opt.max_iterations = max_iterations;
    if (args.seed) opt.seed = *args.seed;
    opt.threads = args.threads;
    double value = 0;
    for (std::size_t i = 0; i < stages.size(); ++i) {
      std::printf("compare: mesh run %s ...\n", stages[i].energy.c_str());
      std::fflush(stdout);
      FemOptions stage_opt = opt;
      stage_opt.use_initial_field = i > 0;
      const SolveReport rep =
          minimize(mesh,
                   make_density(stages[i].energy, stages[i].k,
                                stages[i].exponent),
                   F0, stage_opt, field);
      if (!rep.converged) {
        throw NumericalError("mesh minimisation did not converge for " +
                             stages[i].energy);
      }
      value = rep.energy_per_area;
    }
    return value;
  };
  guard(rows[0].fem, [&] { return fem_value({{"biot", 0, 1}}); });
  guard(rows[1].fem, [&] { return fem_value({{"dist", 0, 1}}); });
  guard(rows[2].fem, [&] {
    return fem_value(
        {{"dist", 0, 1}, {"biot_penalized", penalty_k, penalty_exponent}});
  });

  std::printf("\n%-6s %-5s %12s %12s %12s %12s\n", "energy", "domain", "raw_W",
              "analytic_Q", "roc", "fem");
  io::CsvTable t;
  t.comments.push_back(
      "# per-unit-volume energies at F0 = 0.4 * identity on [-1,1]^2");
  t.comments.push_back(
      "# columns limited to the methods implemented in this toolkit");
  t.comments.push_back(
      "# fem value for biot on R2x2 is a local minimum (reported as a band "
      "below 0.5, not a fixed value)");
  t.header = {"energy", "domain", "raw_W", "analytic_Q", "roc", "fem"};
  const auto display = [](const std::string& cell) {
    try {
      return fmt6(std::stod(cell));
    } catch (...) {
      return cell;
    }
  };
  for (const Row& r : rows) {
    std::printf("%-6s %-5s %12s %12s %12s %12s\n", r.energy.c_str(),
                r.domain.c_str(), display(r.raw).c_str(),
                display(r.analytic).c_str(), display(r.roc).c_str(),
                display(r.fem).c_str());
    t.add_row({r.energy, r.domain, r.raw, r.analytic, r.roc, r.fem});
  }

  const fs::path out = prepare_out(args.out_dir);
  t.write_file(out / "comparison.csv");
  std::printf("wrote %s\n", (out / "comparison.csv").c_str());
  return failed ? 3 : 0;
}

// ---------------------------------------------------------------------------
// plotdata: 1-D analytic sections as CSV curves
// ---------------------------------------------------------------------------

int cmd_plotdata(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg, {"step"}, "plotdata");
  const double step = get_double(cfg, "step", 0.01);
  if (!(step > 0)) throw ConfigError("plotdata: step must be > 0");
  const fs::path out = prepare_out(args.out_dir);

  const auto sweep = [&](double lo, double hi, auto&& emit) {
    const int n = int(std::lround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) emit(lo + i * step);
  };

  {  // volumetric compression/expansion alpha * id
    io::CsvTable t;
    t.comments.push_back("# volumetric sweep F = alpha * identity");
    t.header = {"alpha", "w_dist", "q_dist_unconstrained",
                "q_biot_unconstrained"};
    sweep(-2.0, 2.0, [&](double a) {
      const Mat2d F = Mat2d::Identity() * a;
      t.add_row({io::format_double(a), io::format_double(w_dist(F)),
                 io::format_double(q_dist_unconstrained(F)),
                 io::format_double(q_biot_unconstrained(F))});
    });
    t.write_file(out / "plot_volumetric.csv");
  }

  {  // simple shear [[1, gamma], [0, 1]]: already quasiconvex
    io::CsvTable t;
    t.comments.push_back("# simple shear F = [[1, gamma], [0, 1]]");
    t.header = {"gamma", "w_dist", "q_dist_unconstrained"};
    sweep(-2.0, 2.0, [&](double g) {
      Mat2d F;
      F << 1, g, 0, 1;
      t.add_row({io::format_double(g), io::format_double(w_dist(F)),
                 io::format_double(q_dist_unconstrained(F))});
    });
    t.write_file(out / "plot_shear.csv");
  }

  {  // diagonal sections diag(alpha, beta) for a few fixed beta
    io::CsvTable t;
    t.comments.push_back("# diagonal states F = diag(alpha, beta)");
    t.comments.push_back("# q_glp cell empty where det F <= 0");
    t.header = {"beta",   "alpha",
                "w_biot", "w_dist",
                "q_biot_unconstrained", "q_dist_unconstrained",
                "q_glp"};
    for (const double beta : {0.0, 0.4, 1.0}) {
      sweep(-1.5, 1.5, [&](double a) {
        Mat2d F = Mat2d::Zero();
        F(0, 0) = a;
        F(1, 1) = beta;
        std::string qg;
        try {
          qg = io::format_double(q_glp(F));
        } catch (const std::domain_error&) {
        }
        t.add_row({io::format_double(beta), io::format_double(a),
                   io::format_double(w_biot(F)), io::format_double(w_dist(F)),
                   io::format_double(q_biot_unconstrained(F)),
                   io::format_double(q_dist_unconstrained(F)), qg});
      });
    }
    t.write_file(out / "plot_diag.csv");
  }

  {  // scalar stretch profile, its even reflection and the convex envelope
    const double r = 4.0;
    const auto h = [](double t) { return (t - 1) * (t - 1); };
    const auto h_even = [&](double t) { return h(std::abs(t)); };
    const SampledCurve samples = SampledCurve::from_function(
        h_even, -r, r, std::size_t(std::lround(2 * r / step)) + 1);
    const ConvexEnvelope1D envelope = lower_convex_hull(samples);
    io::CsvTable t;
    t.comments.push_back(
        "# stretch profile h(t) = (t-1)^2, even reflection, convex envelope");
    t.header = {"t", "h", "h_even", "convex_envelope"};
    sweep(-r, r, [&](double x) {
      t.add_row({io::format_double(x), io::format_double(h(x)),
                 io::format_double(h_even(x)),
                 io::format_double(envelope(x))});
    });
    t.write_file(out / "plot_valanis_landel.csv");
  }

  std::printf("wrote plot_volumetric.csv, plot_shear.csv, plot_diag.csv, "
              "plot_valanis_landel.csv in %s\n",
              args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Planar relaxation toolkit: analytic envelopes, lattice rank-one "
      "convexification, laminate microstructures and mesh-based energy "
      "minimisation"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    int (*run)(const CommonArgs&);
    CommonArgs args;
  };
  std::vector<Sub> subs;
  subs.reserve(8);  // CLI11 keeps pointers into the stored CommonArgs
  const auto add = [&](const char* name, const char* help,
                       int (*run)(const CommonArgs&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    subs.push_back({cmd, run, {}});
    CommonArgs& a = subs.back().args;
    cmd->add_option("--config", a.config_path,
                    "JSON configuration file (strict keys)");
    cmd->add_option("--out", a.out_dir, "output directory (created if absent)");
    cmd->add_option("--seed", a.seed, "seed for randomised initial data");
    cmd->add_option("--threads", a.threads, "worker threads for grid/mesh loops")
        ->check(CLI::PositiveNumber);
  };
  add("envelope", "print/write analytic energies and envelopes at F0",
      cmd_envelope);
  add("roc", "lattice rank-one convexification with laminate extraction",
      cmd_roc);
  add("fem", "trust-region mesh minimisation under affine boundary data",
      cmd_fem);
  add("compare", "method comparison table at F0 = 0.4 * identity",
      cmd_compare);
  add("plotdata", "emit analytic 1-D section curves as CSV", cmd_plotdata);

  try {
    app.parse(argc, argv);
    for (auto& sub : subs) {
      if (sub.cmd->parsed()) return sub.run(sub.args);
    }
    return 2;  // unreachable with require_subcommand(1)
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ResourceLimitError& e) {
    std::fprintf(stderr, "resource limit: %s\n", e.what());
    return 4;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
