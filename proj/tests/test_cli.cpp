#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <relax2d/io.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

// End-to-end checks of the command-line binary (path injected at build
// time): artifact emission and the documented exit-code contract.

namespace fs = std::filesystem;
using relax2d::io::CsvTable;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("relax2d_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("'") + RELAX2D_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

void write_json(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("envelope writes the analytic table") {
  TempDir tmp;
  CHECK(run_cli("envelope --out '" + tmp.path.string() + "'") == 0);
  const CsvTable t = CsvTable::read_file(tmp.path / "envelope.csv");
  REQUIRE(t.rows.size() == 1);
  REQUIRE(t.header.size() == 6);
  CHECK(t.header[0] == "w_biot");
  CHECK(std::stod(t.rows[0][0]) == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(std::stod(t.rows[0][2]) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::stod(t.rows[0][3]) == doctest::Approx(0.68).epsilon(1e-12));
}

TEST_CASE("envelope marks the orientation-constrained envelope as undefined "
          "for reflections") {
  TempDir tmp;
  write_json(tmp.path / "cfg.json", R"({"F0": [1, 0, 0, -1]})");
  CHECK(run_cli("envelope --config '" + (tmp.path / "cfg.json").string() +
                "' --out '" + tmp.path.string() + "'") == 0);
  const CsvTable t = CsvTable::read_file(tmp.path / "envelope.csv");
  REQUIRE(t.rows.size() == 1);
  CHECK(std::stod(t.rows[0][0]) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::stod(t.rows[0][1]) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(t.rows[0][4] == "domain_error");
}

TEST_CASE("roc emits grid, tree and microstructure artifacts") {
  TempDir tmp;
  write_json(tmp.path / "cfg.json",
             R"({"energy": "biot", "constrained": true, "delta": 0.2,
                 "frequency": 4, "resolution": 41})");
  CHECK(run_cli("roc --config '" + (tmp.path / "cfg.json").string() +
                "' --out '" + tmp.path.string() + "'") == 0);
  CHECK(fs::exists(tmp.path / "roc_grid.bin"));
  CHECK(fs::exists(tmp.path / "roc_grid.meta.csv"));
  CHECK(fs::exists(tmp.path / "roc_grid.trace.csv"));
  CHECK(fs::exists(tmp.path / "microstructure.csv"));
  CHECK(fs::exists(tmp.path / "microstructure.vtk"));

  std::ifstream in(tmp.path / "roc_tree.json");
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  REQUIRE(j.contains("root"));
  CHECK(j.at("root").at("children").size() == 2);

  const CsvTable trace = CsvTable::read_file(tmp.path / "roc_grid.trace.csv");
  CHECK(trace.header ==
        std::vector<std::string>{"sweep", "max_decrease", "seconds"});
  CHECK(!trace.rows.empty());
}

TEST_CASE("fem emits a report and deformed meshes") {
  TempDir tmp;
  write_json(tmp.path / "cfg.json", R"({"elements": 4, "energy": "biot"})");
  CHECK(run_cli("fem --config '" + (tmp.path / "cfg.json").string() +
                "' --out '" + tmp.path.string() + "'") == 0);
  CHECK(fs::exists(tmp.path / "fem_mesh.csv"));
  CHECK(fs::exists(tmp.path / "fem_mesh.vtk"));
  const CsvTable rep = CsvTable::read_file(tmp.path / "fem_report.csv");
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0][1] == "biot");
  CHECK(rep.rows[0][2] == "true");
  CHECK(std::stod(rep.rows[0][5]) < 0.72);  // below the affine energy
}

TEST_CASE("plotdata emits the four curve families") {
  TempDir tmp;
  write_json(tmp.path / "cfg.json", R"({"step": 0.1})");
  CHECK(run_cli("plotdata --config '" + (tmp.path / "cfg.json").string() +
                "' --out '" + tmp.path.string() + "'") == 0);
  for (const char* name :
       {"plot_volumetric.csv", "plot_shear.csv", "plot_diag.csv",
        "plot_valanis_landel.csv"}) {
    CHECK(fs::exists(tmp.path / name));
  }

  // Pinned section values: the relaxed volumetric curve passes through 1 at
  // alpha = 0, and the shear section is already relaxed.
  const CsvTable vol = CsvTable::read_file(tmp.path / "plot_volumetric.csv");
  bool saw_zero = false;
  for (const auto& row : vol.rows) {
    if (std::stod(row[0]) == 0.0) {
      saw_zero = true;
      CHECK(std::stod(row[2]) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(saw_zero);
  const CsvTable shear = CsvTable::read_file(tmp.path / "plot_shear.csv");
  for (const auto& row : shear.rows) {
    CHECK(std::stod(row[1]) ==
          doctest::Approx(std::stod(row[2])).epsilon(1e-12));
  }
}

TEST_CASE("compare reproduces the method table on a coarse lattice") {
  TempDir tmp;
  write_json(tmp.path / "cfg.json",
             R"({"delta": 0.2, "radius": 1, "elements": 20})");
  CHECK(run_cli("compare --config '" + (tmp.path / "cfg.json").string() +
                "' --out '" + tmp.path.string() + "'") == 0);
  const CsvTable t = CsvTable::read_file(tmp.path / "comparison.csv");
  REQUIRE(t.rows.size() == 3);
  // Analytic column: 0 / 0.68 / 0.68; raw column all 0.72.
  CHECK(std::stod(t.rows[0][3]) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::stod(t.rows[1][3]) == doctest::Approx(0.68).epsilon(1e-12));
  CHECK(std::stod(t.rows[2][3]) == doctest::Approx(0.68).epsilon(1e-12));
  for (int r = 0; r < 3; ++r) {
    CHECK(std::stod(t.rows[std::size_t(r)][2]) ==
          doctest::Approx(0.72).epsilon(1e-12));
  }
  // Lattice column matches the analytic one on this box.
  CHECK(std::stod(t.rows[1][4]) == doctest::Approx(0.68).epsilon(1e-9));
  CHECK(std::stod(t.rows[2][4]) == doctest::Approx(0.68).epsilon(1e-9));
  // Mesh column: folded local minimum below 0.5, then the two
  // orientation-preserving runs inside the reported band.
  CHECK(std::stod(t.rows[0][5]) < 0.5);
  CHECK(std::stod(t.rows[1][5]) >= 0.680);
  CHECK(std::stod(t.rows[1][5]) <= 0.690);
  CHECK(std::stod(t.rows[2][5]) >= 0.680);
  CHECK(std::stod(t.rows[2][5]) <= 0.690);
}

TEST_CASE("exit codes follow the documented contract") {
  TempDir tmp;
  const std::string out = " --out '" + tmp.path.string() + "'";

  write_json(tmp.path / "unknown.json", R"({"bogus": 1})");
  CHECK(run_cli("roc --config '" + (tmp.path / "unknown.json").string() +
                "'" + out) == 2);

  write_json(tmp.path / "energy.json", R"({"energy": "nope"})");
  CHECK(run_cli("roc --config '" + (tmp.path / "energy.json").string() +
                "'" + out) == 2);

  write_json(tmp.path / "syntax.json", "{not json");
  CHECK(run_cli("envelope --config '" + (tmp.path / "syntax.json").string() +
                "'" + out) == 2);

  write_json(tmp.path / "outside.json",
             R"({"F0": [9, 0, 0, 9], "delta": 0.5, "radius": 1})");
  CHECK(run_cli("roc --config '" + (tmp.path / "outside.json").string() +
                "'" + out) == 2);

  write_json(tmp.path / "budget.json", R"({"memory_budget_bytes": 1000})");
  CHECK(run_cli("roc --config '" + (tmp.path / "budget.json").string() +
                "'" + out) == 4);

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("nosuch") == 2);
}
