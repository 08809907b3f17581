#include "adialab/experiments.hpp"
#include "adialab/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace adialab;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "adialab-experiment-tests";

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  const fs::path p = kDir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t manifest_lines(const fs::path& dir) {
  std::ifstream in(dir / "manifest.jsonl");
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

void write_models() {
  write("ising.yaml", R"(kind: interaction
terms: [{support: [0, 1], pauli: ZZ}]
)");
  write("transverse.yaml", R"(kind: interaction
terms:
  - {support: [0, 1], pauli: ZZ}
  - {support: [0], pauli: X, coefficient: 1.0}
)");
  write("path.yaml", R"(kind: path
form: linear
lambda: [0, 0, 1]
phi0: {terms: [{support: [0, 1], pauli: ZZ}]}
phi1: {terms: [{support: [0], pauli: X}]}
)");
}

RunOutcome run_text(const std::string& name, const std::string& body) {
  write_models();
  const fs::path out = kDir / ("out-" + name);
  fs::remove_all(out);
  return run_config(write(name + ".yaml", body), out);
}

}  // namespace

TEST_CASE("ten experiment kinds are listed deterministically") {
  CHECK(experiment_table().size() == 10);
  CHECK(list_experiments() == list_experiments());
  for (const auto& e : experiment_table()) CHECK(list_experiments().find(e.kind) != std::string::npos);
}

TEST_CASE("numbers round-trip through the CSV format") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 1.1269280110429727}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("pressure run reproduces the transfer-matrix oracle") {
  const auto out = run_text("pressure", R"(experiment: pressure
interaction: ising.yaml
volume: {lengths: [4, 6, 8]}
beta: 1.0
)");
  REQUIRE(out.exit_code == kExitOk);
  REQUIRE(out.outputs.size() == 1);
  std::ifstream csv(out.outputs[0]);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "L,beta,boundary,pressure,extrapolated,residual");
  for (int L : {4, 6, 8}) {
    std::string line;
    std::getline(csv, line);
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 6);
    CHECK(std::stoi(cells[0]) == L);
    CHECK(std::abs(std::stod(cells[3]) - oracle::ising_open_pressure(L, 1.0, 0.0, 1.0)) < 1e-12);
    CHECK(std::abs(std::stod(cells[4]) - oracle::ising_infinite_pressure(1.0, 1.0)) < 1e-10);
  }
}

TEST_CASE("identical configs give byte-identical CSV and one manifest entry per run") {
  write_models();
  const auto cfg = write("repeat.yaml", R"(experiment: many-body
path: path.yaml
volume: {sites: 5}
T: [1, 4]
tau: {points: 5}
integrator: {steps_factor: 4}
seed: 7
)");
  const fs::path out = kDir / "out-repeat";
  fs::remove_all(out);
  const auto a = run_config(cfg, out);
  REQUIRE(a.exit_code == kExitOk);
  const std::string first = slurp(a.outputs[0]);
  const auto b = run_config(cfg, out);
  REQUIRE(b.exit_code == kExitOk);
  CHECK(slurp(b.outputs[0]) == first);
  CHECK(manifest_lines(out) == 2);
}

TEST_CASE("validation failures exit with 2 and are recorded") {
  const auto empty_T = run_text("emptyT", "experiment: kato\nmodel: two-level-gapped\nT: []\n");
  CHECK(empty_T.exit_code == kExitValidation);
  CHECK(manifest_lines(kDir / "out-emptyT") == 1);
  CHECK(run_text("unknown", "experiment: kato\nmodel: two-level-gapped\nT: [1]\ncolour: red\n").exit_code ==
        kExitValidation);
  CHECK(run_text("kind", "experiment: sorcery\n").exit_code == kExitValidation);
  CHECK(run_text("missing", "experiment: pressure\ninteraction: nowhere.yaml\nvolume: {sites: 3}\n").exit_code ==
        kExitValidation);
  CHECK(run_text("badtau", "experiment: kato\nmodel: two-level-gapped\nT: [1]\ntau: [0.5, 0.2]\n").exit_code ==
        kExitValidation);
}

TEST_CASE("a closing gap exits with 3") {
  const auto out = run_text("gap", "experiment: kato\nmodel: closing-gap\nT: [10]\n");
  CHECK(out.exit_code == kExitNumerical);
  CHECK(out.message.find("gap closed") != std::string::npos);
}

TEST_CASE("oversized volumes exit with 4") {
  const auto out = run_text("big", "experiment: pressure\ninteraction: ising.yaml\nvolume: {sites: 14}\n");
  CHECK(out.exit_code == kExitResource);
  CHECK(manifest_lines(kDir / "out-big") == 1);
}

TEST_CASE("a held lock refuses a second run") {
  write_models();
  const fs::path out = kDir / "out-locked";
  fs::remove_all(out);
  fs::create_directories(out);
  const auto cfg = write("locked.yaml", "experiment: pressure\ninteraction: ising.yaml\nvolume: {sites: 3}\n");
  {
    OutputLock hold(out);
    CHECK(run_config(cfg, out).exit_code == kExitResource);
  }
  CHECK(run_config(cfg, out).exit_code == kExitOk);
}

TEST_CASE("every listed kind runs from a small config") {
  const std::map<std::string, std::string> configs = {
      {"pressure", "interaction: ising.yaml\nvolume: {lengths: [3, 4, 5]}\n"},
      {"variational", "interaction: transverse.yaml\nvolume: {sites: 3}\ngrid_points: 5\n"},
      {"kato", "model: two-level-gapped\nT: [5, 10]\ntau: {points: 11}\n"},
      {"gapless", "model: crossing\nT: [5, 50]\ntau: {points: 11}\n"},
      {"entropy-balance", "model: two-level-gapped\nT: [1]\ntau: {points: 6}\nintegrator: {adaptive: true}\n"},
      {"gamma-check", "model: two-level-rotating\nT: [1]\ns: 0.1\nt: 0.8\nintegrator: {adaptive: true, tolerance: 1e-12}\n"},
      {"isothermal", "model: two-level-rotating\nT: [1, 10]\ntau: {points: 6}\n"},
      {"many-body", "path: path.yaml\nvolume: {sites: 5}\nT: [1]\ntau: {points: 3}\n"},
      {"pressure-derivative", "path: path.yaml\nvolume: {sites: 3}\ntau: {points: 3}\n"},
      {"dichotomy", "interaction: transverse.yaml\nvolume: {sites: 3}\nhorizons: [1, 10]\npath: path.yaml\n"
                    "endpoint_T: 3\ninitial: {state: gibbs, interaction: ising.yaml, beta: 0.5}\n"},
  };
  REQUIRE(configs.size() == experiment_table().size());
  for (const auto& e : experiment_table()) {
    CAPTURE(e.kind);
    REQUIRE(configs.contains(e.kind));
    const auto out = run_text("kind-" + e.kind, "experiment: " + e.kind + "\n" + configs.at(e.kind));
    CHECK(out.exit_code == kExitOk);
    CHECK(out.message == "");
    REQUIRE(out.outputs.size() == 1);
    CHECK(fs::file_size(out.outputs[0]) > 0);
  }
}
