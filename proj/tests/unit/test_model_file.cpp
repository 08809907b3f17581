#include "adialab/errors.hpp"
#include "adialab/model_file.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace adialab;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "adialab-model-tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("interaction files with Pauli and explicit matrix terms") {
  const auto file = write_temp("ising.yaml", R"(kind: interaction
weight_r: 0.5
terms:
  - {support: [0, 1], pauli: ZZ, coefficient: 1.0}
  - support: [0]
    matrix: [[0, 0.7], [0.7, 0]]
)");
  const Interaction phi = load_interaction(file);
  CHECK(phi.weight_r() == 0.5);
  CHECK(term_distance(phi, ising_chain(1.0, 0.0, 0.7, 0.5)) < 1e-15);
}

TEST_CASE("complex entries are [re, im] pairs") {
  const auto file = write_temp("y.yaml", R"(kind: interaction
terms:
  - support: [0]
    matrix: [[0, [0, -1]], [[0, 1], 0]]
)");
  CHECK((load_interaction(file).terms()[0].matrix() - pauli::y()).norm() < 1e-15);
}

TEST_CASE("model files fail closed") {
  CHECK_THROWS_AS(load_interaction(write_temp("k.yaml", "kind: interaction\nterms: []\ncolour: red\n")),
                  ValidationError);
  CHECK_THROWS_AS(load_interaction(write_temp("h.yaml", R"(kind: interaction
terms:
  - support: [0]
    matrix: [[0, 1], [0, 0]]
)")),
                  ValidationError);
  CHECK_THROWS_AS(load_interaction(write_temp("w.yaml", R"(kind: interaction
terms:
  - {support: [0, 1], pauli: Z}
)")),
                  ValidationError);
  CHECK_THROWS_AS(load_path(write_temp("kind.yaml", "kind: interaction\nterms: []\n")), ValidationError);
  CHECK_THROWS_AS(load_interaction(fs::path("/nonexistent/model.yaml")), ValidationError);
}

TEST_CASE("linear path files") {
  const auto file = write_temp("path.yaml", R"(kind: path
form: linear
lambda: [0, 0, 1]
phi0:
  terms: [{support: [0, 1], pauli: ZZ}]
phi1:
  terms: [{support: [0], pauli: X}]
)");
  const auto path = load_path(file);
  const Interaction a = ising_chain(1.0, 0.0, 0.0);
  const Interaction b = field_interaction(pauli::x());
  CHECK(term_distance(path.at(0.5), combine(a, b, 0.75, 0.25)) < 1e-15);
  CHECK(term_distance(path.derivative(0.5), combine(b, a, 1.0, -1.0)) < 1e-14);
}

TEST_CASE("sampled path files") {
  const auto file = write_temp("samples.yaml", R"(kind: path
form: samples
knots: [0, 1]
samples:
  - terms: [{support: [0], pauli: Z}]
  - terms: [{support: [0], pauli: X}]
)");
  const auto path = load_path(file);
  CHECK(term_distance(path.at(0.5), field_interaction(0.5 * (pauli::z() + pauli::x()))) < 1e-15);
}

TEST_CASE("matrix-model files with polynomial perturbations") {
  const auto file = write_temp("mm.yaml", R"(kind: matrix-model
name: quad
base: [[1, 0], [0, -1]]
perturbation:
  - [[0, 0], [0, 0]]
  - [[0, 1], [1, 0]]
  - [[0.5, 0], [0, -0.5]]
band: {first: 0, count: 1}
)");
  const MatrixModel m = load_matrix_model(file);
  CHECK(m.name == "quad");
  const Matrix v = m.perturbation(0.5);
  CHECK((v - (0.5 * pauli::x() + 0.125 * pauli::z())).norm() < 1e-15);
  const Matrix dv = m.perturbation_derivative(0.5);
  CHECK((dv - (pauli::x() + 0.5 * pauli::z())).norm() < 1e-15);
}

TEST_CASE("file hashes are stable and content sensitive") {
  const auto a = write_temp("ha.txt", "abc");
  const auto b = write_temp("hb.txt", "abd");
  CHECK(file_hash(a) == file_hash(a));
  CHECK(file_hash(a) != file_hash(b));
  CHECK(file_hash(a).size() == 16);
}
