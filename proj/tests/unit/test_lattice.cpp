#include "adialab/errors.hpp"
#include "adialab/lattice.hpp"
#include "adialab/oracles.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace adialab;

TEST_CASE("site 0 is the most significant tensor factor") {
  const Volume v = Volume::chain(2);
  const Matrix z0 = embed(LocalTerm({{0}}, pauli::z()), Site{0}, v).matrix;
  Matrix expected = Matrix::Zero(4, 4);
  expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
  CHECK((z0 - expected).norm() == 0.0);
}

TEST_CASE("Ising Hamiltonian is diagonal with the classical energies") {
  const int L = 5;
  const Volume v = Volume::chain(L);
  const Matrix h = local_hamiltonian(ising_chain(0.7, -0.3, 0.0), v).matrix;
  CHECK(is_diagonal(h));
  const auto energies = oracle::ising_configuration_energies(L, 0.7, -0.3);
  REQUIRE(energies.size() == static_cast<std::size_t>(h.rows()));
  for (Eigen::Index k = 0; k < h.rows(); ++k) CHECK(h(k, k).real() == doctest::Approx(energies[k]).epsilon(1e-14));
}

TEST_CASE("translates counted per boundary condition") {
  const Interaction phi = ising_chain(1.0, 0.0, 0.0);
  CHECK(translates_in(phi, Volume::chain(4)).size() == 3);
  CHECK(translates_in(phi, Volume::chain(4, Boundary::periodic)).size() == 4);
}

TEST_CASE("volumes above the dense ceiling are refused") {
  CHECK_THROWS_AS(Volume::chain(13), ResourceLimitError);
  CHECK_NOTHROW(Volume::chain(13, Boundary::free, 0, 13));
}

TEST_CASE("periodic translation moves an observable by one site") {
  const Volume v = Volume::chain(4, Boundary::periodic);
  const DenseOperator x0 = embed(LocalTerm({{0}}, pauli::x()), Site{0}, v);
  const DenseOperator x1 = embed(LocalTerm({{0}}, pauli::x()), Site{1}, v);
  CHECK((translate(x0, Site{1}, v).matrix - x1.matrix).norm() < 1e-15);
  const DenseOperator x3 = embed(LocalTerm({{0}}, pauli::x()), Site{3}, v);
  CHECK((translate(x0, Site{-1}, v).matrix - x3.matrix).norm() < 1e-15);
}

TEST_CASE("local derivation equals the full-volume commutator") {
  const Volume v = Volume::chain(6);
  const Interaction phi = ising_chain(1.0, 0.3, 0.8);
  const DenseOperator a = embed(LocalTerm({{0}, {1}}, pauli::from_string("XY")), Site{2}, v);
  const DenseOperator full = derivation(phi, a, v, DerivationMode::full_volume);
  const DenseOperator local = derivation(phi, a, v, DerivationMode::support_touching);
  CHECK((full.matrix - local.matrix).norm() < 1e-12);
  const Matrix h = local_hamiltonian(phi, v).matrix;
  CHECK((full.matrix - kI * commutator(h, a.matrix)).norm() < 1e-12);
  REQUIRE(local.support.has_value());
  CHECK(local.support->size() == 4);
}

TEST_CASE("margins inside a free chain") {
  const Volume v = Volume::chain(6);
  CHECK(has_margin({Site{2}, Site{3}}, 2, v));
  CHECK_FALSE(has_margin({Site{0}}, 1, v));
}
