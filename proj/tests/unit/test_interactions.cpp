#include "adialab/errors.hpp"
#include "adialab/interactions.hpp"
#include "adialab/lattice.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace adialab;

TEST_CASE("local terms reject invalid matrices") {
  Matrix bad = pauli::x();
  bad(0, 1) = 2.0;
  CHECK_THROWS_AS(LocalTerm({{0}}, bad), ValidationError);
  CHECK_THROWS_AS(LocalTerm({{0}, {1}}, pauli::x()), ValidationError);
  CHECK_THROWS_AS(LocalTerm({{0}, {0}}, pauli::from_string("ZZ")), ValidationError);
  CHECK_THROWS_AS(LocalTerm({}, Matrix::Identity(1, 1)), ValidationError);
}

TEST_CASE("unsorted supports permute the tensor factors") {
  const LocalTerm t({{1}, {0}}, pauli::from_string("ZX"));
  CHECK(t.support().front().x == 0);
  CHECK((t.matrix() - pauli::from_string("XZ")).norm() == 0.0);
}

TEST_CASE("interactions merge translates into anchored representatives") {
  const Interaction phi({LocalTerm({{0}, {1}}, pauli::from_string("ZZ")),
                         LocalTerm({{3}, {4}}, pauli::from_string("ZZ")),
                         LocalTerm({{2}}, 0.0 * pauli::x())},
                        1.0);
  REQUIRE(phi.terms().size() == 1);
  CHECK(phi.terms()[0].support().front().x == 0);
  CHECK((phi.terms()[0].matrix() - 2.0 * pauli::from_string("ZZ")).norm() < 1e-15);
  CHECK(phi.range() == 1);
}

TEST_CASE("weighted norm of the transverse Ising interaction") {
  const double r = 0.5;
  const double g = 0.7;
  const Interaction phi = ising_chain(1.0, 0.0, g, r);
  // Two ZZ translates contain the origin, each weighted by e^{r}.
  CHECK(norm_r(phi) == doctest::Approx(2.0 * std::exp(r) + g).epsilon(1e-14));
}

TEST_CASE("energy density averages bond terms over their sites") {
  const Interaction phi = ising_chain(1.0, 0.4, 0.0);
  const LocalObservable e = energy_density(phi).canonical();
  double zz_weight = 0.0;
  double z_weight = 0.0;
  for (const auto& t : e.terms) {
    if (t.size() == 2) zz_weight += t.matrix()(0, 0).real();
    if (t.size() == 1) z_weight += t.matrix()(0, 0).real();
  }
  CHECK(zz_weight == doctest::Approx(1.0));  // two half-weighted bonds
  CHECK(z_weight == doctest::Approx(0.4));
}

TEST_CASE("combine is termwise linear") {
  const Interaction a = ising_chain(1.0, 0.2, 0.3);
  const Interaction b = ising_chain(-0.5, 0.0, 1.0);
  CHECK(term_distance(combine(a, a, 2.0, -1.0), a) < 1e-15);
  CHECK(term_distance(combine(a, b, 0.0, 1.0), b) < 1e-15);
}

TEST_CASE("adding a multiple of the identity is physically equivalent") {
  const Interaction phi = ising_chain(1.0, 0.0, 0.8);
  const Interaction shifted = combine(phi, field_interaction(Matrix::Identity(2, 2)), 1.0, 3.0);
  const Interaction other = ising_chain(1.0, 0.0, 0.9);
  const Volume volume = Volume::chain(6);
  const DenseOperator a = embed(LocalTerm({{0}}, pauli::x()), Site{2}, volume);
  CHECK(equivalence_residual(phi, shifted, a, volume) < 1e-12);
  const DenseOperator az = embed(LocalTerm({{0}}, pauli::z()), Site{2}, volume);
  CHECK(equivalence_residual(phi, other, az, volume) > 1e-3);
}

TEST_CASE("equivalence residual needs a margin around the observable") {
  const Interaction phi = ising_chain(1.0, 0.0, 0.8);
  const Volume volume = Volume::chain(4);
  const DenseOperator a = embed(LocalTerm({{0}}, pauli::x()), Site{0}, volume);
  CHECK_THROWS_AS(equivalence_residual(phi, phi, a, volume), ValidationError);
}

TEST_CASE("interpolation paths and their derivatives") {
  const Interaction phi0 = ising_chain(1.0, 0.0, 0.5);
  const Interaction phi1 = ising_chain(1.0, 0.0, 1.5);
  const auto path = InteractionPath::interpolation(phi0, phi1, {0.0, 0.0, 1.0});
  CHECK(term_distance(path.at(0.5), combine(phi0, phi1, 0.75, 0.25)) < 1e-15);
  // d/dtau of tau^2 (phi1 - phi0) at tau = 0.5.
  CHECK(term_distance(path.derivative(0.5), combine(phi1, phi0, 1.0, -1.0)) < 1e-14);
  const std::vector<double> probes{0.1, 0.4, 0.9};
  CHECK(path.derivative_mismatch(probes) < 1e-8);
}

TEST_CASE("sampled paths validate their knots") {
  const Interaction a = ising_chain(1.0, 0.0, 0.0);
  const Interaction b = ising_chain(0.0, 0.0, 1.0);
  CHECK_THROWS_AS(InteractionPath::sampled({0.0, 0.5}, {a, b}), ValidationError);
  CHECK_THROWS_AS(InteractionPath::sampled({0.0, 0.0, 1.0}, {a, a, b}), ValidationError);
  const auto p = InteractionPath::sampled({0.0, 1.0}, {a, b});
  CHECK(term_distance(p.at(0.25), combine(a, b, 0.75, 0.25)) < 1e-15);
  CHECK(term_distance(p.derivative(0.25), combine(b, a, 1.0, -1.0)) < 1e-15);
}

TEST_CASE("polynomial helpers") {
  const std::vector<double> c{1.0, -2.0, 3.0};
  CHECK(polynomial_value(c, 2.0) == doctest::Approx(9.0));
  CHECK(polynomial_derivative(c, 2.0) == doctest::Approx(10.0));
}
