#include "adialab/errors.hpp"
#include "adialab/oracles.hpp"
#include "adialab/thermo.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace adialab;

TEST_CASE("density matrices are validated") {
  Matrix neg = Matrix::Zero(2, 2);
  neg.diagonal() << 1.5, -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, ValidationError);
  CHECK_THROWS_AS(DensityMatrix{Matrix::Identity(2, 2)}, ValidationError);
  CHECK_NOTHROW(DensityMatrix{0.5 * Matrix::Identity(2, 2)});
}

TEST_CASE("free spins in a field match log(2 cosh beta h)") {
  for (double beta : {0.3, 1.0, 4.0}) {
    const double p = pressure(field_interaction(0.8 * pauli::z()), Volume::chain(5), beta);
    CHECK(p == doctest::Approx(oracle::free_spin_pressure(0.8, beta)).epsilon(1e-13));
  }
}

TEST_CASE("open Ising chain pressure matches the transfer matrix") {
  for (int L : {3, 6, 9}) {
    const double p = pressure(ising_chain(0.9, 0.35, 0.0), Volume::chain(L), 1.2);
    CHECK(std::abs(p - oracle::ising_open_pressure(L, 0.9, 0.35, 1.2)) < 1e-12);
  }
}

TEST_CASE("open XY chain pressure matches free fermions") {
  const Matrix xy = pauli::from_string("XX") + pauli::from_string("YY");
  for (int L : {4, 7}) {
    const Interaction phi = two_body_interaction(Matrix::Zero(2, 2), 0.6 * xy);
    const double p = pressure(phi, Volume::chain(L), 1.3);
    CHECK(std::abs(p - oracle::xy_open_pressure(L, 0.6, 1.3)) < 1e-12);
  }
}

TEST_CASE("1/L extrapolation of the XY chain approaches the infinite-volume value") {
  const Matrix xy = pauli::from_string("XX") + pauli::from_string("YY");
  const Interaction phi = two_body_interaction(Matrix::Zero(2, 2), 0.5 * xy);
  const auto fit = pressure_extrapolate(phi, {6, 8, 10}, 1.0);
  CHECK(std::abs(fit.estimate - oracle::xy_infinite_pressure(0.5, 1.0)) < 5e-3);
  CHECK_THROWS_AS(pressure_extrapolate(phi, {6, 8}, 1.0), ValidationError);
}

TEST_CASE("entropy extremes") {
  CHECK(entropy(DensityMatrix::maximally_mixed(8)) == doctest::Approx(3.0 * std::numbers::ln2));
  Vector psi = Vector::Zero(4);
  psi(2) = 1.0;
  CHECK(std::abs(entropy(DensityMatrix::pure(psi))) < 1e-15);
}

TEST_CASE("relative entropy of commuting states is the classical divergence") {
  Matrix a = Matrix::Zero(3, 3);
  Matrix b = Matrix::Zero(3, 3);
  a.diagonal() << 0.5, 0.3, 0.2;
  b.diagonal() << 0.2, 0.2, 0.6;
  const double kl = 0.5 * std::log(0.5 / 0.2) + 0.3 * std::log(0.3 / 0.2) + 0.2 * std::log(0.2 / 0.6);
  const auto s = relative_entropy(DensityMatrix(a), DensityMatrix(b));
  CHECK(s.finite);
  CHECK(s.value == doctest::Approx(kl).epsilon(1e-13));
}

TEST_CASE("relative entropy is infinite off the support") {
  Matrix a = Matrix::Zero(2, 2);
  Matrix b = Matrix::Zero(2, 2);
  a.diagonal() << 0.5, 0.5;
  b.diagonal() << 1.0, 0.0;
  CHECK_FALSE(relative_entropy(DensityMatrix(a), DensityMatrix(b)).finite);
  CHECK(relative_entropy(DensityMatrix(b), DensityMatrix(a)).finite);
}

TEST_CASE("exact Gibbs logs keep relative entropy finite at low temperature") {
  Matrix h = Matrix::Zero(2, 2);
  h.diagonal() << 0.0, 1.0;
  const double b1 = 40.0;
  const double b2 = 80.0;
  const auto w1 = gibbs(h, b1).state;
  const auto w2 = gibbs(h, b2).state;
  const double lp1 = -std::log1p(std::exp(-b1));
  const double lq1 = -b1 + lp1;
  const double lp2 = -std::log1p(std::exp(-b2));
  const double lq2 = -b2 + lp2;
  const double expected = std::exp(lp1) * (lp1 - lp2) + std::exp(lq1) * (lq1 - lq2);
  const auto s = relative_entropy(w1, w2);
  CHECK(s.finite);
  CHECK(s.value == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("Klein and Pinsker hold on random pairs") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto nu = testing::random_state(4, rng);
    const auto omega = testing::random_state(4, rng);
    const auto s = relative_entropy(nu, omega);
    CHECK(s.value >= 0.0);
    CHECK(pinsker_check(nu, omega));
    CHECK(trace_distance(nu, omega) <= 2.0 + 1e-12);
  }
  const auto nu = testing::random_state(4, rng);
  CHECK(relative_entropy(nu, nu).value < 1e-12);
}

TEST_CASE("weak Gibbs identity holds for random full-rank and rank-deficient states") {
  std::mt19937_64 rng(13);
  const Interaction phi = ising_chain(0.8, 0.2, 0.6);
  const Volume v = Volume::chain(3);
  for (int k = 0; k < 20; ++k) {
    CHECK(weak_gibbs_residual(testing::random_state(8, rng), phi, v, 0.7) < 1e-11);
    CHECK(weak_gibbs_residual(testing::random_state(8, rng, 2), phi, v, 0.7) < 1e-11);
  }
}

TEST_CASE("thermo report of the Gibbs state") {
  const auto report = thermo_report(ising_chain(1.0, 0.0, 0.5), Volume::chain(4), 1.0);
  CHECK(report.residual < 1e-12);
  // S/|L| - beta E/|L| = P at the Gibbs state.
  CHECK(report.entropy_per_site - report.energy_per_site == doctest::Approx(report.pressure).epsilon(1e-12));
}

TEST_CASE("product states saturate the variational principle only without interactions") {
  const Volume v = Volume::chain(4);
  std::mt19937_64 rng(17);
  const auto field = variational_scan(field_interaction(testing::random_hermitian(2, rng)), v, 1.0);
  CHECK(std::abs(field.gap) < 1e-8);
  const auto zero = variational_scan(Interaction::zero(), v, 1.0);
  CHECK(zero.value == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  const auto ising = variational_scan(ising_chain(1.0, 0.0, 0.0), v, 1.0);
  CHECK(ising.value <= ising.pressure + 1e-12);
  CHECK(ising.gap > 1e-3);
}

TEST_CASE("Bloch states") {
  const Matrix up = bloch_state({0.0, 0.0, 1.0});
  CHECK(std::abs(up(0, 0).real() - 1.0) < 1e-15);
  CHECK_THROWS_AS(bloch_state({1.0, 1.0, 0.0}), ValidationError);
}
