#include "adialab/adiabatic.hpp"
#include "adialab/errors.hpp"
#include "adialab/oracles.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace adialab;

namespace {

IntegratorConfig adaptive(double tol = 1e-11) {
  IntegratorConfig cfg;
  cfg.adaptive = true;
  cfg.tolerance = tol;
  return cfg;
}

}  // namespace

TEST_CASE("builtin models validate and are listed") {
  for (const auto& name : models::names()) CHECK_NOTHROW(models::by_name(name).validate());
  CHECK_THROWS_AS(models::by_name("no-such-model"), ValidationError);
}

TEST_CASE("a derivative rule inconsistent with V is rejected") {
  MatrixModel m = models::two_level_gapped();
  m.perturbation_derivative = [](double) { return Matrix(2.0 * pauli::x()); };
  CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("a closing gap is reported") {
  CHECK_THROWS_AS(kato_scan(models::closing_gap(), {10.0}, uniform_grid(11)), GapClosedError);
}

TEST_CASE("adiabatic deviation decays like 1/T for a gapped band") {
  const auto r = kato_scan(models::two_level_gapped(), {20.0, 40.0, 80.0, 160.0}, uniform_grid(41), adaptive());
  CHECK(r.slope == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(r.min_gap == doctest::Approx(2.0).epsilon(1e-9));
  for (std::size_t k = 1; k < r.rows.size(); ++k) CHECK(r.rows[k].d < r.rows[k - 1].d);
}

TEST_CASE("degenerate band is tracked as a rank-2 projection") {
  const auto r = kato_scan(models::degenerate_four_level(), {10.0, 100.0}, uniform_grid(21), adaptive());
  CHECK(r.rows.back().d < r.rows.front().d);
}

TEST_CASE("gapless scan needs a genuine projection family") {
  MatrixModel m = models::crossing();
  CHECK_NOTHROW(gapless_scan(m, {5.0}, uniform_grid(11)));
  m.projection = [](double) { return Matrix(0.7 * Matrix::Identity(2, 2)); };
  CHECK_THROWS_AS(gapless_scan(m, {5.0}, uniform_grid(11)), ValidationError);
  CHECK_THROWS_AS(gapless_scan(models::two_level_gapped(), {5.0}, uniform_grid(11)), ValidationError);
}

TEST_CASE("log-log slope of an exact power law") {
  CHECK(loglog_slope({1.0, 10.0, 100.0}, {3.0, 0.3, 0.03}) == doctest::Approx(-1.0));
  CHECK(loglog_slope({1.0, 2.0, 4.0}, {1.0, 4.0, 16.0}) == doctest::Approx(2.0));
}

TEST_CASE("entropy balance closes for matrix and chain models") {
  for (double T : {0.5, 2.0}) {
    CHECK(entropy_balance_check(models::two_level_gapped(), T, uniform_grid(11), adaptive()).max_residual < 1e-9);
    CHECK(entropy_balance_check(models::two_level_rotating(), T, uniform_grid(11), adaptive()).max_residual < 1e-9);
  }
  const auto chain = MatrixModel::from_path(models::transverse_field_path(), Volume::chain(3), 0.8);
  CHECK(entropy_balance_check(chain, 1.0, uniform_grid(6), adaptive()).max_residual < 1e-9);
}

TEST_CASE("Gamma factorization reproduces the propagator") {
  for (double T : {0.5, 3.0}) {
    const auto r = gamma_factorization_check(models::two_level_rotating(), T, 0.2, 0.9, adaptive(1e-12));
    CHECK(r.defect < 1e-9);
    CHECK(r.delta_identity_defect < 1e-12);
    CHECK(r.generator_quadrature_defect < 1e-10);
  }
}

TEST_CASE("Gamma generator vanishes when the perturbation commutes with H") {
  MatrixModel m = models::two_level_gapped();
  m.perturbation = [](double tau) { return Matrix(tau * pauli::z()); };
  m.perturbation_derivative = [](double) { return Matrix(pauli::z()); };
  const Matrix g = gamma_generator(m, 2.0, 0.0, 0.5);
  // Commuting case: G = T (t - s) dV.
  CHECK((g - 2.0 * 0.5 * pauli::z()).norm() < 1e-14);
}

TEST_CASE("isothermal diagnostics satisfy Pinsker and shrink with T") {
  const auto rows = isothermal_equivalence_scan(models::two_level_rotating(), {1.0, 10.0, 100.0}, uniform_grid(21),
                                                adaptive());
  for (const auto& r : rows) CHECK(r.pinsker_ok);
  CHECK(rows.back().sup_trace_distance < rows.front().sup_trace_distance);
  CHECK(rows.back().sup_relative_entropy < rows.front().sup_relative_entropy);
}

TEST_CASE("many-body scan on the commuting path matches the closed form") {
  // The bond energy density spans three sites and needs one more on each side.
  const int L = 5;
  const auto rows = many_body_scan(models::commuting_path(), Volume::chain(L), {1.0, 7.0}, uniform_grid(6));
  for (const auto& r : rows) {
    const double expected = oracle::commuting_relative_entropy_per_site(L, 1.0, 0.3, r.tau, 1.0);
    CHECK(std::abs(r.relative_entropy_per_site - expected) < 1e-10);
    CHECK(r.pinsker_ok);
  }
}

TEST_CASE("many-body scan keeps the driven entropy and starts at zero") {
  const auto rows = many_body_scan(models::transverse_field_path(), Volume::chain(4), {2.0}, {0.0, 0.5, 1.0});
  for (const auto& r : rows) {
    CHECK(r.entropy_drift < 1e-10);
    CHECK(r.pinsker_ok);
    if (r.tau == 0.0) {
      CHECK(r.relative_entropy < 1e-12);
      CHECK(r.trace_distance < 1e-12);
    }
  }
  CHECK(rows.back().relative_entropy > 1e-4);
}

TEST_CASE("pressure derivative equals minus beta times the Gibbs expectation of dH") {
  const auto r = pressure_derivative_check(models::ising_to_transverse_path(), Volume::chain(3), uniform_grid(5));
  CHECK(r.max_residual < 1e-6);
  // Commuting path: P(tau) = log Z(beta (1 + tau)) / L, derivative -<H_0>_{beta(1+tau)} / L.
  const auto c = pressure_derivative_check(models::commuting_path(), Volume::chain(3), {0.0, 0.5, 1.0}, 1.0);
  const auto e = oracle::ising_configuration_energies(3, 1.0, 0.3);
  for (const auto& row : c.rows) {
    const double b = 1.0 + row.tau;
    double z = 0.0;
    double mean = 0.0;
    for (double x : e) {
      z += std::exp(-b * x);
      mean += x * std::exp(-b * x);
    }
    CHECK(row.gibbs_expectation == doctest::Approx(-mean / z / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("bulk energy density keeps away from the boundary") {
  const Interaction phi = ising_chain(1.0, 0.0, 0.0);
  const Volume v = Volume::chain(6);
  const Matrix e = bulk_energy_density(phi, v, 1);
  // All-up state: every bond contributes +1.
  CHECK(e(0, 0).real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(bulk_energy_density(phi, Volume::chain(2), 3), ValidationError);
}

TEST_CASE("entropy dichotomy: averages raise the entropy, the driven endpoint keeps it") {
  const Volume v = Volume::chain(3);
  Vector psi = Vector::Zero(8);
  psi(0) = 1.0;
  const auto nu0 = DensityMatrix::pure(psi);
  AdiabaticEndpoint end{models::transverse_field_path(), 5.0, {}};
  const auto rows = entropy_dichotomy_report(nu0, ising_chain(1.0, 0.0, 1.0), v, {1.0, 50.0}, end);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].label == "initial");
  for (std::size_t k = 1; k + 1 < rows.size(); ++k) CHECK(rows[k].delta_vs_initial >= -1e-12);
  CHECK(rows[3].label == "dephased");
  CHECK(rows[3].delta_vs_initial > 0.01);
  CHECK(rows.back().label == "driven-endpoint");
  CHECK(std::abs(rows.back().delta_vs_initial) < 1e-10);
}
