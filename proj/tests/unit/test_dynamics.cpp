#include "adialab/adiabatic.hpp"
#include "adialab/dynamics.hpp"
#include "adialab/errors.hpp"
#include "adialab/oracles.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace adialab;

namespace {

Matrix rk4_reference(const GeneratorRule& h, double T, double sigma, double tau) {
  const auto u = oracle::two_level_propagator(
      [&](double t) {
        const Matrix m = T * h(t);
        return oracle::Mat2{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
      },
      sigma, tau, 40000);
  Matrix out(2, 2);
  out << u[0], u[1], u[2], u[3];
  return out;
}

double error_with(const GeneratorRule& h, const Matrix& ref, Scheme scheme, int steps) {
  IntegratorConfig cfg;
  cfg.scheme = scheme;
  cfg.steps = steps;
  return operator_norm(propagate(h, 3.0, 0.0, 1.0, cfg).unitary - ref);
}

}  // namespace

TEST_CASE("frozen evolution of sigma_x") {
  const double t = 0.83;
  Matrix expected = std::cos(t) * pauli::identity() - kI * std::sin(t) * pauli::x();
  CHECK((frozen_evolve(pauli::x(), t) - expected).norm() < 1e-14);
}

TEST_CASE("commutator-free scheme is fourth order and midpoint second order") {
  const GeneratorRule h = models::standard_two_level().generator();
  const Matrix ref = rk4_reference(h, 3.0, 0.0, 1.0);
  const double cf_ratio = error_with(h, ref, Scheme::cf4, 10) / error_with(h, ref, Scheme::cf4, 20);
  const double mid_ratio = error_with(h, ref, Scheme::midpoint, 20) / error_with(h, ref, Scheme::midpoint, 40);
  CHECK(cf_ratio == doctest::Approx(16.0).epsilon(0.1));
  CHECK(mid_ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("commuting generators propagate by the integrated exponential") {
  const InteractionPath path = models::commuting_path();
  const Volume v = Volume::chain(3);
  const Matrix h1 = local_hamiltonian(path.at(0.0), v).matrix;
  // int_0^1 (1 + tau) d tau = 3/2.
  const Matrix expected = testing::taylor_evolve(h1, 2.0 * 1.5);
  const auto r = propagate(path, v, 2.0, 0.0, 1.0);
  CHECK((r.unitary - expected).norm() < 1e-11);
  CHECK(r.unitarity_drift < 1e-12);
}

TEST_CASE("propagators compose along a grid") {
  const GeneratorRule h = models::two_level_gapped().generator();
  IntegratorConfig cfg;
  cfg.adaptive = true;
  cfg.tolerance = 1e-13;
  const Propagator prop(h, 5.0, cfg);
  const std::vector<double> grid{0.0, 0.3, 0.7, 1.0};
  const auto table = prop.tabulate(grid);
  const Matrix direct = prop.evolve(0.0, 1.0).unitary;
  CHECK((table.back().unitary - direct).norm() < 1e-10);
  const Matrix split = prop.evolve(0.3, 1.0).unitary * prop.evolve(0.0, 0.3).unitary;
  CHECK((split - direct).norm() < 1e-10);
}

TEST_CASE("adaptive stepping meets its tolerance or reports the budget") {
  const GeneratorRule h = models::standard_two_level().generator();
  const Matrix ref = rk4_reference(h, 3.0, 0.0, 1.0);
  IntegratorConfig cfg;
  cfg.adaptive = true;
  cfg.tolerance = 1e-12;
  CHECK(operator_norm(propagate(h, 3.0, 0.0, 1.0, cfg).unitary - ref) < 1e-11);
  cfg.steps_factor = 0.1;
  cfg.max_steps = 4;
  CHECK_THROWS_AS(propagate(h, 3.0, 0.0, 1.0, cfg), NumericalError);
}

TEST_CASE("integrator settings are validated") {
  IntegratorConfig cfg;
  cfg.tolerance = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.reprojection_threshold = 1e-6;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  CHECK(parse_scheme("midpoint") == Scheme::midpoint);
  CHECK_THROWS_AS(parse_scheme("euler"), ValidationError);
}

TEST_CASE("Trotter products converge at first order") {
  const GeneratorRule h = models::standard_two_level().generator();
  const Matrix ref = rk4_reference(h, 1.0, 0.0, 1.0);
  const double e1 = operator_norm(trotter_product(h, 1.0, 0.0, 1.0, 64) - ref);
  const double e2 = operator_norm(trotter_product(h, 1.0, 0.0, 1.0, 128) - ref);
  CHECK(e2 / e1 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Trotter product on a chain path matches the propagator") {
  const InteractionPath path = models::transverse_field_path();
  const Volume v = Volume::chain(3);
  const Matrix u = propagate(path, v, 1.0, 0.0, 0.5).unitary;
  CHECK(operator_norm(trotter_product(path, v, 1.0, 0.0, 0.5, 2000) - u) < 2e-3);
}

TEST_CASE("Dyson partial sums approach the Heisenberg image inside the radius") {
  const InteractionPath path = models::standard_two_level_path();
  const Volume v = Volume::chain(1);
  const Matrix a = pauli::z();
  const double T = 0.3;
  const double tau = 0.2;
  const Matrix u = propagate(path, v, T, 0.0, tau).unitary;
  const Matrix exact = u.adjoint() * a * u;
  const auto d2 = dyson_partial_sum(path, v, 0.0, tau, 2, a, T);
  const auto d6 = dyson_partial_sum(path, v, 0.0, tau, 6, a, T);
  const double e2 = operator_norm(d2.value - exact);
  const double e6 = operator_norm(d6.value - exact);
  CHECK(e6 < e2);
  CHECK(e6 < 1e-7);
  CHECK_THROWS_AS(dyson_partial_sum(path, v, 0.0, tau, 7, a, T), ValidationError);
  CHECK_THROWS_AS(dyson_partial_sum(path, v, 0.0, 1.0, 2, a, 50.0), ValidationError);
}

TEST_CASE("derivation bound holds for a transverse Ising chain") {
  const LocalTerm a({{0}}, pauli::x());
  for (int n = 0; n <= 3; ++n) {
    const auto r = derivation_bound_check(ising_chain(1.0, 0.2, 0.7), a, n);
    CHECK(r.ok);
    CHECK(r.measured <= r.bound);
  }
}

TEST_CASE("Cesaro averages: quadrature, closed form and dephasing") {
  std::mt19937_64 rng(19);
  const Matrix h = testing::random_hermitian(4, rng);
  const Matrix a = testing::random_hermitian(4, rng);
  const auto omega = testing::random_state(4, rng);
  const auto r = cesaro_average(omega, h, a, 7.0, 64);
  CHECK(std::abs(r.quadrature - r.exact) < 1e-12);
  const auto far = cesaro_average(omega, h, a, 1e8, 4);
  CHECK(std::abs(far.exact - far.dephased) < 1e-6);
  const auto state = cesaro_state(omega, h, 7.0);
  CHECK(std::abs(state.expectation(a) - r.exact) < 1e-12);
}

TEST_CASE("time averaging never lowers the entropy") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 10; ++k) {
    const Matrix h = testing::random_hermitian(8, rng);
    const auto omega = testing::random_state(8, rng, 2);
    const double s0 = entropy(omega);
    CHECK(entropy(cesaro_state(omega, h, 3.0)) >= s0 - 1e-10);
    CHECK(entropy(dephased_state(omega, h)) >= s0 - 1e-10);
  }
}
