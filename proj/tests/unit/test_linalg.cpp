#include "adialab/linalg.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace adialab;

TEST_CASE("pauli words are tensor products with the leftmost factor first") {
  CHECK((pauli::from_string("ZX") - kron(pauli::z(), pauli::x())).norm() == 0.0);
  CHECK(pauli::from_string("ZI").isApprox(kron(pauli::z(), pauli::identity())));
}

TEST_CASE("hermitian_exp agrees with an independent Taylor exponential") {
  std::mt19937_64 rng(3);
  for (int dim : {2, 4, 8}) {
    const Matrix h = testing::random_hermitian(dim, rng);
    CHECK((hermitian_exp(h, 0.7) - testing::taylor_evolve(h, 0.7)).norm() < 1e-12);
  }
}

TEST_CASE("norms of a diagonal matrix") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1.0, -4.0, 2.0;
  CHECK(operator_norm(d) == doctest::Approx(4.0));
  CHECK(hermitian_norm(d) == doctest::Approx(4.0));
  CHECK(trace_norm(d) == doctest::Approx(7.0));
}

TEST_CASE("polar_unitary repairs a slightly perturbed unitary") {
  std::mt19937_64 rng(5);
  const Matrix u = hermitian_exp(testing::random_hermitian(8, rng), 1.3);
  const Matrix noisy = u + 1e-6 * testing::random_hermitian(8, rng);
  const Matrix p = polar_unitary(noisy);
  CHECK(unitarity_defect(p) < 1e-13);
  CHECK((p - u).norm() < 1e-5);
  // Far from unitary: still the polar factor.
  CHECK(unitarity_defect(polar_unitary(testing::random_hermitian(4, rng))) < 1e-12);
}

TEST_CASE("structural shortcuts give the same spectrum as the general path") {
  std::mt19937_64 rng(7);
  Matrix real = testing::random_hermitian(6, rng).real().cast<Complex>();
  real = 0.5 * (real + real.adjoint()).eval();
  CHECK(is_real(real));
  const Spectrum s = hermitian_spectrum(real);
  CHECK((s.vectors * s.values.cast<Complex>().asDiagonal() * s.vectors.adjoint() - real).norm() < 1e-12);
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 3.0, -1.0, 2.0;
  CHECK(hermitian_eigenvalues(diag)(0) == doctest::Approx(-1.0));
}
