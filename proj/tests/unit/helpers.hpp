#pragma once

#include "adialab/linalg.hpp"
#include "adialab/thermo.hpp"

#include <random>

namespace testing {

inline adialab::Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  adialab::Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = {g(rng), g(rng)};
  return 0.5 * (m + m.adjoint());
}

inline adialab::DensityMatrix random_state(int dim, std::mt19937_64& rng, int rank = -1) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int cols = rank > 0 ? rank : dim;
  adialab::Matrix a(dim, cols);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = {g(rng), g(rng)};
  adialab::Matrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return adialab::DensityMatrix(0.5 * (rho + rho.adjoint()));
}

/// Independent matrix exponential e^{-itH} by scaling and squaring of a Taylor series.
inline adialab::Matrix taylor_evolve(const adialab::Matrix& h, double t) {
  using adialab::Matrix;
  const double norm = h.cwiseAbs().rowwise().sum().maxCoeff() * std::abs(t);
  int squarings = 0;
  while (norm / (1 << squarings) > 0.25) ++squarings;
  const Matrix x = adialab::Complex{0.0, -t / (1 << squarings)} * h;
  Matrix term = Matrix::Identity(h.rows(), h.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = (term * x / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = (sum * sum).eval();
  return sum;
}

}  // namespace testing
