#include "adialab/adiabatic.hpp"
#include "adialab/errors.hpp"

#include <cmath>

namespace adialab::models {

namespace {

Matrix constant_matrix(const Matrix& m) { return m; }

}  // namespace

MatrixModel two_level_gapped() {
  MatrixModel m;
  m.name = "two-level-gapped";
  m.base = pauli::z();
  m.perturbation = [](double tau) { return Matrix(tau * pauli::x()); };
  m.perturbation_derivative = [](double) { return pauli::x(); };
  return m;
}

MatrixModel two_level_constant() {
  MatrixModel m;
  m.name = "two-level-constant";
  m.base = pauli::z();
  m.perturbation = [](double) { return Matrix(0.5 * pauli::x()); };
  m.perturbation_derivative = [](double) { return Matrix(Matrix::Zero(2, 2)); };
  return m;
}

MatrixModel two_level_rotating(double angle) {
  MatrixModel m;
  m.name = "two-level-rotating";
  m.base = Matrix::Zero(2, 2);
  m.perturbation = [angle](double tau) {
    return Matrix(std::cos(angle * tau) * pauli::z() + std::sin(angle * tau) * pauli::x());
  };
  m.perturbation_derivative = [angle](double tau) {
    return Matrix(angle * (-std::sin(angle * tau) * pauli::z() + std::cos(angle * tau) * pauli::x()));
  };
  return m;
}

MatrixModel crossing(double angle) {
  MatrixModel m;
  m.name = "crossing";
  m.base = Matrix::Zero(2, 2);
  const auto axis = [angle](double tau) {
    return Matrix(std::sin(angle * tau) * pauli::x() + std::cos(angle * tau) * pauli::z());
  };
  const auto axis_dot = [angle](double tau) {
    return Matrix(angle * (std::cos(angle * tau) * pauli::x() - std::sin(angle * tau) * pauli::z()));
  };
  m.perturbation = [axis](double tau) { return Matrix((tau - 0.5) * axis(tau)); };
  m.perturbation_derivative = [axis, axis_dot](double tau) { return Matrix(axis(tau) + (tau - 0.5) * axis_dot(tau)); };
  m.projection = [axis](double tau) { return Matrix(0.5 * (pauli::identity() + axis(tau))); };
  return m;
}

MatrixModel degenerate_four_level() {
  MatrixModel m;
  m.name = "degenerate-four-level";
  m.base = kron(pauli::z(), pauli::identity());
  const Matrix x = kron(pauli::x(), pauli::identity());
  m.perturbation = [x](double tau) { return Matrix(tau * x); };
  m.perturbation_derivative = [x](double) { return constant_matrix(x); };
  m.band = BandSelector{0, 2};
  return m;
}

MatrixModel closing_gap() {
  MatrixModel m;
  m.name = "closing-gap";
  m.base = Matrix::Zero(2, 2);
  m.perturbation = [](double tau) { return Matrix((tau - 0.5) * pauli::z()); };
  m.perturbation_derivative = [](double) { return pauli::z(); };
  return m;
}

MatrixModel standard_two_level() {
  MatrixModel m;
  m.name = "standard-two-level";
  m.base = Matrix::Zero(2, 2);
  m.perturbation = [](double tau) { return Matrix((1.0 - tau) * pauli::z() + tau * pauli::x()); };
  m.perturbation_derivative = [](double) { return Matrix(pauli::x() - pauli::z()); };
  return m;
}

InteractionPath standard_two_level_path() {
  return InteractionPath::interpolation(field_interaction(pauli::z(), 1.0), field_interaction(pauli::x(), 1.0),
                                        {0.0, 1.0});
}

InteractionPath transverse_field_path(double g0, double g1, std::vector<double> lambda) {
  return InteractionPath::interpolation(ising_chain(1.0, 0.0, g0), ising_chain(1.0, 0.0, g1), std::move(lambda));
}

InteractionPath commuting_path() {
  const Interaction phi = ising_chain(1.0, 0.3, 0.0);
  return InteractionPath::interpolation(phi, combine(phi, phi, 2.0, 0.0), {0.0, 1.0});
}

InteractionPath ising_to_transverse_path() {
  return InteractionPath::interpolation(ising_chain(1.0, 0.0, 0.0), field_interaction(pauli::x()), {0.0, 0.0, 1.0});
}

std::vector<std::string> names() {
  return {"closing-gap",        "crossing", "degenerate-four-level", "standard-two-level",
          "two-level-constant", "two-level-gapped", "two-level-rotating"};
}

MatrixModel by_name(const std::string& name) {
  if (name == "two-level-gapped") return two_level_gapped();
  if (name == "two-level-constant") return two_level_constant();
  if (name == "two-level-rotating") return two_level_rotating();
  if (name == "crossing") return crossing();
  if (name == "degenerate-four-level") return degenerate_four_level();
  if (name == "closing-gap") return closing_gap();
  if (name == "standard-two-level") return standard_two_level();
  throw ValidationError("unknown builtin model '" + name + "'");
}

}  // namespace adialab::models
