#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string_view>

namespace adialab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Real symmetric inputs are diagonalized in real arithmetic and diagonal
/// inputs are read off directly; both are exact structural shortcuts, not
/// approximations.
struct Spectrum {
  RealVector values;
  Matrix vectors;

  [[nodiscard]] Eigen::Index size() const { return values.size(); }

  /// V f(D) V^dagger for a scalar function applied to the eigenvalues.
  template <typename F>
  [[nodiscard]] Matrix apply(F&& f) const {
    Vector diag(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) diag(k) = f(values(k));
    return vectors * diag.asDiagonal() * vectors.adjoint();
  }
};

Spectrum hermitian_spectrum(const Matrix& h);
RealVector hermitian_eigenvalues(const Matrix& h);

/// e^{-i t H} for Hermitian H.
Matrix hermitian_exp(const Matrix& h, double t);

/// Largest singular value.
double operator_norm(const Matrix& m);
/// Largest |eigenvalue| of a Hermitian matrix.
double hermitian_norm(const Matrix& h);
/// Sum of singular values.
double trace_norm(const Matrix& m);

/// ||M - M^dagger||_F.
double hermiticity_defect(const Matrix& m);
/// ||M - M^dagger||_F <= tol * max(||M||_F, 1e-300); zero passes.
bool is_hermitian(const Matrix& m, double tol = 1e-12);
Matrix hermitian_part(const Matrix& m);

bool is_real(const Matrix& m);
bool is_diagonal(const Matrix& m);

/// ||U^dagger U - I||_F.
double unitarity_defect(const Matrix& u);
/// Closest unitary in Frobenius norm (polar factor).
Matrix polar_unitary(const Matrix& m);

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
/// Tensor product of single-qubit Paulis, e.g. "ZZ", "XIY"; leftmost factor first.
Matrix from_string(std::string_view word);
}  // namespace pauli

}  // namespace adialab
