#include "adialab/linalg.hpp"

#include "adialab/errors.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace adialab {

bool is_real(const Matrix& m) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex{0.0, 0.0}) return false;
  return true;
}

Spectrum hermitian_spectrum(const Matrix& h) {
  const Eigen::Index n = h.rows();
  Spectrum out;
  if (is_diagonal(h)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return h(a, a).real() < h(b, b).real(); });
    out.values.resize(n);
    out.vectors = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto src = order[static_cast<std::size_t>(k)];
      out.values(k) = h(src, src).real();
      out.vectors(src, k) = 1.0;
    }
    return out;
  }
  if (is_real(h)) {
    const RealMatrix re = h.real();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(re);
    if (es.info() != Eigen::Success) throw NumericalError("real symmetric eigensolver failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().cast<Complex>();
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

RealVector hermitian_eigenvalues(const Matrix& h) {
  const Eigen::Index n = h.rows();
  if (is_diagonal(h)) {
    RealVector v = h.diagonal().real();
    std::sort(v.data(), v.data() + n);
    return v;
  }
  if (is_real(h)) {
    const RealMatrix re = h.real();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(re, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Matrix hermitian_exp(const Matrix& h, double t) {
  if (t == 0.0) return Matrix::Identity(h.rows(), h.cols());
  const Spectrum sp = hermitian_spectrum(h);
  return sp.apply([t](double e) { return std::exp(Complex{0.0, -t * e}); });
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 16) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double hermitian_norm(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  const RealVector ev = hermitian_eigenvalues(h);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m, 1e-12)) return hermitian_eigenvalues(hermitian_part(m)).cwiseAbs().sum();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).norm(); }

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.norm();
  if (scale == 0.0) return true;
  return hermiticity_defect(m) <= tol * scale;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

Matrix polar_unitary(const Matrix& m) {
  const Matrix id = Matrix::Identity(m.cols(), m.cols());
  if ((m.adjoint() * m - id).norm() < 0.5) {
    // Newton-Schulz iteration, quadratically convergent near a unitary.
    Matrix u = m;
    for (int k = 0; k < 30; ++k) {
      const Matrix g = u.adjoint() * u;
      if ((g - id).norm() < 1e-15 * std::sqrt(static_cast<double>(m.cols()))) break;
      u = 0.5 * u * (3.0 * id - g);
    }
    return u;
  }
  if (m.rows() <= 16) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace pauli {

Matrix identity() { return Matrix::Identity(2, 2); }

Matrix x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix y() {
  Matrix m(2, 2);
  m << Complex{0.0, 0.0}, Complex{0.0, -1.0}, Complex{0.0, 1.0}, Complex{0.0, 0.0};
  return m;
}

Matrix z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix from_string(std::string_view word) {
  if (word.empty()) throw ValidationError("empty Pauli word");
  Matrix out = Matrix::Identity(1, 1);
  for (char c : word) {
    switch (c) {
      case 'I': out = kron(out, identity()); break;
      case 'X': out = kron(out, x()); break;
      case 'Y': out = kron(out, y()); break;
      case 'Z': out = kron(out, z()); break;
      default: throw ValidationError(std::string("unknown Pauli letter '") + c + "'");
    }
  }
  return out;
}

}  // namespace pauli
}  // namespace adialab
