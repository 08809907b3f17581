#include "adialab/thermo.hpp"

#include "adialab/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace adialab {

namespace {

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// log sum_i exp(w_i) where max_i w_i = 0; log1p keeps excited weights below machine epsilon.
double log_sum_shifted(const RealVector& w) {
  Eigen::Index top = 0;
  w.maxCoeff(&top);
  double rest = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (i != top) rest += std::exp(w(i));
  return std::log1p(rest);
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix rho, double tol) : matrix_(std::move(rho)), cache_(std::make_shared<Cache>()) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw ValidationError("density matrix must be square and non-empty");
  if (!matrix_.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if (!is_hermitian(matrix_, tol)) throw ValidationError("density matrix is not self-adjoint");
  matrix_ = hermitian_part(matrix_);
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > tol * std::max<double>(1.0, static_cast<double>(matrix_.rows())))
    throw ValidationError("density matrix trace differs from 1");
  const Spectrum& sp = spectrum();
  if (sp.values(0) < -tol) throw ValidationError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_spectrum(Spectrum spectrum, std::optional<RealVector> log_probabilities) {
  auto cache = std::make_shared<Cache>();
  Matrix rho = spectrum.vectors * spectrum.values.cast<Complex>().asDiagonal() * spectrum.vectors.adjoint();
  cache->spectrum = std::move(spectrum);
  cache->logs = std::move(log_probabilities);
  std::call_once(cache->once, [] {});
  return DensityMatrix(hermitian_part(rho), std::move(cache));
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  Spectrum sp{RealVector::Constant(dim, 1.0 / static_cast<double>(dim)), Matrix::Identity(dim, dim)};
  RealVector logs = RealVector::Constant(dim, -std::log(static_cast<double>(dim)));
  return from_spectrum(std::move(sp), std::move(logs));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n = psi.norm();
  if (n == 0.0 || !std::isfinite(n)) throw ValidationError("pure state needs a non-zero finite vector");
  const Vector v = psi / n;
  return DensityMatrix(v * v.adjoint());
}

const Spectrum& DensityMatrix::spectrum() const {
  std::call_once(cache_->once, [this] { cache_->spectrum = hermitian_spectrum(matrix_); });
  return *cache_->spectrum;
}

double DensityMatrix::expectation(const Matrix& a) const {
  if (a.rows() != matrix_.rows() || a.cols() != matrix_.cols())
    throw ValidationError("expectation: observable dimension mismatch");
  // Tr(rho a) = sum_ij rho_ij a_ji without forming the product.
  return (matrix_.transpose().cwiseProduct(a)).sum().real();
}

DensityMatrix DensityMatrix::conjugated(const Matrix& u, bool keep_spectrum) const {
  Matrix rho = hermitian_part(u * matrix_ * u.adjoint());
  auto cache = std::make_shared<Cache>();
  if (keep_spectrum) {
    const Spectrum& sp = spectrum();
    cache->spectrum = Spectrum{sp.values, u * sp.vectors};
    cache->logs = cache_->logs;
    std::call_once(cache->once, [] {});
  }
  return DensityMatrix(std::move(rho), std::move(cache));
}

GibbsState gibbs(const Spectrum& sp, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("gibbs: beta must be finite and non-negative");
  const double lowest = sp.values.minCoeff();
  RealVector w = -beta * (sp.values.array() - lowest);
  const double log_z_shifted = log_sum_shifted(w);
  RealVector logs = w.array() - log_z_shifted;
  RealVector probs = logs.array().exp();
  const double log_z = -beta * lowest + log_z_shifted;
  return GibbsState{DensityMatrix::from_spectrum(Spectrum{std::move(probs), sp.vectors}, std::move(logs)), log_z};
}

GibbsState gibbs(const Matrix& h, double beta) {
  if (!is_hermitian(h, 1e-12)) throw ValidationError("gibbs: Hamiltonian is not self-adjoint");
  return gibbs(hermitian_spectrum(hermitian_part(h)), beta);
}

double log_partition(const Matrix& h, double beta) {
  if (!is_hermitian(h, 1e-12)) throw ValidationError("log_partition: Hamiltonian is not self-adjoint");
  const RealVector ev = hermitian_eigenvalues(hermitian_part(h));
  const double lowest = ev.minCoeff();
  return -beta * lowest + log_sum_shifted(-beta * (ev.array() - lowest));
}

double pressure(const Interaction& phi, const Volume& volume, double beta) {
  const Matrix h = local_hamiltonian(phi, volume).matrix;
  return log_partition(h, beta) / static_cast<double>(volume.num_sites());
}

PressureFit pressure_extrapolate(const Interaction& phi, const std::vector<int>& lengths, double beta,
                                 Boundary boundary, int max_sites) {
  if (lengths.size() < 3) throw ValidationError("pressure_extrapolate needs at least 3 volumes");
  if (!std::is_sorted(lengths.begin(), lengths.end()) ||
      std::adjacent_find(lengths.begin(), lengths.end()) != lengths.end())
    throw ValidationError("pressure_extrapolate: volumes must strictly increase");
  PressureFit fit;
  fit.lengths = lengths;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(lengths.size()), 2);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(lengths.size()));
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const Volume vol = Volume::chain(lengths[k], boundary, 0, max_sites);
    const double p = pressure(phi, vol, beta);
    fit.pressures.push_back(p);
    design(static_cast<Eigen::Index>(k), 0) = 1.0;
    design(static_cast<Eigen::Index>(k), 1) = 1.0 / lengths[k];
    rhs(static_cast<Eigen::Index>(k)) = p;
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  fit.estimate = coef(0);
  fit.slope = coef(1);
  const Eigen::VectorXd res = rhs - design * coef;
  fit.residuals.assign(res.data(), res.data() + res.size());
  fit.max_residual = res.cwiseAbs().maxCoeff();
  return fit;
}

double entropy(const DensityMatrix& rho) {
  const Spectrum& sp = rho.spectrum();
  const auto& logs = rho.log_probabilities();
  double s = 0.0;
  for (Eigen::Index k = 0; k < sp.size(); ++k) {
    const double p = sp.values(k);
    s -= logs ? (p > 0.0 ? p * (*logs)(k) : 0.0) : xlogx(p);
  }
  return std::max(s, 0.0);
}

RelativeEntropy relative_entropy(const DensityMatrix& nu, const DensityMatrix& omega) {
  if (nu.dimension() != omega.dimension()) throw ValidationError("relative_entropy: dimension mismatch");
  const Spectrum& w = omega.spectrum();
  const auto& wlogs = omega.log_probabilities();
  // Diagonal of nu in the eigenbasis of omega.
  const RealVector weights = (w.vectors.adjoint() * nu.matrix() * w.vectors).diagonal().real();
  double cross = 0.0;  // Tr nu log omega
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (wlogs) {
      cross += weights(j) * (*wlogs)(j);
      continue;
    }
    const double q = w.values(j);
    if (q <= kSupportThreshold) {
      if (weights(j) > kSupportThreshold) return RelativeEntropy{std::numeric_limits<double>::infinity(), false};
      continue;
    }
    cross += weights(j) * std::log(q);
  }
  // Rounding can leave a value of order -1e-16 for nu close to omega.
  return RelativeEntropy{std::max(0.0, -entropy(nu) - cross), true};
}

WeakGibbsBalance weak_gibbs_balance(const DensityMatrix& nu, const Matrix& h, double beta) {
  const GibbsState g = gibbs(h, beta);
  WeakGibbsBalance out;
  out.relative_entropy = relative_entropy(nu, g.state);
  out.entropy = entropy(nu);
  out.energy = nu.expectation(h);
  out.log_partition = g.log_partition;
  out.residual = out.relative_entropy.finite
                     ? out.relative_entropy.value - (-out.entropy + beta * out.energy + out.log_partition)
                     : std::numeric_limits<double>::infinity();
  return out;
}

double weak_gibbs_residual(const DensityMatrix& nu, const Interaction& phi, const Volume& volume, double beta) {
  const Matrix h = local_hamiltonian(phi, volume).matrix;
  if (nu.dimension() != h.rows()) throw ValidationError("weak_gibbs_residual: state dimension mismatch");
  return weak_gibbs_balance(nu, h, beta).residual;
}

double trace_distance(const DensityMatrix& nu, const DensityMatrix& omega) {
  if (nu.dimension() != omega.dimension()) throw ValidationError("trace_distance: dimension mismatch");
  return hermitian_eigenvalues(hermitian_part(nu.matrix() - omega.matrix())).cwiseAbs().sum();
}

bool pinsker_holds(double distance, const RelativeEntropy& s, double slack) {
  if (!s.finite) return true;
  return distance * distance <= 2.0 * s.value + slack;
}

bool pinsker_check(const DensityMatrix& nu, const DensityMatrix& omega, double slack) {
  return pinsker_holds(trace_distance(nu, omega), relative_entropy(nu, omega), slack);
}

Matrix bloch_state(const std::array<double, 3>& r) {
  if (r[0] * r[0] + r[1] * r[1] + r[2] * r[2] > 1.0 + 1e-12) throw ValidationError("Bloch vector longer than 1");
  return 0.5 * (pauli::identity() + r[0] * pauli::x() + r[1] * pauli::y() + r[2] * pauli::z());
}

namespace {

struct ProductFunctional {
  struct Entry {
    Matrix matrix;
    double count;
  };
  std::vector<Entry> entries;
  double sites = 1.0;
  double beta = 1.0;

  ProductFunctional(const Interaction& phi, const Volume& volume, double b)
      : sites(static_cast<double>(volume.num_sites())), beta(b) {
    for (const auto& placed : translates_in(phi, volume)) {
      bool merged = false;
      for (auto& e : entries) {
        if (e.matrix.rows() == placed.term->matrix().rows() && e.matrix == placed.term->matrix()) {
          e.count += 1.0;
          merged = true;
          break;
        }
      }
      if (!merged) entries.push_back(Entry{placed.term->matrix(), 1.0});
    }
  }

  double operator()(const std::array<double, 3>& r) const {
    const double len = std::min(1.0, std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]));
    const double s = -xlogx(0.5 * (1.0 + len)) - xlogx(0.5 * (1.0 - len));
    const Matrix rho = bloch_state(r);
    double energy = 0.0;
    for (const auto& e : entries) {
      Matrix prod = rho;
      while (prod.rows() < e.matrix.rows()) prod = kron(prod, rho);
      energy += e.count * (prod.transpose().cwiseProduct(e.matrix)).sum().real();
    }
    return s - beta * energy / sites;
  }
};

}  // namespace

double product_state_functional(const Interaction& phi, const Volume& volume, const std::array<double, 3>& bloch,
                                double beta) {
  return ProductFunctional(phi, volume, beta)(bloch);
}

VariationalResult variational_scan(const Interaction& phi, const Volume& volume, double beta,
                                   const VariationalOptions& options) {
  if (options.grid_points < 2) throw ValidationError("variational_scan: grid needs at least 2 points per axis");
  const ProductFunctional f(phi, volume, beta);
  VariationalResult out;
  out.value = -std::numeric_limits<double>::infinity();

  const int g = options.grid_points;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) {
        const std::array<double, 3> r{-1.0 + 2.0 * i / (g - 1), -1.0 + 2.0 * j / (g - 1), -1.0 + 2.0 * k / (g - 1)};
        if (r[0] * r[0] + r[1] * r[1] + r[2] * r[2] > 1.0) continue;
        const double v = f(r);
        ++out.evaluations;
        if (v > out.value) {
          out.value = v;
          out.bloch = r;
        }
      }

  // Coordinate ascent inside the Bloch ball.
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const double before = out.value;
    for (int axis = 0; axis < 3; ++axis) {
      std::array<double, 3> r = out.bloch;
      double others = 0.0;
      for (int a = 0; a < 3; ++a)
        if (a != axis) others += r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(a)];
      const double bound = std::sqrt(std::max(0.0, 1.0 - others));
      if (bound == 0.0) continue;
      auto neg = [&](double x) {
        std::array<double, 3> q = r;
        q[static_cast<std::size_t>(axis)] = x;
        return -f(q);
      };
      std::uintmax_t iters = 200;
      const auto [x, fx] = boost::math::tools::brent_find_minima(neg, -bound, bound, 52, iters);
      out.evaluations += static_cast<int>(iters);
      if (-fx > out.value) {
        out.value = -fx;
        out.bloch[static_cast<std::size_t>(axis)] = x;
      }
    }
    if (out.value - before <= options.sweep_tolerance) break;
  }

  out.pressure = pressure(phi, volume, beta);
  out.gap = out.pressure - out.value;
  return out;
}

ThermoReport thermo_report(const Interaction& phi, const Volume& volume, double beta) {
  const Matrix h = local_hamiltonian(phi, volume).matrix;
  const GibbsState g = gibbs(h, beta);
  const auto n = static_cast<double>(volume.num_sites());
  ThermoReport rep;
  rep.sites = volume.num_sites();
  rep.beta = beta;
  rep.log_partition = g.log_partition;
  rep.pressure = g.log_partition / n;
  rep.entropy_per_site = entropy(g.state) / n;
  rep.energy_per_site = g.state.expectation(h) / n;
  rep.residual = weak_gibbs_balance(g.state, h, beta).residual;
  return rep;
}

}  // namespace adialab
