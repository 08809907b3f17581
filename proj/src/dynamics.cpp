#include "adialab/dynamics.hpp"

#include "adialab/errors.hpp"
#include "detail/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace adialab {

std::string to_string(Scheme s) { return s == Scheme::cf4 ? "cf4" : "midpoint"; }

Scheme parse_scheme(const std::string& text) {
  if (text == "cf4") return Scheme::cf4;
  if (text == "midpoint") return Scheme::midpoint;
  throw ValidationError("unknown integrator scheme '" + text + "' (expected cf4 or midpoint)");
}

void IntegratorConfig::validate() const {
  if (steps && *steps < 1) throw ValidationError("integrator steps must be >= 1");
  if (!(steps_factor > 0.0) || !std::isfinite(steps_factor)) throw ValidationError("integrator steps_factor must be > 0");
  if (!(tolerance > 0.0)) throw ValidationError("integrator tolerance must be > 0");
  if (max_steps < 1) throw ValidationError("integrator max_steps must be >= 1");
  if (!(reprojection_threshold > 0.0) || reprojection_threshold > 1e-9)
    throw ValidationError("integrator reprojection_threshold must lie in (0, 1e-9]");
}

namespace {

// Fourth-order commutator-free exponential: nodes 1/2 -+ sqrt(3)/6 and the
// two-exponential splitting of the fourth-order Magnus generator.
const double kSqrt3 = std::sqrt(3.0);
const double kC1 = 0.5 - kSqrt3 / 6.0;
const double kC2 = 0.5 + kSqrt3 / 6.0;
const double kA1 = (3.0 - 2.0 * kSqrt3) / 12.0;
const double kA2 = (3.0 + 2.0 * kSqrt3) / 12.0;

double estimate_norm(const GeneratorRule& h) {
  double best = 0.0;
  for (int k = 0; k <= 20; ++k) best = std::max(best, hermitian_norm(hermitian_part(h(k / 20.0))));
  return best;
}

void check_time(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

Propagator::Propagator(GeneratorRule h, double T, IntegratorConfig cfg, std::optional<double> norm_bound)
    : h_(std::move(h)), T_(T), cfg_(cfg), norm_bound_(0.0) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("T must be finite and non-negative");
  cfg_.validate();
  norm_bound_ = norm_bound ? *norm_bound : estimate_norm(h_);
}

int Propagator::step_count(double sigma, double tau) const {
  const double len = std::abs(tau - sigma);
  double n = cfg_.steps ? *cfg_.steps * len : cfg_.steps_factor * T_ * norm_bound_ * len;
  n = std::max(1.0, std::ceil(n - 1e-9));
  if (n > cfg_.max_steps)
    throw NumericalError("step budget exhausted: " + std::to_string(static_cast<long long>(n)) +
                         " steps needed, max_steps is " + std::to_string(cfg_.max_steps));
  return static_cast<int>(n);
}

Matrix Propagator::fixed(double sigma, double tau, int steps) const {
  const double h = (tau - sigma) / steps;
  const double scale = h * T_;
  Matrix u;
  for (int k = 0; k < steps; ++k) {
    const double a = sigma + k * h;
    Matrix step;
    if (cfg_.scheme == Scheme::midpoint) {
      step = hermitian_exp(hermitian_part(h_(a + 0.5 * h)), scale);
    } else {
      const Matrix h1 = h_(a + kC1 * h);
      const Matrix h2 = h_(a + kC2 * h);
      const Matrix late = hermitian_part(kA1 * h1 + kA2 * h2);
      const Matrix early = hermitian_part(kA2 * h1 + kA1 * h2);
      step = hermitian_exp(late, scale) * hermitian_exp(early, scale);
    }
    u = (k == 0) ? step : Matrix(step * u);
  }
  return u;
}

PropagationResult Propagator::evolve(double sigma, double tau) const {
  check_time(sigma, "sigma");
  check_time(tau, "tau");
  PropagationResult out;
  const Eigen::Index dim = h_(sigma).rows();
  if (T_ == 0.0 || sigma == tau) {
    out.unitary = Matrix::Identity(dim, dim);
    return out;
  }
  int n = step_count(sigma, tau);
  Matrix u = fixed(sigma, tau, n);
  if (cfg_.adaptive) {
    for (;;) {
      if (2LL * n > cfg_.max_steps)
        throw NumericalError("step budget exhausted: adaptive defect " + std::to_string(out.adaptive_defect) +
                             " above tolerance at max_steps " + std::to_string(cfg_.max_steps));
      Matrix finer = fixed(sigma, tau, 2 * n);
      out.adaptive_defect = (finer - u).norm();
      n *= 2;
      u = std::move(finer);
      if (out.adaptive_defect <= cfg_.tolerance) break;
    }
  }
  out.steps = n;
  out.unitarity_drift = unitarity_defect(u);
  if (out.unitarity_drift > cfg_.reprojection_threshold) {
    u = polar_unitary(u);
    out.reprojected = true;
  }
  out.unitary = std::move(u);
  return out;
}

std::vector<PropagationResult> Propagator::tabulate(std::span<const double> grid) const {
  std::vector<PropagationResult> out;
  if (grid.empty()) return out;
  PropagationResult first = evolve(grid[0], grid[0]);
  out.push_back(first);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    PropagationResult seg = evolve(grid[k - 1], grid[k]);
    PropagationResult cum;
    cum.unitary = seg.unitary * out.back().unitary;
    cum.steps = out.back().steps + seg.steps;
    cum.adaptive_defect = std::max(out.back().adaptive_defect, seg.adaptive_defect);
    cum.unitarity_drift = unitarity_defect(cum.unitary);
    cum.reprojected = seg.reprojected;
    if (cum.unitarity_drift > cfg_.reprojection_threshold) {
      cum.unitary = polar_unitary(cum.unitary);
      cum.reprojected = true;
    }
    out.push_back(std::move(cum));
  }
  return out;
}

Matrix frozen_evolve(const Matrix& h, double t) {
  if (!is_hermitian(h, 1e-12)) throw ValidationError("frozen_evolve: Hamiltonian is not self-adjoint");
  return hermitian_exp(hermitian_part(h), t);
}

GeneratorRule hamiltonian_rule(const InteractionPath& path, const Volume& volume) {
  return [path, volume](double tau) { return local_hamiltonian(path.at(tau), volume).matrix; };
}

PropagationResult propagate(const GeneratorRule& h, double T, double sigma, double tau, const IntegratorConfig& cfg) {
  return Propagator(h, T, cfg).evolve(sigma, tau);
}

PropagationResult propagate(const InteractionPath& path, const Volume& volume, double T, double sigma, double tau,
                            const IntegratorConfig& cfg) {
  return propagate(hamiltonian_rule(path, volume), T, sigma, tau, cfg);
}

Matrix trotter_product(const GeneratorRule& h, double T, double sigma, double tau, int N) {
  if (N < 1) throw ValidationError("trotter_product: N must be >= 1");
  check_time(sigma, "sigma");
  check_time(tau, "tau");
  const double xi = (tau - sigma) / N;
  Matrix u = frozen_evolve(h(sigma), xi * T);
  for (int k = 1; k < N; ++k) u = frozen_evolve(h(sigma + k * xi), xi * T) * u;
  return u;
}

Matrix trotter_product(const InteractionPath& path, const Volume& volume, double T, double sigma, double tau, int N) {
  return trotter_product(hamiltonian_rule(path, volume), T, sigma, tau, N);
}

namespace {

struct DysonWork {
  const GeneratorRule& h;
  double T;
  double sigma;
  int order;
  std::vector<Matrix> terms;

  void accumulate(double upper, const Matrix& x, int depth, double weight) {
    terms[static_cast<std::size_t>(depth)] += weight * x;
    if (depth == order) return;
    const auto& g = detail::Gauss8::get();
    const double half = 0.5 * (upper - sigma);
    for (std::size_t k = 0; k < 8; ++k) {
      const double t = sigma + half * (g.nodes[k] + 1.0);
      const Matrix d = kI * T * commutator(h(t), x);
      accumulate(t, d, depth + 1, weight * half * g.weights[k]);
    }
  }
};

double sampled_path_norm(const InteractionPath& path) {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
  return path_norm_r(path, grid);
}

}  // namespace

DysonResult dyson_partial_sum(const InteractionPath& path, const Volume& volume, double sigma, double tau, int order,
                              const Matrix& a, double T) {
  check_time(sigma, "sigma");
  check_time(tau, "tau");
  if (order < 0) throw ValidationError("dyson_partial_sum: order must be >= 0");
  if (order > kMaxDysonOrder)
    throw ValidationError("dyson_partial_sum: orders above " + std::to_string(kMaxDysonOrder) +
                          " are refused (cost grows as 8^n)");
  if (a.rows() != volume.hilbert_dimension() || a.cols() != a.rows())
    throw ValidationError("dyson_partial_sum: observable dimension mismatch");
  DysonResult out;
  const double norm = sampled_path_norm(path);
  out.radius = norm > 0.0 ? path.weight_r() / (2.0 * norm) : std::numeric_limits<double>::infinity();
  const double span = T * std::abs(tau - sigma);
  if (span >= out.radius)
    throw ValidationError("dyson_partial_sum: T|tau - sigma| = " + std::to_string(span) +
                          " is outside the convergence radius r/(2||Psi||_r) = " + std::to_string(out.radius));

  const GeneratorRule h = hamiltonian_rule(path, volume);
  DysonWork work{h, T, sigma, order, std::vector<Matrix>(static_cast<std::size_t>(order) + 1,
                                                          Matrix::Zero(a.rows(), a.cols()))};
  work.accumulate(tau, a, 0, 1.0);
  out.value = Matrix::Zero(a.rows(), a.cols());
  for (const auto& t : work.terms) {
    out.value += t;
    out.term_norms.push_back(operator_norm(t));
  }
  return out;
}

DerivationBound derivation_bound_check(const InteractionPath& path, const LocalTerm& a, int n, int tuples,
                                       std::mt19937_64& rng) {
  if (n < 0) throw ValidationError("derivation_bound_check: n must be >= 0");
  if (tuples < 1) throw ValidationError("derivation_bound_check: need at least one tau tuple");
  for (const auto& s : a.support())
    if (s.y != 0 || s.z != 0) throw ValidationError("derivation_bound_check supports chains only");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> taus(static_cast<std::size_t>(tuples));
  for (auto& tuple : taus)
    for (int k = 0; k < n; ++k) tuple.push_back(unit(rng));

  int range = 0;
  double norm = 0.0;
  std::vector<double> probes{0.0, 1.0};
  for (const auto& tuple : taus) probes.insert(probes.end(), tuple.begin(), tuple.end());
  for (double t : probes) {
    const Interaction phi = path.at(t);
    if (phi.dimension() != 1) throw ValidationError("derivation_bound_check supports chains only");
    range = std::max(range, phi.range());
  }
  for (const auto& tuple : taus)
    for (double t : tuple) norm = std::max(norm, norm_r(path.at(t)));
  if (n == 0) norm = std::max(norm, norm_r(path.at(0.0)));

  const int lo = a.support().front().x - n * range;
  const int hi = a.support().back().x + n * range;
  const Volume volume = Volume::chain(hi - lo + 1, Boundary::free, lo);

  DerivationBound out;
  out.volume_sites = static_cast<int>(volume.num_sites());
  const DenseOperator a_dense = embed(a, Site{}, volume);
  const double r = path.weight_r();
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  out.bound = operator_norm(a.matrix()) * std::exp(r * static_cast<double>(a.size())) *
              std::pow(2.0 * norm / r, n) * factorial;

  for (const auto& tuple : taus) {
    DenseOperator x = a_dense;
    // delta_{t_1} o ... o delta_{t_n}(a): the last time acts first.
    for (int k = n - 1; k >= 0; --k)
      x = derivation(path.at(tuple[static_cast<std::size_t>(k)]), x, volume, DerivationMode::support_touching);
    out.measured = std::max(out.measured, hermitian_norm(hermitian_part(x.matrix)));
  }
  out.ok = out.measured <= out.bound * (1.0 + 1e-12) + 1e-14;
  return out;
}

DerivationBound derivation_bound_check(const Interaction& phi, const LocalTerm& a, int n) {
  std::mt19937_64 rng(0);
  return derivation_bound_check(InteractionPath::constant(phi), a, n, 1, rng);
}

namespace {

// (e^{ix} - 1)/(ix), continuous at 0.
Complex phase_average(double x) {
  if (std::abs(x) < 1e-8) return Complex{1.0, 0.5 * x};
  return (std::exp(Complex{0.0, x}) - 1.0) / Complex{0.0, x};
}

}  // namespace

CesaroResult cesaro_average(const DensityMatrix& omega, const Matrix& h, const Matrix& a, double horizon, int panels) {
  if (!(horizon > 0.0)) throw ValidationError("cesaro_average: horizon must be > 0");
  if (panels < 1) throw ValidationError("cesaro_average: panels must be >= 1");
  if (!is_hermitian(h, 1e-12)) throw ValidationError("cesaro_average: Hamiltonian is not self-adjoint");
  if (h.rows() != omega.dimension() || a.rows() != omega.dimension())
    throw ValidationError("cesaro_average: dimension mismatch");
  const Spectrum sp = hermitian_spectrum(hermitian_part(h));
  const Matrix w = sp.vectors.adjoint() * omega.matrix() * sp.vectors;
  const Matrix b = sp.vectors.adjoint() * a * sp.vectors;
  const Eigen::Index d = sp.size();
  // Tr(omega e^{itH} a e^{-itH}) = sum_jk c_jk e^{it(E_j - E_k)}.
  Matrix c(d, d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index j = 0; j < d; ++j) c(j, k) = w(k, j) * b(j, k);

  CesaroResult out;
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double delta = sp.values(j) - sp.values(k);
      out.exact += (c(j, k) * phase_average(delta * horizon)).real();
      if (std::abs(delta) <= kDegeneracyTolerance) out.dephased += c(j, k).real();
    }
  const auto f = [&](double t) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index j = 0; j < d; ++j)
        v += (c(j, k) * std::exp(Complex{0.0, t * (sp.values(j) - sp.values(k))})).real();
    return v;
  };
  out.quadrature = detail::composite_gauss(f, 0.0, horizon, panels) / horizon;
  return out;
}

DensityMatrix cesaro_state(const DensityMatrix& omega, const Matrix& h, double horizon) {
  if (!(horizon > 0.0)) throw ValidationError("cesaro_state: horizon must be > 0");
  if (!is_hermitian(h, 1e-12)) throw ValidationError("cesaro_state: Hamiltonian is not self-adjoint");
  const Spectrum sp = hermitian_spectrum(hermitian_part(h));
  Matrix w = sp.vectors.adjoint() * omega.matrix() * sp.vectors;
  for (Eigen::Index k = 0; k < w.cols(); ++k)
    for (Eigen::Index j = 0; j < w.rows(); ++j)
      w(j, k) *= std::conj(phase_average((sp.values(j) - sp.values(k)) * horizon));
  return DensityMatrix(hermitian_part(sp.vectors * w * sp.vectors.adjoint()), 1e-10);
}

DensityMatrix dephased_state(const DensityMatrix& omega, const Matrix& h) {
  if (!is_hermitian(h, 1e-12)) throw ValidationError("dephased_state: Hamiltonian is not self-adjoint");
  const Spectrum sp = hermitian_spectrum(hermitian_part(h));
  Matrix w = sp.vectors.adjoint() * omega.matrix() * sp.vectors;
  for (Eigen::Index k = 0; k < w.cols(); ++k)
    for (Eigen::Index j = 0; j < w.rows(); ++j)
      if (std::abs(sp.values(j) - sp.values(k)) > kDegeneracyTolerance) w(j, k) = 0.0;
  return DensityMatrix(hermitian_part(sp.vectors * w * sp.vectors.adjoint()), 1e-10);
}

}  // namespace adialab
