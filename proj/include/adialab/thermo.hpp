#pragma once

#include "adialab/interactions.hpp"
#include "adialab/lattice.hpp"
#include "adialab/linalg.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace adialab {

/// Positive, unit-trace, self-adjoint matrix with a lazily cached spectrum.
///
/// States built from a Hamiltonian spectrum (gibbs) also carry exact
/// log-probabilities, so logarithms of exponentially small weights never go
/// through a clamp.
class DensityMatrix {
 public:
  /// Validates self-adjointness, trace 1 and eigenvalues >= -tol.
  explicit DensityMatrix(Matrix rho, double tol = 1e-12);

  /// Trusted construction from a spectrum; log_probabilities, if present, are
  /// the exact logs of spectrum.values.
  static DensityMatrix from_spectrum(Spectrum spectrum, std::optional<RealVector> log_probabilities = std::nullopt);
  static DensityMatrix maximally_mixed(Eigen::Index dim);
  static DensityMatrix pure(const Vector& psi);

  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] Eigen::Index dimension() const { return matrix_.rows(); }
  [[nodiscard]] const Spectrum& spectrum() const;
  [[nodiscard]] const std::optional<RealVector>& log_probabilities() const { return cache_->logs; }

  /// Re Tr(rho a).
  [[nodiscard]] double expectation(const Matrix& a) const;
  /// u rho u^dagger. With keep_spectrum the eigenvalues (and exact logs) are
  /// carried over; otherwise the spectrum is recomputed on demand.
  [[nodiscard]] DensityMatrix conjugated(const Matrix& u, bool keep_spectrum = false) const;

 private:
  struct Cache {
    std::once_flag once;
    std::optional<Spectrum> spectrum;
    std::optional<RealVector> logs;
  };
  DensityMatrix(Matrix rho, std::shared_ptr<Cache> cache) : matrix_(std::move(rho)), cache_(std::move(cache)) {}

  Matrix matrix_;
  std::shared_ptr<Cache> cache_;
};

struct GibbsState {
  DensityMatrix state;
  double log_partition;
};

/// e^{-beta H}/Z with log Z computed after shifting by the lowest eigenvalue.
GibbsState gibbs(const Matrix& h, double beta = 1.0);
GibbsState gibbs(const Spectrum& spectrum, double beta = 1.0);
double log_partition(const Matrix& h, double beta = 1.0);

/// log Tr e^{-beta H_Lambda(phi)} / |Lambda|.
double pressure(const Interaction& phi, const Volume& volume, double beta = 1.0);

struct PressureFit {
  std::vector<int> lengths;
  std::vector<double> pressures;
  double estimate = 0.0;   // P_infinity
  double slope = 0.0;      // c in P_L = P_infinity + c / L
  std::vector<double> residuals;
  double max_residual = 0.0;
};

/// Least-squares fit of P_L = P_infinity + c/L over chains of the given lengths.
PressureFit pressure_extrapolate(const Interaction& phi, const std::vector<int>& lengths, double beta = 1.0,
                                 Boundary boundary = Boundary::free, int max_sites = kDefaultMaxSites);

/// Von Neumann entropy in nats, 0 log 0 = 0.
double entropy(const DensityMatrix& rho);

/// S(nu|omega) = Tr nu (log nu - log omega) >= 0, or +infinity when the support
/// of nu is not contained in that of omega.
struct RelativeEntropy {
  double value = 0.0;
  bool finite = true;
};

/// Eigenvalue threshold below which omega is treated as having no support
/// (only used when omega carries no exact log-probabilities).
inline constexpr double kSupportThreshold = 1e-12;

RelativeEntropy relative_entropy(const DensityMatrix& nu, const DensityMatrix& omega);

struct WeakGibbsBalance {
  RelativeEntropy relative_entropy;  // S(nu|omega_Lambda)
  double entropy = 0.0;              // S(nu)
  double energy = 0.0;               // Tr(nu H_Lambda)
  double log_partition = 0.0;        // log Z_Lambda
  double residual = 0.0;             // S(nu|omega) - (-S(nu) + beta energy + log Z)
};

WeakGibbsBalance weak_gibbs_balance(const DensityMatrix& nu, const Matrix& h, double beta = 1.0);
/// The finite-volume identity residual; divide by |Lambda| for the per-site form.
double weak_gibbs_residual(const DensityMatrix& nu, const Interaction& phi, const Volume& volume, double beta = 1.0);

/// Trace norm of nu - omega (no factor 1/2).
double trace_distance(const DensityMatrix& nu, const DensityMatrix& omega);
/// ||nu - omega||_1^2 <= 2 S(nu|omega) + slack; true whenever S is infinite.
bool pinsker_check(const DensityMatrix& nu, const DensityMatrix& omega, double slack = 1e-12);
bool pinsker_holds(double distance, const RelativeEntropy& s, double slack = 1e-12);

struct VariationalOptions {
  int grid_points = 9;      // per Bloch axis
  int max_sweeps = 200;
  double sweep_tolerance = 1e-15;
};

struct VariationalResult {
  double value = 0.0;                 // max of S(rho^n)/n - beta Tr(rho^n H)/n
  std::array<double, 3> bloch{};      // maximizing single-site Bloch vector
  double pressure = 0.0;              // P_Lambda
  double gap = 0.0;                   // P_Lambda - value
  int evaluations = 0;
};

/// Gibbs variational functional over site-wise identical product states.
double product_state_functional(const Interaction& phi, const Volume& volume, const std::array<double, 3>& bloch,
                                double beta = 1.0);
VariationalResult variational_scan(const Interaction& phi, const Volume& volume, double beta = 1.0,
                                   const VariationalOptions& options = {});

struct ThermoReport {
  std::size_t sites = 0;
  double beta = 1.0;
  double log_partition = 0.0;
  double pressure = 0.0;
  double entropy_per_site = 0.0;  // Gibbs state
  double energy_per_site = 0.0;   // Gibbs state
  double residual = 0.0;          // weak-Gibbs identity at the Gibbs state
};

ThermoReport thermo_report(const Interaction& phi, const Volume& volume, double beta = 1.0);

/// 2x2 single-site density matrix (I + r.sigma)/2.
Matrix bloch_state(const std::array<double, 3>& r);

}  // namespace adialab
