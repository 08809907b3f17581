#pragma once

#include "adialab/dynamics.hpp"
#include "adialab/interactions.hpp"
#include "adialab/lattice.hpp"
#include "adialab/thermo.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace adialab {

/// Stated in every scan report: the instantaneous equilibrium is a surrogate.
inline constexpr const char* kEquilibriumSurrogateNote =
    "instantaneous equilibrium realized as the finite-volume Gibbs state at the given beta";

using MatrixRule = std::function<Matrix(double)>;

/// Tracked eigenvalue band: `count` consecutive eigenvalues starting at index
/// `first` of the ascending spectrum of H(0).
struct BandSelector {
  int first = 0;
  int count = 1;
};

/// H(tau) = H + V(tau) with derivative rule dV/dtau.
struct MatrixModel {
  std::string name;
  Matrix base;
  MatrixRule perturbation;
  MatrixRule perturbation_derivative;
  double beta = 1.0;
  BandSelector band;
  /// Smooth projection family P(tau) for gapless scans; empty when not supplied.
  MatrixRule projection;

  [[nodiscard]] Matrix hamiltonian(double tau) const { return base + perturbation(tau); }
  [[nodiscard]] GeneratorRule generator() const;
  [[nodiscard]] Eigen::Index dimension() const { return base.rows(); }

  /// Dimensions, self-adjointness of V and dV at the probes, and agreement of
  /// dV with central differences of V (relative 1e-5).
  void validate(int probes = 11) const;

  /// base = 0, V(tau) = H_Lambda(Psi_tau), dV = H_Lambda(dPsi/dtau).
  static MatrixModel from_path(const InteractionPath& path, const Volume& volume, double beta = 1.0,
                               std::string name = "path");
};

namespace models {
/// H = sigma_z, V(tau) = tau sigma_x.
MatrixModel two_level_gapped();
/// H = sigma_z, V = sigma_x / 2 for all tau.
MatrixModel two_level_constant();
/// cos(angle tau) sigma_z + sin(angle tau) sigma_x: isospectral, populations of
/// the driven state lag behind the rotating eigenbasis.
MatrixModel two_level_rotating(double angle = 1.5707963267948966);
/// (tau - 1/2) n(tau).sigma with n(tau) = (sin(angle tau), 0, cos(angle tau)):
/// eigenvalues cross at tau = 1/2; P(tau) = (I + n(tau).sigma)/2 is supplied.
MatrixModel crossing(double angle = 0.7853981633974483);
/// sigma_z (x) I + tau sigma_x (x) I with the rank-2 lower band tracked.
MatrixModel degenerate_four_level();
/// V(tau) = (tau - 1/2) sigma_z with H = 0: the gap closes at tau = 1/2.
MatrixModel closing_gap();
/// (1 - tau) sigma_z + tau sigma_x: the standard non-commuting test path.
MatrixModel standard_two_level();
/// The same path as a single-site interaction path (weight r = 1).
InteractionPath standard_two_level_path();
/// Transverse-field chain path: Phi_0 = ZZ + g0 X, Phi_1 = ZZ + g1 X, lambda(tau) = tau.
InteractionPath transverse_field_path(double g0 = 0.5, double g1 = 1.5, std::vector<double> lambda = {0.0, 1.0});
/// Commuting path Psi_tau = (1 + tau) Phi with Phi = ZZ + 0.3 Z (pure sigma_z terms).
InteractionPath commuting_path();
/// Ising (ZZ) to transverse field (X) interpolation with lambda(tau) = tau^2.
InteractionPath ising_to_transverse_path();

std::vector<std::string> names();
MatrixModel by_name(const std::string& name);
}  // namespace models

/// Uniform grid of `points` values covering [0, 1].
std::vector<double> uniform_grid(int points);

struct KatoRow {
  double T = 0.0;
  double d = 0.0;          // max over the tau grid of ||(I - P(tau)) U P(0)||
  double worst_tau = 0.0;
  int steps = 0;
};

struct KatoResult {
  std::vector<KatoRow> rows;
  double slope = 0.0;      // least-squares slope of log d against log T
  double min_gap = 0.0;
  double min_gap_tau = 0.0;
};

/// Spectral projections of the tracked band along the grid, continued by
/// maximal overlap with the previous band; reports the smallest gap.
struct ProjectionTrack {
  std::vector<Matrix> projections;
  double min_gap = 0.0;
  double min_gap_tau = 0.0;
};

ProjectionTrack track_band(const MatrixModel& model, const std::vector<double>& tau_grid,
                           double gap_threshold = 1e-8);

/// Throws GapClosedError when the tracked band comes within 1e-8 of the rest.
KatoResult kato_scan(const MatrixModel& model, const std::vector<double>& T_grid,
                     const std::vector<double>& tau_grid, const IntegratorConfig& cfg = {}, int threads = 0);

/// Uses the model's supplied projection family; ValidationError if any
/// supplied P(tau) has ||P^2 - P|| > 1e-9 or is not self-adjoint.
std::vector<KatoRow> gapless_scan(const MatrixModel& model, const std::vector<double>& T_grid,
                                  const std::vector<double>& tau_grid, const IntegratorConfig& cfg = {},
                                  int threads = 0);

/// Least-squares slope of log y against log x over positive entries.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct BalanceRow {
  double tau = 0.0;
  double lhs = 0.0;   // S(driven | instantaneous Gibbs)
  double rhs = 0.0;   // beta int_0^tau (driven - instantaneous)(dV) d sigma
  double residual = 0.0;
};

struct BalanceResult {
  double T = 0.0;
  std::vector<BalanceRow> rows;
  double max_residual = 0.0;
};

/// Relative-entropy side from the propagated Gibbs state; pairing side by
/// adaptive Gauss-Kronrod quadrature, segment by segment along the grid.
BalanceResult entropy_balance_check(const MatrixModel& model, double T, const std::vector<double>& tau_grid,
                                    const IntegratorConfig& cfg = {}, double quadrature_tolerance = 1e-12);

struct GammaResult {
  double defect = 0.0;                       // ||U - e^{-i(t-s)T H(t)} Gamma^dagger||
  double delta_identity_defect = 0.0;        // ||i[H(t), G] - (e^{iXH} dV e^{-iXH} - dV)||
  double gamma_unitarity = 0.0;              // ||Gamma^dagger Gamma - I||_F
  double generator_quadrature_defect = 0.0;  // closed form vs quadrature of G
  int steps = 0;
};

/// G_t = T int_s^t e^{i(r-s)T H(t)} dV(t) e^{-i(r-s)T H(t)} dr in closed form.
Matrix gamma_generator(const MatrixModel& model, double T, double s, double t);

/// Solves the Cauchy problem for Gamma with the same integrator family and
/// compares the factorized propagator with the directly integrated one.
GammaResult gamma_factorization_check(const MatrixModel& model, double T, double s, double t,
                                      const IntegratorConfig& cfg = {});

struct IsothermalRow {
  double T = 0.0;
  double sup_trace_distance = 0.0;
  double sup_relative_entropy = 0.0;
  double sup_pairing_defect = 0.0;
  bool pinsker_ok = true;  // every tau row and the sup row
};

std::vector<IsothermalRow> isothermal_equivalence_scan(const MatrixModel& model, const std::vector<double>& T_grid,
                                                       const std::vector<double>& tau_grid,
                                                       const IntegratorConfig& cfg = {}, int threads = 0);

struct ScanRecord {
  double T = 0.0;
  double tau = 0.0;
  double relative_entropy = 0.0;
  double relative_entropy_per_site = 0.0;
  bool relative_entropy_finite = true;
  double trace_distance = 0.0;
  double trace_distance_per_site = 0.0;
  double pairing_driven = 0.0;
  double pairing_instantaneous = 0.0;
  double entropy_per_site = 0.0;
  double entropy_drift = 0.0;  // |S(driven(tau)) - S(driven(0))|, global
  bool pinsker_ok = true;
  int steps = 0;
};

/// Bulk average of the energy-density observable of `phi` over every
/// placement whose support keeps `margin` sites from the boundary.
Matrix bulk_energy_density(const Interaction& phi, const Volume& volume, int margin);

struct ManyBodyOptions {
  /// Tight re-projection keeps the conserved entropy exact to ~1e-12.
  IntegratorConfig cfg = [] {
    IntegratorConfig c;
    c.reprojection_threshold = 1e-12;
    return c;
  }();
  double beta = 1.0;
  int threads = 0;
};

std::vector<ScanRecord> many_body_scan(const InteractionPath& path, const Volume& volume,
                                       const std::vector<double>& T_grid, const std::vector<double>& tau_grid,
                                       const ManyBodyOptions& options = {});

struct PressureDerivativeRow {
  double tau = 0.0;
  double fd_derivative = 0.0;       // finite difference of P_Lambda(Psi_tau)
  double gibbs_expectation = 0.0;   // -beta Tr(omega_tau dH_Lambda)/|Lambda|
  double residual = 0.0;
  double step = 0.0;
};

struct PressureDerivativeResult {
  std::vector<PressureDerivativeRow> rows;
  double max_residual = 0.0;
  bool refined = false;
};

/// Central differences (one-sided second-order stencils at the ends of
/// [0, 1]); refines the step once by 4 if the residual exceeds `tolerance`.
PressureDerivativeResult pressure_derivative_check(const InteractionPath& path, const Volume& volume,
                                                   const std::vector<double>& tau_grid, double beta = 1.0,
                                                   double step = 1e-4, double tolerance = 1e-6);

struct DichotomyRow {
  std::string label;   // initial | cesaro | dephased | driven-endpoint
  double horizon = 0.0;
  double entropy_per_site = 0.0;
  double delta_vs_initial = 0.0;
};

struct AdiabaticEndpoint {
  InteractionPath path;
  double T = 1.0;
  IntegratorConfig cfg;
};

/// Entropy bookkeeping at finite volume: the driven endpoint keeps the initial
/// entropy exactly while time-averaged states under H_Lambda(phi1) cannot
/// lower it.
std::vector<DichotomyRow> entropy_dichotomy_report(const DensityMatrix& nu0, const Interaction& phi1,
                                                   const Volume& volume, const std::vector<double>& horizons,
                                                   const std::optional<AdiabaticEndpoint>& endpoint = std::nullopt);

}  // namespace adialab
