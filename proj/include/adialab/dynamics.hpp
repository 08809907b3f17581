#pragma once

#include "adialab/interactions.hpp"
#include "adialab/lattice.hpp"
#include "adialab/linalg.hpp"
#include "adialab/thermo.hpp"

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace adialab {

enum class Scheme { cf4, midpoint };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& text);

/// Step control for non-autonomous propagation.
///
/// Fixed mode uses `steps` per unit interval when given, otherwise
/// N = ceil(steps_factor * T * ||H||_max * |tau - sigma|). Adaptive mode starts
/// from that N and doubles it until two successive results agree to `tolerance`
/// (Frobenius norm), failing once `max_steps` would be exceeded.
struct IntegratorConfig {
  Scheme scheme = Scheme::cf4;
  std::optional<int> steps;
  double steps_factor = 10.0;
  bool adaptive = false;
  double tolerance = 1e-10;
  int max_steps = 1 << 20;
  /// Unitarity drift ||U^dagger U - I||_F above which the polar factor
  /// replaces a computed propagator.
  double reprojection_threshold = 1e-9;

  void validate() const;
};

/// tau -> H(tau), before the T rescaling.
using GeneratorRule = std::function<Matrix(double)>;

struct PropagationResult {
  Matrix unitary;
  int steps = 0;                  // steps of the accepted solution
  double unitarity_drift = 0.0;   // ||U^dagger U - I||_F before any re-projection
  bool reprojected = false;
  double adaptive_defect = 0.0;   // last N vs 2N difference (adaptive mode)
};

/// Schrodinger-picture solution of i dU/dtau = T H(tau) U with U(sigma) = I.
///
/// Heisenberg images are U^dagger A U. Independent evolve calls may run
/// concurrently.
class Propagator {
 public:
  /// norm_bound is ||H||_max over [0,1]; estimated on 21 grid points when absent.
  Propagator(GeneratorRule h, double T, IntegratorConfig cfg = {}, std::optional<double> norm_bound = std::nullopt);

  [[nodiscard]] PropagationResult evolve(double sigma, double tau) const;
  /// U^{grid[0] -> grid[k]} for every k, built segment by segment.
  [[nodiscard]] std::vector<PropagationResult> tabulate(std::span<const double> grid) const;

  [[nodiscard]] double T() const { return T_; }
  [[nodiscard]] double norm_bound() const { return norm_bound_; }
  [[nodiscard]] const IntegratorConfig& config() const { return cfg_; }
  [[nodiscard]] int step_count(double sigma, double tau) const;

 private:
  [[nodiscard]] Matrix fixed(double sigma, double tau, int steps) const;

  GeneratorRule h_;
  double T_;
  IntegratorConfig cfg_;
  double norm_bound_;
};

/// e^{-itH} for self-adjoint H.
Matrix frozen_evolve(const Matrix& h, double t);

/// Generator rule tau -> H_Lambda(Psi_tau).
GeneratorRule hamiltonian_rule(const InteractionPath& path, const Volume& volume);

PropagationResult propagate(const InteractionPath& path, const Volume& volume, double T, double sigma, double tau,
                            const IntegratorConfig& cfg = {});
PropagationResult propagate(const GeneratorRule& h, double T, double sigma, double tau,
                            const IntegratorConfig& cfg = {});

/// e^{-i xi T H(v_{N-1})} ... e^{-i xi T H(v_0)}, v_k = sigma + k xi, xi = (tau - sigma)/N.
///
/// Its Heisenberg action is alpha_{v_0} o ... o alpha_{v_{N-1}}, the frozen
/// evolution at the earliest grid point being the outermost map.
Matrix trotter_product(const GeneratorRule& h, double T, double sigma, double tau, int N);
Matrix trotter_product(const InteractionPath& path, const Volume& volume, double T, double sigma, double tau, int N);

/// Largest series order accepted by dyson_partial_sum.
inline constexpr int kMaxDysonOrder = 6;

struct DysonResult {
  Matrix value;                     // partial sum through `order`
  std::vector<double> term_norms;   // operator norm of each order's term
  double radius = 0.0;              // r / (2 ||Psi||_r)
};

/// sum_{k <= n} of the iterated integrals over sigma <= t_k <= ... <= t_1 <= tau
/// of delta_{t_k} o ... o delta_{t_1}(a) (earliest time outermost), each level
/// by an 8-point Gauss rule. delta_t(A) = i T [H_Lambda(Psi_t), A], which makes
/// the sum approximate U^dagger a U for the Propagator with the same T.
///
/// Refuses T |tau - sigma| >= r/(2 ||Psi||_r), with ||Psi||_r sampled on 21 points.
DysonResult dyson_partial_sum(const InteractionPath& path, const Volume& volume, double sigma, double tau, int order,
                              const Matrix& a, double T = 1.0);

struct DerivationBound {
  double measured = 0.0;  // max over sampled tau tuples of ||delta ... delta(a)||
  double bound = 0.0;     // ||a|| e^{r |supp a|} (2 ||Psi||_r / r)^n n!
  bool ok = true;
  int volume_sites = 0;
};

/// Compares iterated local derivations of a local observable with their
/// a-priori bound on a chain large enough that no translate meeting the
/// growing support is cut by the boundary.
DerivationBound derivation_bound_check(const InteractionPath& path, const LocalTerm& a, int n, int tuples,
                                       std::mt19937_64& rng);
DerivationBound derivation_bound_check(const Interaction& phi, const LocalTerm& a, int n);

struct CesaroResult {
  double quadrature = 0.0;   // composite Gauss-Legendre estimate
  double exact = 0.0;        // closed form of the same finite-horizon average
  double dephased = 0.0;     // infinite-horizon value sum_k Tr(P_k omega P_k a)
};

/// (1/T) int_0^T Tr(omega e^{itH} a e^{-itH}) dt with `panels` 8-point panels.
CesaroResult cesaro_average(const DensityMatrix& omega, const Matrix& h, const Matrix& a, double horizon,
                            int panels = 64);

/// Eigenvalues closer than this are treated as one degenerate block.
inline constexpr double kDegeneracyTolerance = 1e-10;

/// (1/T) int_0^T e^{-itH} omega e^{itH} dt in closed form.
DensityMatrix cesaro_state(const DensityMatrix& omega, const Matrix& h, double horizon);
/// sum_k P_k omega P_k over the eigenspaces of H.
DensityMatrix dephased_state(const DensityMatrix& omega, const Matrix& h);

}  // namespace adialab
