#pragma once

#include "adialab/linalg.hpp"

#include <compare>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adialab {

class Volume;
struct DenseOperator;

/// A lattice site in Z^d, d <= 3. Unused coordinates stay 0.
struct Site {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const Site&, const Site&) = default;
  Site operator+(const Site& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Site operator-(const Site& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Site operator-() const { return {-x, -y, -z}; }
};

std::string to_string(const Site& s);

/// Self-adjoint matrix on the tensor factors of a finite support.
///
/// The support is kept sorted lexicographically and the matrix factor order
/// follows it (first site = most significant factor). Constructing from an
/// unsorted support permutes the tensor factors accordingly.
class LocalTerm {
 public:
  LocalTerm(std::vector<Site> support, Matrix matrix);

  [[nodiscard]] const std::vector<Site>& support() const { return support_; }
  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] std::size_t size() const { return support_.size(); }
  /// Largest coordinate extent of the support along any axis.
  [[nodiscard]] int diameter() const;

  [[nodiscard]] LocalTerm translated(const Site& shift) const;
  /// Translate so that the minimal site is the origin.
  [[nodiscard]] LocalTerm anchored() const;
  [[nodiscard]] LocalTerm scaled(double factor) const;

 private:
  struct Trusted {};
  LocalTerm(Trusted, std::vector<Site> support, Matrix matrix)
      : support_(std::move(support)), matrix_(std::move(matrix)) {}

  std::vector<Site> support_;
  Matrix matrix_;
};

/// Reorder the tensor factors of a k-qubit matrix: factor j of the result is
/// factor perm[j] of the input.
Matrix permute_factors(const Matrix& m, std::span<const std::size_t> perm);

/// Finite sum of local terms at explicit supports (relative to a placement).
struct LocalObservable {
  std::vector<LocalTerm> terms;

  /// Merge terms sharing a support; result sorted by support.
  [[nodiscard]] LocalObservable canonical() const;
};

/// Translation-invariant interaction stored by translation-class representatives.
///
/// Every representative is anchored (minimal site at the origin); terms with
/// identical supports are merged on construction and exactly-zero terms are
/// dropped, so the representative list is canonical.
class Interaction {
 public:
  Interaction() = default;
  Interaction(std::vector<LocalTerm> terms, double weight_r, int dimension = 1);

  static Interaction zero(double weight_r = 1.0, int dimension = 1);

  [[nodiscard]] const std::vector<LocalTerm>& terms() const { return terms_; }
  [[nodiscard]] double weight_r() const { return weight_r_; }
  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] static constexpr int site_dim() { return 2; }
  /// Maximal support diameter over all representatives (0 for on-site terms).
  [[nodiscard]] int range() const;
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }

 private:
  std::vector<LocalTerm> terms_;
  double weight_r_ = 1.0;
  int dimension_ = 1;
};

/// sum_{X containing 0} e^{r(|X|-1)} ||Phi(X)||.
double norm_r(const Interaction& phi);

/// E_Phi = sum_{X containing 0} |X|^{-1} Phi(X), as weighted translated terms.
LocalObservable energy_density(const Interaction& phi);

/// a*phi0 + b*phi1, termwise.
Interaction combine(const Interaction& phi0, const Interaction& phi1, double a, double b);

/// ||delta_{phi,Lambda}(a) - delta_{psi,Lambda}(a)|| with delta_{.,Lambda}(A) = i[H_Lambda(.), A].
///
/// Zero is necessary evidence for physical equivalence on this observable.
/// The declared support of `a` needs a margin of max(range) sites inside the
/// volume; otherwise ValidationError.
double equivalence_residual(const Interaction& phi, const Interaction& psi, const DenseOperator& a,
                            const Volume& volume);

/// Largest Frobenius distance between matching terms (missing terms count as zero).
double term_distance(const Interaction& a, const Interaction& b);
double term_distance(const LocalObservable& a, const LocalObservable& b);

/// tau -> Psi_tau on [0,1], with an optional derivative rule.
class InteractionPath {
 public:
  using Rule = std::function<Interaction(double)>;

  static InteractionPath constant(Interaction phi);
  /// Psi_tau = phi0 + lambda(tau) (phi1 - phi0), lambda given by polynomial
  /// coefficients c0 + c1 tau + c2 tau^2 + ...
  static InteractionPath interpolation(Interaction phi0, Interaction phi1,
                                       std::vector<double> lambda_coefficients);
  /// Piecewise-linear in the term matrices; knots must start at 0, end at 1,
  /// and increase strictly. The derivative is the piecewise slope (right slope
  /// at interior knots, left slope at tau = 1).
  static InteractionPath sampled(std::vector<double> knots, std::vector<Interaction> samples);
  static InteractionPath from_rules(Rule value, std::optional<Rule> derivative, double weight_r,
                                    std::string kind = "rule");

  [[nodiscard]] Interaction at(double tau) const;
  /// Uses the derivative rule; without one, a central difference with step 1e-6.
  [[nodiscard]] Interaction derivative(double tau) const;
  [[nodiscard]] bool has_derivative() const { return derivative_.has_value(); }
  [[nodiscard]] double weight_r() const { return weight_r_; }
  [[nodiscard]] const std::string& kind() const { return kind_; }

  /// Max termwise distance between the derivative rule and central differences
  /// of the value rule at the probe points.
  [[nodiscard]] double derivative_mismatch(std::span<const double> probes, double step = 1e-5) const;

 private:
  InteractionPath(Rule value, std::optional<Rule> derivative, double weight_r, std::string kind);

  Rule value_;
  std::optional<Rule> derivative_;
  double weight_r_ = 1.0;
  std::string kind_;
};

/// Max of norm_r(Psi_tau) over the grid: a lower bound for the sup over [0,1].
double path_norm_r(const InteractionPath& psi, std::span<const double> grid);

double polynomial_value(std::span<const double> coefficients, double x);
double polynomial_derivative(std::span<const double> coefficients, double x);

/// Nearest-neighbour interaction helpers for chains (d = 1).
Interaction field_interaction(const Matrix& single_site, double weight_r = 1.0);
Interaction two_body_interaction(const Matrix& on_site, const Matrix& nearest_neighbour,
                                 double weight_r = 1.0);
/// J sum Z_i Z_{i+1} + h sum Z_i + g sum X_i.
Interaction ising_chain(double coupling, double longitudinal, double transverse,
                        double weight_r = 1.0);

}  // namespace adialab
