#include "adialab/interactions.hpp"

#include "adialab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace adialab {

std::string to_string(const Site& s) {
  return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + "," + std::to_string(s.z) + ")";
}

Matrix permute_factors(const Matrix& m, std::span<const std::size_t> perm) {
  const std::size_t k = perm.size();
  const Eigen::Index dim = Eigen::Index{1} << k;
  if (m.rows() != dim || m.cols() != dim) throw ValidationError("permute_factors: dimension mismatch");
  // index bit for factor j sits at position (k-1-j).
  auto remap = [&](Eigen::Index b_new) {
    Eigen::Index b_old = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const Eigen::Index bit = (b_new >> (k - 1 - j)) & 1;
      b_old |= bit << (k - 1 - perm[j]);
    }
    return b_old;
  };
  std::vector<Eigen::Index> map(static_cast<std::size_t>(dim));
  for (Eigen::Index b = 0; b < dim; ++b) map[static_cast<std::size_t>(b)] = remap(b);
  Matrix out(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i)
      out(i, j) = m(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
  return out;
}

LocalTerm::LocalTerm(std::vector<Site> support, Matrix matrix) {
  if (support.empty()) throw ValidationError("local term needs a non-empty support");
  if (support.size() > 12) throw ValidationError("local term support larger than 12 sites");
  const Eigen::Index dim = Eigen::Index{1} << support.size();
  if (matrix.rows() != dim || matrix.cols() != dim)
    throw ValidationError("local term matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
  if (!matrix.allFinite()) throw ValidationError("local term matrix has non-finite entries");
  if (!is_hermitian(matrix, 1e-12)) throw ValidationError("local term matrix is not self-adjoint");

  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  std::vector<Site> sorted(support.size());
  for (std::size_t j = 0; j < order.size(); ++j) sorted[j] = support[order[j]];
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("local term support has duplicate sites");

  const bool identity_order = std::is_sorted(order.begin(), order.end());
  Matrix canonical = identity_order ? std::move(matrix) : permute_factors(matrix, order);
  support_ = std::move(sorted);
  matrix_ = hermitian_part(canonical);
}

int LocalTerm::diameter() const {
  int d = 0;
  for (const auto& a : support_)
    for (const auto& b : support_)
      d = std::max({d, std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
  return d;
}

LocalTerm LocalTerm::translated(const Site& shift) const {
  std::vector<Site> moved = support_;
  for (auto& s : moved) s = s + shift;
  return LocalTerm(Trusted{}, std::move(moved), matrix_);
}

LocalTerm LocalTerm::anchored() const { return translated(-support_.front()); }

LocalTerm LocalTerm::scaled(double factor) const { return LocalTerm(Trusted{}, support_, factor * matrix_); }

namespace {

// Sum terms by support; drops exactly-zero matrices.
std::vector<LocalTerm> merge_terms(const std::vector<LocalTerm>& terms) {
  std::map<std::vector<Site>, Matrix> merged;
  for (const auto& t : terms) {
    auto it = merged.find(t.support());
    if (it == merged.end())
      merged.emplace(t.support(), t.matrix());
    else
      it->second += t.matrix();
  }
  std::vector<LocalTerm> out;
  out.reserve(merged.size());
  for (auto& [support, m] : merged) {
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;
    out.emplace_back(support, std::move(m));
  }
  return out;
}

bool coordinates_fit(const Site& s, int dimension) {
  if (dimension < 2 && s.y != 0) return false;
  if (dimension < 3 && s.z != 0) return false;
  return true;
}

}  // namespace

LocalObservable LocalObservable::canonical() const { return LocalObservable{merge_terms(terms)}; }

Interaction::Interaction(std::vector<LocalTerm> terms, double weight_r, int dimension)
    : weight_r_(weight_r), dimension_(dimension) {
  if (!(weight_r > 0.0) || !std::isfinite(weight_r)) throw ValidationError("weight r must be positive and finite");
  if (dimension < 1 || dimension > 3) throw ValidationError("lattice dimension must be 1, 2 or 3");
  std::vector<LocalTerm> anchored;
  anchored.reserve(terms.size());
  for (const auto& t : terms) {
    for (const auto& s : t.support())
      if (!coordinates_fit(s, dimension))
        throw ValidationError("term support " + to_string(s) + " exceeds lattice dimension");
    anchored.push_back(t.anchored());
  }
  terms_ = merge_terms(anchored);
}

Interaction Interaction::zero(double weight_r, int dimension) { return Interaction({}, weight_r, dimension); }

int Interaction::range() const {
  int r = 0;
  for (const auto& t : terms_) r = std::max(r, t.diameter());
  return r;
}

double norm_r(const Interaction& phi) {
  // Each representative X0 has exactly |X0| translates containing the origin.
  double total = 0.0;
  for (const auto& t : phi.terms()) {
    const auto size = static_cast<double>(t.size());
    total += size * std::exp(phi.weight_r() * (size - 1.0)) * operator_norm(t.matrix());
  }
  return total;
}

LocalObservable energy_density(const Interaction& phi) {
  LocalObservable out;
  for (const auto& t : phi.terms()) {
    const double weight = 1.0 / static_cast<double>(t.size());
    for (const auto& s : t.support()) out.terms.push_back(t.translated(-s).scaled(weight));
  }
  return out.canonical();
}

Interaction combine(const Interaction& phi0, const Interaction& phi1, double a, double b) {
  if (phi0.weight_r() != phi1.weight_r()) throw ValidationError("combine: mismatched weight r");
  if (phi0.dimension() != phi1.dimension()) throw ValidationError("combine: mismatched lattice dimension");
  std::vector<LocalTerm> terms;
  terms.reserve(phi0.terms().size() + phi1.terms().size());
  if (a != 0.0)
    for (const auto& t : phi0.terms()) terms.push_back(t.scaled(a));
  if (b != 0.0)
    for (const auto& t : phi1.terms()) terms.push_back(t.scaled(b));
  return Interaction(std::move(terms), phi0.weight_r(), phi0.dimension());
}

namespace {

double term_distance_impl(const std::vector<LocalTerm>& a, const std::vector<LocalTerm>& b) {
  std::map<std::vector<Site>, Matrix> diff;
  for (const auto& t : a) diff.emplace(t.support(), t.matrix());
  for (const auto& t : b) {
    auto it = diff.find(t.support());
    if (it == diff.end())
      diff.emplace(t.support(), -t.matrix());
    else
      it->second -= t.matrix();
  }
  double worst = 0.0;
  for (const auto& [support, m] : diff) worst = std::max(worst, m.norm());
  return worst;
}

}  // namespace

double term_distance(const Interaction& a, const Interaction& b) { return term_distance_impl(a.terms(), b.terms()); }

double term_distance(const LocalObservable& a, const LocalObservable& b) {
  return term_distance_impl(a.canonical().terms, b.canonical().terms);
}

double polynomial_value(std::span<const double> coefficients, double x) {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double polynomial_derivative(std::span<const double> coefficients, double x) {
  double acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coefficients[k];
  return acc;
}

InteractionPath::InteractionPath(Rule value, std::optional<Rule> derivative, double weight_r, std::string kind)
    : value_(std::move(value)), derivative_(std::move(derivative)), weight_r_(weight_r), kind_(std::move(kind)) {}

InteractionPath InteractionPath::constant(Interaction phi) {
  const double r = phi.weight_r();
  const int d = phi.dimension();
  return InteractionPath([phi](double) { return phi; },
                         Rule([r, d](double) { return Interaction::zero(r, d); }), r, "constant");
}

InteractionPath InteractionPath::interpolation(Interaction phi0, Interaction phi1,
                                               std::vector<double> lambda_coefficients) {
  if (phi0.weight_r() != phi1.weight_r()) throw ValidationError("path endpoints have different weight r");
  if (lambda_coefficients.empty()) throw ValidationError("lambda polynomial needs at least one coefficient");
  const Interaction delta = combine(phi1, phi0, 1.0, -1.0);
  auto value = [phi0, delta, lambda_coefficients](double tau) {
    return combine(phi0, delta, 1.0, polynomial_value(lambda_coefficients, tau));
  };
  auto derivative = [delta, lambda_coefficients](double tau) {
    return combine(delta, delta, polynomial_derivative(lambda_coefficients, tau), 0.0);
  };
  return InteractionPath(value, Rule(derivative), phi0.weight_r(), "interpolation");
}

InteractionPath InteractionPath::sampled(std::vector<double> knots, std::vector<Interaction> samples) {
  if (knots.size() < 2 || knots.size() != samples.size())
    throw ValidationError("sampled path needs >= 2 knots with one interaction each");
  if (knots.front() != 0.0 || knots.back() != 1.0) throw ValidationError("sampled path knots must span [0,1]");
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k] > knots[k - 1])) throw ValidationError("sampled path knots must increase strictly");
  const double r = samples.front().weight_r();
  for (const auto& s : samples)
    if (s.weight_r() != r) throw ValidationError("sampled path interactions have different weight r");

  auto segment = [knots](double tau) {
    const auto it = std::upper_bound(knots.begin(), knots.end(), tau);
    auto idx = static_cast<std::size_t>(std::distance(knots.begin(), it));
    idx = std::clamp<std::size_t>(idx, 1, knots.size() - 1);
    return idx - 1;
  };
  auto value = [knots, samples, segment](double tau) {
    const std::size_t k = segment(tau);
    const double w = (tau - knots[k]) / (knots[k + 1] - knots[k]);
    return combine(samples[k], samples[k + 1], 1.0 - w, w);
  };
  auto derivative = [knots, samples, segment](double tau) {
    const std::size_t k = segment(tau);
    const double inv = 1.0 / (knots[k + 1] - knots[k]);
    return combine(samples[k + 1], samples[k], inv, -inv);
  };
  return InteractionPath(value, Rule(derivative), r, "sampled");
}

InteractionPath InteractionPath::from_rules(Rule value, std::optional<Rule> derivative, double weight_r,
                                            std::string kind) {
  if (!value) throw ValidationError("path needs a value rule");
  return InteractionPath(std::move(value), std::move(derivative), weight_r, std::move(kind));
}

Interaction InteractionPath::at(double tau) const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("path parameter outside [0,1]");
  Interaction phi = value_(tau);
  if (phi.weight_r() != weight_r_) throw ValidationError("path produced an interaction with a different weight r");
  return phi;
}

Interaction InteractionPath::derivative(double tau) const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("path parameter outside [0,1]");
  if (derivative_) return (*derivative_)(tau);
  constexpr double h = 1e-6;
  const double lo = std::max(0.0, tau - h);
  const double hi = std::min(1.0, tau + h);
  return combine(at(hi), at(lo), 1.0 / (hi - lo), -1.0 / (hi - lo));
}

double InteractionPath::derivative_mismatch(std::span<const double> probes, double step) const {
  double worst = 0.0;
  for (double tau : probes) {
    const double lo = std::max(0.0, tau - step);
    const double hi = std::min(1.0, tau + step);
    const Interaction fd = combine(at(hi), at(lo), 1.0 / (hi - lo), -1.0 / (hi - lo));
    worst = std::max(worst, term_distance(fd, derivative(tau)));
  }
  return worst;
}

double path_norm_r(const InteractionPath& psi, std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("path_norm_r: empty grid");
  double best = 0.0;
  for (double tau : grid) best = std::max(best, norm_r(psi.at(tau)));
  return best;
}

Interaction field_interaction(const Matrix& single_site, double weight_r) {
  return Interaction({LocalTerm({Site{0}}, single_site)}, weight_r);
}

Interaction two_body_interaction(const Matrix& on_site, const Matrix& nearest_neighbour, double weight_r) {
  return Interaction({LocalTerm({Site{0}}, on_site), LocalTerm({Site{0}, Site{1}}, nearest_neighbour)}, weight_r);
}

Interaction ising_chain(double coupling, double longitudinal, double transverse, double weight_r) {
  const Matrix on_site = longitudinal * pauli::z() + transverse * pauli::x();
  return two_body_interaction(on_site, coupling * pauli::from_string("ZZ"), weight_r);
}

}  // namespace adialab
