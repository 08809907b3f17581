#include "adialab/lattice.hpp"

#include "adialab/errors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>

namespace adialab {

std::string to_string(Boundary b) { return b == Boundary::free ? "free" : "periodic"; }

Boundary parse_boundary(const std::string& text) {
  if (text == "free") return Boundary::free;
  if (text == "periodic") return Boundary::periodic;
  throw ValidationError("unknown boundary mode '" + text + "' (expected free or periodic)");
}

void check_resource_limit(std::size_t sites, int max_sites) {
  if (sites > static_cast<std::size_t>(max_sites))
    throw ResourceLimitError("volume has " + std::to_string(sites) + " sites; dense ceiling is " +
                             std::to_string(max_sites));
}

namespace {

std::array<int, 3> coords(const Site& s) { return {s.x, s.y, s.z}; }
Site from_coords(const std::array<int, 3>& c) { return {c[0], c[1], c[2]}; }

int floor_mod(int a, int n) {
  const int m = a % n;
  return m < 0 ? m + n : m;
}

}  // namespace

Volume::Volume(std::vector<int> extents, Boundary boundary, Site lower, int max_sites)
    : extents_(std::move(extents)), boundary_(boundary), lower_(lower) {
  if (extents_.empty() || extents_.size() > 3) throw ValidationError("volume dimension must be 1, 2 or 3");
  std::size_t count = 1;
  for (int e : extents_) {
    if (e < 1) throw ValidationError("volume extents must be positive");
    count *= static_cast<std::size_t>(e);
    if (count > 64) break;
  }
  check_resource_limit(count, max_sites);
  if (extents_.size() < 2 && lower_.y != 0) throw ValidationError("volume lower corner exceeds dimension");
  if (extents_.size() < 3 && lower_.z != 0) throw ValidationError("volume lower corner exceeds dimension");

  const int nx = extents_[0];
  const int ny = extents_.size() > 1 ? extents_[1] : 1;
  const int nz = extents_.size() > 2 ? extents_[2] : 1;
  sites_.reserve(count);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) sites_.push_back(Site{lower_.x + i, lower_.y + j, lower_.z + k});
}

Volume Volume::chain(int length, Boundary boundary, int first, int max_sites) {
  return Volume({length}, boundary, Site{first}, max_sites);
}

bool Volume::contains(const Site& s) const {
  const auto c = coords(s);
  const auto lo = coords(lower_);
  for (std::size_t a = 0; a < 3; ++a) {
    const int extent = a < extents_.size() ? extents_[a] : 1;
    if (c[a] < lo[a] || c[a] >= lo[a] + extent) return false;
  }
  return true;
}

Site Volume::wrap(const Site& s) const {
  if (boundary_ == Boundary::free) return s;
  auto c = coords(s);
  const auto lo = coords(lower_);
  for (std::size_t a = 0; a < extents_.size(); ++a) c[a] = lo[a] + floor_mod(c[a] - lo[a], extents_[a]);
  return from_coords(c);
}

std::optional<std::size_t> Volume::index_of(const Site& s) const {
  const Site w = wrap(s);
  if (!contains(w)) return std::nullopt;
  const auto c = coords(w);
  const auto lo = coords(lower_);
  const int ny = extents_.size() > 1 ? extents_[1] : 1;
  const int nz = extents_.size() > 2 ? extents_[2] : 1;
  const int idx = ((c[0] - lo[0]) * ny + (c[1] - lo[1])) * nz + (c[2] - lo[2]);
  return static_cast<std::size_t>(idx);
}

int Volume::boundary_distance(const Site& s) const {
  if (boundary_ == Boundary::periodic) return std::numeric_limits<int>::max() / 4;
  const auto c = coords(s);
  const auto lo = coords(lower_);
  int d = std::numeric_limits<int>::max();
  for (std::size_t a = 0; a < extents_.size(); ++a)
    d = std::min({d, c[a] - lo[a], lo[a] + extents_[a] - 1 - c[a]});
  return d;
}

bool has_margin(const std::vector<Site>& support, int margin, const Volume& volume) {
  if (volume.boundary() == Boundary::free) {
    return std::all_of(support.begin(), support.end(),
                       [&](const Site& s) { return volume.contains(s) && volume.boundary_distance(s) >= margin; });
  }
  for (std::size_t a = 0; a < volume.extents().size(); ++a) {
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (const auto& s : support) {
      const int c = coords(s)[a];
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (volume.extents()[a] < (hi - lo) + 2 * margin + 1) return false;
  }
  return true;
}

std::optional<std::vector<Site>> place_support(const LocalTerm& term, const Site& placement, const Volume& volume) {
  std::vector<Site> out;
  out.reserve(term.size());
  for (const auto& s : term.support()) {
    const Site w = volume.wrap(s + placement);
    if (!volume.contains(w)) return std::nullopt;
    out.push_back(w);
  }
  std::set<Site> unique(out.begin(), out.end());
  if (unique.size() != out.size()) return std::nullopt;
  return out;
}

void add_embedded(Matrix& target, const Matrix& local, const std::vector<Site>& sites, const Volume& volume,
                  Complex coefficient) {
  const auto n = static_cast<int>(volume.num_sites());
  const auto k = static_cast<int>(sites.size());
  if (local.rows() != (Eigen::Index{1} << k)) throw ValidationError("embed: matrix does not match support size");
  std::vector<int> shift(static_cast<std::size_t>(k));
  Eigen::Index mask = 0;
  for (int j = 0; j < k; ++j) {
    const auto pos = volume.index_of(sites[static_cast<std::size_t>(j)]);
    if (!pos) throw ValidationError("embed: site " + to_string(sites[static_cast<std::size_t>(j)]) + " outside volume");
    shift[static_cast<std::size_t>(j)] = n - 1 - static_cast<int>(*pos);
    mask |= Eigen::Index{1} << shift[static_cast<std::size_t>(j)];
  }
  const Eigen::Index local_dim = Eigen::Index{1} << k;
  std::vector<Eigen::Index> deposit(static_cast<std::size_t>(local_dim), 0);
  for (Eigen::Index c = 0; c < local_dim; ++c)
    for (int j = 0; j < k; ++j)
      if ((c >> (k - 1 - j)) & 1) deposit[static_cast<std::size_t>(c)] |= Eigen::Index{1} << shift[static_cast<std::size_t>(j)];

  const Eigen::Index dim = volume.hilbert_dimension();
  if (target.rows() != dim || target.cols() != dim) throw ValidationError("embed: target has wrong dimension");
  const Matrix scaled = coefficient * local;
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::Index sub_col = 0;
    for (int j = 0; j < k; ++j) sub_col |= ((col >> shift[static_cast<std::size_t>(j)]) & 1) << (k - 1 - j);
    const Eigen::Index base = col & ~mask;
    for (Eigen::Index r = 0; r < local_dim; ++r) {
      const Complex v = scaled(r, sub_col);
      if (v != Complex{0.0, 0.0}) target(base | deposit[static_cast<std::size_t>(r)], col) += v;
    }
  }
}

DenseOperator embed(const LocalTerm& term, const Site& placement, const Volume& volume) {
  auto sites = place_support(term, placement, volume);
  if (!sites) throw ValidationError("embed: translated support does not fit in the volume");
  const Eigen::Index dim = volume.hilbert_dimension();
  DenseOperator out{Matrix::Zero(dim, dim), std::nullopt};
  add_embedded(out.matrix, term.matrix(), *sites, volume);
  std::sort(sites->begin(), sites->end());
  out.support = std::move(*sites);
  return out;
}

DenseOperator embed(const LocalObservable& obs, const Site& placement, const Volume& volume) {
  const Eigen::Index dim = volume.hilbert_dimension();
  DenseOperator out{Matrix::Zero(dim, dim), std::vector<Site>{}};
  std::set<Site> support;
  for (const auto& t : obs.terms) {
    auto sites = place_support(t, placement, volume);
    if (!sites) throw ValidationError("embed: observable term does not fit in the volume");
    add_embedded(out.matrix, t.matrix(), *sites, volume);
    support.insert(sites->begin(), sites->end());
  }
  out.support = std::vector<Site>(support.begin(), support.end());
  return out;
}

std::vector<PlacedTerm> translates_in(const Interaction& phi, const Volume& volume) {
  if (phi.dimension() != volume.dimension())
    throw ValidationError("interaction and volume have different lattice dimensions");
  std::vector<PlacedTerm> out;
  for (const auto& term : phi.terms()) {
    for (const auto& anchor : volume.sites()) {
      auto sites = place_support(term, anchor, volume);
      if (sites) out.push_back(PlacedTerm{&term, std::move(*sites)});
    }
  }
  return out;
}

DenseOperator local_hamiltonian(const Interaction& phi, const Volume& volume) {
  const Eigen::Index dim = volume.hilbert_dimension();
  DenseOperator out{Matrix::Zero(dim, dim), volume.sites()};
  for (const auto& placed : translates_in(phi, volume)) add_embedded(out.matrix, placed.term->matrix(), placed.sites, volume);
  return out;
}

namespace {

// Conjugate by the basis permutation sending tensor factor p to factor target[p].
Matrix permute_sites(const Matrix& a, const std::vector<std::size_t>& target) {
  const auto n = static_cast<int>(target.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::Index> map(static_cast<std::size_t>(dim));
  for (Eigen::Index b = 0; b < dim; ++b) {
    Eigen::Index out = 0;
    for (int p = 0; p < n; ++p)
      if ((b >> (n - 1 - p)) & 1) out |= Eigen::Index{1} << (n - 1 - static_cast<int>(target[static_cast<std::size_t>(p)]));
    map[static_cast<std::size_t>(b)] = out;
  }
  Matrix res(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) res(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = a(i, j);
  return res;
}

}  // namespace

DenseOperator translate(const DenseOperator& a, const Site& shift, const Volume& volume) {
  const std::size_t n = volume.num_sites();
  if (a.matrix.rows() != volume.hilbert_dimension()) throw ValidationError("translate: operator dimension mismatch");
  std::vector<std::size_t> target(n);
  std::optional<std::vector<Site>> moved_support;

  if (volume.boundary() == Boundary::periodic) {
    for (std::size_t p = 0; p < n; ++p) target[p] = *volume.index_of(volume.sites()[p] + shift);
    if (a.support) {
      std::vector<Site> s;
      for (const auto& site : *a.support) s.push_back(volume.wrap(site + shift));
      std::sort(s.begin(), s.end());
      moved_support = std::move(s);
    }
  } else {
    if (!a.support) throw ValidationError("translate: free boundary needs a declared support");
    std::vector<bool> source_used(n, false);
    std::vector<bool> target_used(n, false);
    std::vector<Site> s;
    for (const auto& site : *a.support) {
      const auto from = volume.index_of(site);
      const auto to = volume.index_of(site + shift);
      if (!from || !to) throw ValidationError("translate: shifted support leaves the volume");
      target[*from] = *to;
      source_used[*from] = true;
      target_used[*to] = true;
      s.push_back(site + shift);
    }
    // Identity factors: remaining sources fill remaining targets in order.
    std::size_t next = 0;
    for (std::size_t p = 0; p < n; ++p) {
      if (source_used[p]) continue;
      while (target_used[next]) ++next;
      target[p] = next++;
    }
    std::sort(s.begin(), s.end());
    moved_support = std::move(s);
  }
  return DenseOperator{permute_sites(a.matrix, target), std::move(moved_support)};
}

namespace {

// out += a * (local (x) identity). Columns are contiguous, so every update is a vector axpy.
void apply_embedded_right(Matrix& out, const Matrix& local, const std::vector<Site>& sites, const Volume& volume,
                          const Matrix& a) {
  const auto n = static_cast<int>(volume.num_sites());
  const auto k = static_cast<int>(sites.size());
  const Eigen::Index local_dim = Eigen::Index{1} << k;
  Eigen::Index mask = 0;
  std::vector<Eigen::Index> deposit(static_cast<std::size_t>(local_dim), 0);
  for (int j = 0; j < k; ++j) {
    const auto pos = volume.index_of(sites[static_cast<std::size_t>(j)]);
    if (!pos) throw ValidationError("derivation: site outside volume");
    const int shift = n - 1 - static_cast<int>(*pos);
    mask |= Eigen::Index{1} << shift;
    for (Eigen::Index c = 0; c < local_dim; ++c)
      if ((c >> (k - 1 - j)) & 1) deposit[static_cast<std::size_t>(c)] |= Eigen::Index{1} << shift;
  }
  for (Eigen::Index base = 0; base < a.cols(); ++base) {
    if (base & mask) continue;
    for (Eigen::Index c = 0; c < local_dim; ++c) {
      auto target = out.col(base | deposit[static_cast<std::size_t>(c)]);
      for (Eigen::Index r = 0; r < local_dim; ++r) {
        const Complex w = local(r, c);
        if (w != Complex{0.0, 0.0}) target += w * a.col(base | deposit[static_cast<std::size_t>(r)]);
      }
    }
  }
}

}  // namespace

DenseOperator derivation(const Interaction& phi, const DenseOperator& a, const Volume& volume, DerivationMode mode) {
  if (a.matrix.rows() != volume.hilbert_dimension()) throw ValidationError("derivation: operator dimension mismatch");
  if (mode == DerivationMode::support_touching && !a.support)
    throw ValidationError("derivation: support-touching mode needs a declared support");

  if (mode == DerivationMode::full_volume) {
    std::optional<std::vector<Site>> out_support;
    if (a.support) {
      std::set<Site> grown;
      for (const auto& s : *a.support) grown.insert(volume.wrap(s));
      const std::set<Site> supp = grown;
      for (const auto& placed : translates_in(phi, volume))
        if (std::any_of(placed.sites.begin(), placed.sites.end(), [&](const Site& s) { return supp.count(s) > 0; }))
          grown.insert(placed.sites.begin(), placed.sites.end());
      out_support = std::vector<Site>(grown.begin(), grown.end());
    }
    const Matrix h = local_hamiltonian(phi, volume).matrix;
    return DenseOperator{kI * commutator(h, a.matrix), std::move(out_support)};
  }

  // Sum of i[Phi(X), a] over the translates meeting supp(a), applied term by term.
  std::set<Site> supp;
  for (const auto& s : *a.support) supp.insert(volume.wrap(s));
  std::set<Site> grown = supp;
  const Eigen::Index dim = volume.hilbert_dimension();
  // G a = (a^dagger G)^dagger, and for self-adjoint a both products come from a G.
  const bool self_adjoint = a.matrix == a.matrix.adjoint();
  Matrix right = Matrix::Zero(dim, dim);
  Matrix left_adj = self_adjoint ? Matrix() : Matrix::Zero(dim, dim);
  const Matrix a_adj = self_adjoint ? Matrix() : Matrix(a.matrix.adjoint());
  for (const auto& placed : translates_in(phi, volume)) {
    if (std::none_of(placed.sites.begin(), placed.sites.end(), [&](const Site& s) { return supp.count(s) > 0; }))
      continue;
    grown.insert(placed.sites.begin(), placed.sites.end());
    apply_embedded_right(right, placed.term->matrix(), placed.sites, volume, a.matrix);
    if (!self_adjoint) apply_embedded_right(left_adj, placed.term->matrix(), placed.sites, volume, a_adj);
  }
  Matrix result = kI * ((self_adjoint ? right : left_adj).adjoint() - right);
  return DenseOperator{std::move(result), std::vector<Site>(grown.begin(), grown.end())};
}

double equivalence_residual(const Interaction& phi, const Interaction& psi, const DenseOperator& a,
                            const Volume& volume) {
  if (!a.support) throw ValidationError("equivalence_residual: observable needs a declared support");
  const int margin = std::max(phi.range(), psi.range());
  if (!has_margin(*a.support, margin, volume))
    throw ValidationError("equivalence_residual: observable support too close to the volume boundary");
  const Matrix diff = derivation(phi, a, volume).matrix - derivation(psi, a, volume).matrix;
  return operator_norm(diff);
}

}  // namespace adialab
