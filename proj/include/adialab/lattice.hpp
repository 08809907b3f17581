#pragma once

#include "adialab/interactions.hpp"
#include "adialab/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace adialab {

enum class Boundary { free, periodic };

std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& text);

inline constexpr int kDefaultMaxSites = 12;

/// Finite box in Z^d with lexicographic site order.
///
/// Site k of sites() is tensor factor k; factor 0 is the most significant bit
/// of a basis index, so sigma_z on site 0 of two sites is diag(1, 1, -1, -1).
/// Spin-up (sigma_z = +1) is bit value 0.
class Volume {
 public:
  Volume(std::vector<int> extents, Boundary boundary = Boundary::free, Site lower = {},
         int max_sites = kDefaultMaxSites);

  /// Sites first, first+1, ..., first+length-1 on a line.
  static Volume chain(int length, Boundary boundary = Boundary::free, int first = 0,
                      int max_sites = kDefaultMaxSites);

  [[nodiscard]] int dimension() const { return static_cast<int>(extents_.size()); }
  [[nodiscard]] const std::vector<int>& extents() const { return extents_; }
  [[nodiscard]] Boundary boundary() const { return boundary_; }
  [[nodiscard]] const Site& lower() const { return lower_; }
  [[nodiscard]] std::size_t num_sites() const { return sites_.size(); }
  [[nodiscard]] Eigen::Index hilbert_dimension() const { return Eigen::Index{1} << sites_.size(); }
  [[nodiscard]] const std::vector<Site>& sites() const { return sites_; }

  [[nodiscard]] bool contains(const Site& s) const;
  /// Tensor-factor position, after periodic wrapping where applicable.
  [[nodiscard]] std::optional<std::size_t> index_of(const Site& s) const;
  /// Reduce coordinates into the box (periodic volumes only; identity otherwise).
  [[nodiscard]] Site wrap(const Site& s) const;
  /// Smallest distance (per axis, Chebyshev) from s to the outside of the box.
  /// Periodic volumes have no boundary and report a large value.
  [[nodiscard]] int boundary_distance(const Site& s) const;

 private:
  std::vector<int> extents_;
  Boundary boundary_;
  Site lower_;
  std::vector<Site> sites_;
};

/// Complex matrix on the Volume's Hilbert space with an optional declared support.
struct DenseOperator {
  Matrix matrix;
  std::optional<std::vector<Site>> support;
};

/// The translated support of `term` placed at `placement`, mapped into the
/// volume; std::nullopt when it does not fit (free BC) or self-overlaps after
/// wrapping (periodic BC).
std::optional<std::vector<Site>> place_support(const LocalTerm& term, const Site& placement, const Volume& volume);

/// Adds coefficient * (matrix on sites) (x) identity into `target`.
void add_embedded(Matrix& target, const Matrix& local, const std::vector<Site>& sites, const Volume& volume,
                  Complex coefficient = 1.0);

/// term (x) identity on the complement; ValidationError on support overflow.
DenseOperator embed(const LocalTerm& term, const Site& placement, const Volume& volume);
DenseOperator embed(const LocalObservable& obs, const Site& placement, const Volume& volume);

/// One translate Phi(X) with X inside the volume.
struct PlacedTerm {
  const LocalTerm* term;
  std::vector<Site> sites;
};

/// Every translate of every representative lying in the volume, each once.
std::vector<PlacedTerm> translates_in(const Interaction& phi, const Volume& volume);

/// H_Lambda(Phi) = sum_{X in Lambda} Phi(X).
DenseOperator local_hamiltonian(const Interaction& phi, const Volume& volume);

/// Shift of a declared-support operator by x (permutation conjugation).
DenseOperator translate(const DenseOperator& a, const Site& shift, const Volume& volume);

enum class DerivationMode { full_volume, support_touching };

/// i[H_Lambda(phi), a] (full volume) or the sum of i[Phi(X), a] over the
/// translates X in the volume meeting supp(a) (support touching).
DenseOperator derivation(const Interaction& phi, const DenseOperator& a, const Volume& volume,
                         DerivationMode mode = DerivationMode::full_volume);

/// True when every site within `margin` of the support lies in the volume.
bool has_margin(const std::vector<Site>& support, int margin, const Volume& volume);

/// Throws ResourceLimitError when the volume exceeds `max_sites`.
void check_resource_limit(std::size_t sites, int max_sites);

}  // namespace adialab
