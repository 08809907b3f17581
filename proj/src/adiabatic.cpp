#include "adialab/adiabatic.hpp"

#include "adialab/errors.hpp"
#include "adialab/parallel.hpp"
#include "detail/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace adialab {

GeneratorRule MatrixModel::generator() const {
  return [m = *this](double tau) { return m.hamiltonian(tau); };
}

void MatrixModel::validate(int probes) const {
  if (base.rows() == 0 || base.rows() != base.cols()) throw ValidationError("model base Hamiltonian must be square");
  if (!perturbation || !perturbation_derivative) throw ValidationError("model needs V and dV rules");
  if (!is_hermitian(base, 1e-12)) throw ValidationError("model base Hamiltonian is not self-adjoint");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("model beta must be finite and non-negative");
  if (band.count < 1 || band.first < 0 || band.first + band.count > base.rows())
    throw ValidationError("model band selector out of range");
  const double h = 1e-5;
  for (int k = 0; k < probes; ++k) {
    const double tau = probes == 1 ? 0.5 : static_cast<double>(k) / (probes - 1);
    const Matrix v = perturbation(tau);
    const Matrix dv = perturbation_derivative(tau);
    if (v.rows() != base.rows() || v.cols() != base.cols() || dv.rows() != base.rows() || dv.cols() != base.cols())
      throw ValidationError("model V or dV has the wrong dimension");
    if (!is_hermitian(v, 1e-12) || !is_hermitian(dv, 1e-12))
      throw ValidationError("model V or dV is not self-adjoint at tau = " + std::to_string(tau));
    const double lo = std::max(0.0, tau - h);
    const double hi = std::min(1.0, tau + h);
    const Matrix fd = (perturbation(hi) - perturbation(lo)) / (hi - lo);
    if ((fd - dv).norm() > 1e-5 * std::max(1.0, dv.norm()))
      throw ValidationError("model dV disagrees with finite differences of V at tau = " + std::to_string(tau));
  }
}

MatrixModel MatrixModel::from_path(const InteractionPath& path, const Volume& volume, double beta, std::string name) {
  MatrixModel m;
  m.name = std::move(name);
  m.base = Matrix::Zero(volume.hilbert_dimension(), volume.hilbert_dimension());
  m.perturbation = [path, volume](double tau) { return local_hamiltonian(path.at(tau), volume).matrix; };
  m.perturbation_derivative = [path, volume](double tau) {
    return local_hamiltonian(path.derivative(tau), volume).matrix;
  };
  m.beta = beta;
  return m;
}

std::vector<double> uniform_grid(int points) {
  if (points < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = static_cast<double>(k) / (points - 1);
  return g;
}

namespace {

void check_tau_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("tau grid is empty");
  for (double t : grid)
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("tau grid values must lie in [0, 1]");
  if (!std::is_sorted(grid.begin(), grid.end()) || std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw ValidationError("tau grid must be strictly increasing");
}

void check_T_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("T grid is empty");
  for (double t : grid)
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("T values must be finite and non-negative");
}

// Grid with 0 prepended when absent; offset is the index of the caller's first point.
std::pair<std::vector<double>, std::size_t> anchored_grid(const std::vector<double>& grid) {
  check_tau_grid(grid);
  if (grid.front() == 0.0) return {grid, 0};
  std::vector<double> g{0.0};
  g.insert(g.end(), grid.begin(), grid.end());
  return {g, 1};
}

double rule_norm_bound(const GeneratorRule& h, const std::vector<double>& extra) {
  double best = 0.0;
  for (int k = 0; k <= 20; ++k) best = std::max(best, hermitian_norm(hermitian_part(h(k / 20.0))));
  for (double t : extra) best = std::max(best, hermitian_norm(hermitian_part(h(t))));
  return best;
}

Matrix band_projection(const Matrix& vectors, const std::vector<Eigen::Index>& cols) {
  Matrix p = Matrix::Zero(vectors.rows(), vectors.rows());
  for (auto c : cols) p += vectors.col(c) * vectors.col(c).adjoint();
  return p;
}

double band_gap(const RealVector& values, const std::vector<Eigen::Index>& cols) {
  double gap = std::numeric_limits<double>::infinity();
  std::set<Eigen::Index> in(cols.begin(), cols.end());
  for (auto b : cols)
    for (Eigen::Index j = 0; j < values.size(); ++j)
      if (!in.count(j)) gap = std::min(gap, std::abs(values(b) - values(j)));
  return gap;
}

Complex phase_average(double x) {
  if (std::abs(x) < 1e-8) return Complex{1.0, 0.5 * x};
  return (std::exp(Complex{0.0, x}) - 1.0) / Complex{0.0, x};
}

}  // namespace

ProjectionTrack track_band(const MatrixModel& model, const std::vector<double>& tau_grid, double gap_threshold) {
  check_tau_grid(tau_grid);
  ProjectionTrack out;
  out.min_gap = std::numeric_limits<double>::infinity();
  Matrix previous;
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    const double tau = tau_grid[k];
    const Spectrum sp = hermitian_spectrum(hermitian_part(model.hamiltonian(tau)));
    std::vector<Eigen::Index> cols;
    if (k == 0) {
      for (int j = 0; j < model.band.count; ++j) cols.push_back(model.band.first + j);
    } else {
      // Maximal overlap with the previous band.
      std::vector<std::pair<double, Eigen::Index>> overlap;
      for (Eigen::Index j = 0; j < sp.size(); ++j)
        overlap.emplace_back(-(previous * sp.vectors.col(j)).squaredNorm(), j);
      std::stable_sort(overlap.begin(), overlap.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (int j = 0; j < model.band.count; ++j) cols.push_back(overlap[static_cast<std::size_t>(j)].second);
      std::sort(cols.begin(), cols.end());
    }
    const double gap = band_gap(sp.values, cols);
    if (gap < out.min_gap) {
      out.min_gap = gap;
      out.min_gap_tau = tau;
    }
    if (gap < gap_threshold)
      throw GapClosedError("gap closed: tracked band within " + std::to_string(gap) + " of the spectrum at tau = " +
                           std::to_string(tau) + "; use the gapless scan with a supplied projection family");
    previous = band_projection(sp.vectors, cols);
    out.projections.push_back(previous);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
    if (x[k] > 0.0 && y[k] > 0.0) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

namespace {

std::vector<KatoRow> deviation_rows(const MatrixModel& model, const std::vector<Matrix>& projections,
                                    const std::vector<double>& grid, const std::vector<double>& T_grid,
                                    const IntegratorConfig& cfg, int threads) {
  const GeneratorRule h = model.generator();
  const double bound = rule_norm_bound(h, grid);
  const Eigen::Index dim = model.dimension();
  const Matrix id = Matrix::Identity(dim, dim);
  std::vector<KatoRow> rows(T_grid.size());
  parallel_for(T_grid.size(), threads, [&](std::size_t i) {
    const Propagator prop(h, T_grid[i], cfg, bound);
    const auto table = prop.tabulate(grid);
    KatoRow row;
    row.T = T_grid[i];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = operator_norm((id - projections[k]) * table[k].unitary * projections[0]);
      if (d > row.d) {
        row.d = d;
        row.worst_tau = grid[k];
      }
    }
    row.steps = table.back().steps;
    rows[i] = row;
  });
  return rows;
}

}  // namespace

KatoResult kato_scan(const MatrixModel& model, const std::vector<double>& T_grid, const std::vector<double>& tau_grid,
                     const IntegratorConfig& cfg, int threads) {
  model.validate();
  check_T_grid(T_grid);
  const auto [grid, offset] = anchored_grid(tau_grid);
  (void)offset;
  const ProjectionTrack track = track_band(model, grid);
  KatoResult out;
  out.min_gap = track.min_gap;
  out.min_gap_tau = track.min_gap_tau;
  out.rows = deviation_rows(model, track.projections, grid, T_grid, cfg, threads);
  std::vector<double> ts;
  std::vector<double> ds;
  for (const auto& r : out.rows) {
    ts.push_back(r.T);
    ds.push_back(r.d);
  }
  out.slope = loglog_slope(ts, ds);
  return out;
}

std::vector<KatoRow> gapless_scan(const MatrixModel& model, const std::vector<double>& T_grid,
                                  const std::vector<double>& tau_grid, const IntegratorConfig& cfg, int threads) {
  model.validate();
  check_T_grid(T_grid);
  if (!model.projection) throw ValidationError("gapless scan needs a supplied projection family P(tau)");
  const auto [grid, offset] = anchored_grid(tau_grid);
  (void)offset;
  std::vector<Matrix> projections;
  for (double tau : grid) {
    const Matrix p = model.projection(tau);
    if (p.rows() != model.dimension() || p.cols() != model.dimension())
      throw ValidationError("supplied projection has the wrong dimension");
    if (operator_norm(p * p - p) > 1e-9 || !is_hermitian(p, 1e-9))
      throw ValidationError("supplied P(tau) is not an orthogonal projection at tau = " + std::to_string(tau));
    projections.push_back(p);
  }
  return deviation_rows(model, projections, grid, T_grid, cfg, threads);
}

BalanceResult entropy_balance_check(const MatrixModel& model, double T, const std::vector<double>& tau_grid,
                                    const IntegratorConfig& cfg, double quadrature_tolerance) {
  model.validate();
  check_T_grid({T});
  const auto [grid, offset] = anchored_grid(tau_grid);
  const GeneratorRule h = model.generator();
  const Propagator prop(h, T, cfg, rule_norm_bound(h, grid));
  const auto table = prop.tabulate(grid);
  const DensityMatrix rho0 = gibbs(h(0.0), model.beta).state;

  const auto pairing = [&](double sigma, const Matrix& u) {
    const Matrix dv = model.perturbation_derivative(sigma);
    const double driven = rho0.conjugated(u).expectation(dv);
    const double inst = gibbs(h(sigma), model.beta).state.expectation(dv);
    return model.beta * (driven - inst);
  };

  BalanceResult out;
  out.T = T;
  double rhs = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) {
      const double a = grid[k - 1];
      const Matrix& u_prev = table[k - 1].unitary;
      const auto f = [&](double sigma) { return pairing(sigma, prop.evolve(a, sigma).unitary * u_prev); };
      // Shallow recursion: below ~1e-12 the integrand carries integrator noise
      // and deeper bisection would only chase it.
      double err = 0.0;
      rhs += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, grid[k], 3, quadrature_tolerance,
                                                                           &err);
    }
    if (k < offset) continue;
    const DensityMatrix driven = rho0.conjugated(table[k].unitary, true);
    const RelativeEntropy s = relative_entropy(driven, gibbs(h(grid[k]), model.beta).state);
    if (!s.finite) throw NumericalError("entropy balance: relative entropy is infinite");
    BalanceRow row{grid[k], s.value, rhs, std::abs(s.value - rhs)};
    out.max_residual = std::max(out.max_residual, row.residual);
    out.rows.push_back(row);
  }
  return out;
}

Matrix gamma_generator(const MatrixModel& model, double T, double s, double t) {
  const Spectrum sp = hermitian_spectrum(hermitian_part(model.hamiltonian(t)));
  const double x = (t - s) * T;
  Matrix g = sp.vectors.adjoint() * model.perturbation_derivative(t) * sp.vectors;
  for (Eigen::Index k = 0; k < g.cols(); ++k)
    for (Eigen::Index j = 0; j < g.rows(); ++j) g(j, k) *= x * phase_average((sp.values(j) - sp.values(k)) * x);
  return hermitian_part(sp.vectors * g * sp.vectors.adjoint());
}

GammaResult gamma_factorization_check(const MatrixModel& model, double T, double s, double t,
                                      const IntegratorConfig& cfg) {
  model.validate();
  check_T_grid({T});
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) throw ValidationError("s and t must lie in [0, 1]");
  GammaResult out;
  const PropagationResult full = Propagator(model.generator(), T, cfg).evolve(s, t);
  const GeneratorRule minus_g = [&model, T, s](double tau) { return Matrix(-gamma_generator(model, T, s, tau)); };
  const PropagationResult w = Propagator(minus_g, 1.0, cfg).evolve(s, t);
  out.steps = full.steps + w.steps;

  const Matrix ht = hermitian_part(model.hamiltonian(t));
  const double x = (t - s) * T;
  const Matrix composite = hermitian_exp(ht, x) * w.unitary;
  out.defect = operator_norm(full.unitary - composite);
  out.gamma_unitarity = unitarity_defect(w.unitary.adjoint());

  const Matrix g = gamma_generator(model, T, s, t);
  const Matrix dv = model.perturbation_derivative(t);
  const Matrix heis = hermitian_exp(ht, -x);  // e^{iXH}
  const Matrix rotated = heis * dv * heis.adjoint();
  out.delta_identity_defect = operator_norm(kI * commutator(ht, g) - (rotated - dv));

  if (x != 0.0) {
    const Spectrum sp = hermitian_spectrum(ht);
    const Matrix dv_eig = sp.vectors.adjoint() * dv * sp.vectors;
    const auto integrand = [&](double r) {
      const double u = (r - s) * T;
      Vector phase(sp.size());
      for (Eigen::Index j = 0; j < sp.size(); ++j) phase(j) = std::exp(Complex{0.0, u * sp.values(j)});
      return Matrix(T * (phase.asDiagonal() * dv_eig * phase.conjugate().asDiagonal()));
    };
    const Matrix quad_eig = detail::composite_gauss(integrand, s, t, 64);
    out.generator_quadrature_defect = operator_norm(sp.vectors * quad_eig * sp.vectors.adjoint() - g);
  }
  return out;
}

std::vector<IsothermalRow> isothermal_equivalence_scan(const MatrixModel& model, const std::vector<double>& T_grid,
                                                       const std::vector<double>& tau_grid,
                                                       const IntegratorConfig& cfg, int threads) {
  model.validate();
  check_T_grid(T_grid);
  const auto [grid, offset] = anchored_grid(tau_grid);
  const GeneratorRule h = model.generator();
  const double bound = rule_norm_bound(h, grid);
  const DensityMatrix rho0 = gibbs(h(0.0), model.beta).state;
  std::vector<DensityMatrix> inst;
  std::vector<Matrix> dvs;
  for (double tau : grid) {
    inst.push_back(gibbs(h(tau), model.beta).state);
    dvs.push_back(model.perturbation_derivative(tau));
  }

  std::vector<IsothermalRow> rows(T_grid.size());
  parallel_for(T_grid.size(), threads, [&](std::size_t i) {
    const auto table = Propagator(h, T_grid[i], cfg, bound).tabulate(grid);
    IsothermalRow row;
    row.T = T_grid[i];
    for (std::size_t k = offset; k < grid.size(); ++k) {
      const DensityMatrix driven = rho0.conjugated(table[k].unitary, true);
      const double d = trace_distance(driven, inst[k]);
      const RelativeEntropy s = relative_entropy(driven, inst[k]);
      const double pair = std::abs(driven.expectation(dvs[k]) - inst[k].expectation(dvs[k]));
      row.sup_trace_distance = std::max(row.sup_trace_distance, d);
      row.sup_relative_entropy = s.finite ? std::max(row.sup_relative_entropy, s.value)
                                          : std::numeric_limits<double>::infinity();
      row.sup_pairing_defect = std::max(row.sup_pairing_defect, pair);
      row.pinsker_ok = row.pinsker_ok && pinsker_holds(d, s);
    }
    row.pinsker_ok = row.pinsker_ok &&
                     pinsker_holds(row.sup_trace_distance, RelativeEntropy{row.sup_relative_entropy,
                                                                           std::isfinite(row.sup_relative_entropy)});
    rows[i] = row;
  });
  return rows;
}

Matrix bulk_energy_density(const Interaction& phi, const Volume& volume, int margin) {
  const LocalObservable e = energy_density(phi);
  const Eigen::Index dim = volume.hilbert_dimension();
  Matrix total = Matrix::Zero(dim, dim);
  int placements = 0;
  for (const auto& p : volume.sites()) {
    std::vector<Site> support;
    bool fits = true;
    for (const auto& t : e.terms) {
      auto sites = place_support(t, p, volume);
      if (!sites) {
        fits = false;
        break;
      }
      support.insert(support.end(), sites->begin(), sites->end());
    }
    if (!fits) continue;
    if (volume.boundary() == Boundary::free && !has_margin(support, margin, volume)) continue;
    for (const auto& t : e.terms) add_embedded(total, t.matrix(), *place_support(t, p, volume), volume);
    ++placements;
  }
  if (placements == 0)
    throw ValidationError("no placement of the energy-density observable keeps a margin of " +
                          std::to_string(margin) + " sites from the boundary");
  return total / static_cast<double>(placements);
}

std::vector<ScanRecord> many_body_scan(const InteractionPath& path, const Volume& volume,
                                       const std::vector<double>& T_grid, const std::vector<double>& tau_grid,
                                       const ManyBodyOptions& options) {
  check_T_grid(T_grid);
  options.cfg.validate();
  const auto [grid, offset] = anchored_grid(tau_grid);
  const auto n = static_cast<double>(volume.num_sites());
  const GeneratorRule h = hamiltonian_rule(path, volume);

  int margin = 0;
  std::vector<Matrix> hams;
  std::vector<DensityMatrix> inst;
  std::vector<Matrix> pairing_obs;
  double bound = 0.0;
  for (double tau : grid) margin = std::max(margin, path.at(tau).range());
  for (double tau : grid) {
    hams.push_back(h(tau));
    bound = std::max(bound, hermitian_norm(hams.back()));
    inst.push_back(gibbs(hams.back(), options.beta).state);
    pairing_obs.push_back(bulk_energy_density(path.derivative(tau), volume, margin));
  }
  for (int k = 0; k <= 20; ++k) bound = std::max(bound, hermitian_norm(h(k / 20.0)));

  const DensityMatrix& nu0 = inst.front();
  const DensityMatrix nu0_fresh = nu0.conjugated(Matrix::Identity(nu0.dimension(), nu0.dimension()));
  const double s0 = entropy(nu0_fresh);

  const std::size_t rows_per_T = grid.size() - offset;
  std::vector<ScanRecord> out(T_grid.size() * rows_per_T);
  parallel_for(T_grid.size(), options.threads, [&](std::size_t i) {
    const double T = T_grid[i];
    const auto table = Propagator(h, T, options.cfg, bound).tabulate(grid);
    for (std::size_t k = offset; k < grid.size(); ++k) {
      const DensityMatrix driven = nu0.conjugated(table[k].unitary);
      ScanRecord rec;
      rec.T = T;
      rec.tau = grid[k];
      const RelativeEntropy s = relative_entropy(driven, inst[k]);
      rec.relative_entropy_finite = s.finite;
      rec.relative_entropy = s.value;
      rec.relative_entropy_per_site = s.value / n;
      rec.trace_distance = trace_distance(driven, inst[k]);
      rec.trace_distance_per_site = rec.trace_distance / n;
      rec.pairing_driven = driven.expectation(pairing_obs[k]);
      rec.pairing_instantaneous = inst[k].expectation(pairing_obs[k]);
      const double s_driven = entropy(driven);
      rec.entropy_per_site = s_driven / n;
      rec.entropy_drift = std::abs(s_driven - s0);
      rec.pinsker_ok = pinsker_holds(rec.trace_distance, s);
      rec.steps = table[k].steps;
      out[i * rows_per_T + (k - offset)] = rec;
    }
  });
  return out;
}

PressureDerivativeResult pressure_derivative_check(const InteractionPath& path, const Volume& volume,
                                                   const std::vector<double>& tau_grid, double beta, double step,
                                                   double tolerance) {
  check_tau_grid(tau_grid);
  if (!path.has_derivative()) throw ValidationError("pressure derivative check needs a path with a derivative rule");
  if (!(step > 0.0) || step > 0.25) throw ValidationError("finite-difference step must lie in (0, 0.25]");
  const auto n = static_cast<double>(volume.num_sites());
  const auto p = [&](double tau) { return pressure(path.at(tau), volume, beta); };

  const auto run = [&](double hstep) {
    PressureDerivativeResult res;
    for (double tau : tau_grid) {
      PressureDerivativeRow row;
      row.tau = tau;
      row.step = hstep;
      if (tau - hstep >= 0.0 && tau + hstep <= 1.0)
        row.fd_derivative = (p(tau + hstep) - p(tau - hstep)) / (2.0 * hstep);
      else if (tau - hstep < 0.0)
        row.fd_derivative = (-3.0 * p(tau) + 4.0 * p(tau + hstep) - p(tau + 2.0 * hstep)) / (2.0 * hstep);
      else
        row.fd_derivative = (3.0 * p(tau) - 4.0 * p(tau - hstep) + p(tau - 2.0 * hstep)) / (2.0 * hstep);
      const GibbsState g = gibbs(local_hamiltonian(path.at(tau), volume).matrix, beta);
      const Matrix dh = local_hamiltonian(path.derivative(tau), volume).matrix;
      row.gibbs_expectation = -beta * g.state.expectation(dh) / n;
      row.residual = std::abs(row.fd_derivative - row.gibbs_expectation);
      res.max_residual = std::max(res.max_residual, row.residual);
      res.rows.push_back(row);
    }
    return res;
  };

  PressureDerivativeResult out = run(step);
  if (out.max_residual > tolerance) {
    out = run(step / 4.0);
    out.refined = true;
  }
  return out;
}

std::vector<DichotomyRow> entropy_dichotomy_report(const DensityMatrix& nu0, const Interaction& phi1,
                                                   const Volume& volume, const std::vector<double>& horizons,
                                                   const std::optional<AdiabaticEndpoint>& endpoint) {
  const Matrix h1 = local_hamiltonian(phi1, volume).matrix;
  if (nu0.dimension() != h1.rows()) throw ValidationError("dichotomy: state dimension mismatch");
  const auto n = static_cast<double>(volume.num_sites());
  const double s0 = entropy(nu0) / n;
  std::vector<DichotomyRow> rows;
  rows.push_back({"initial", 0.0, s0, 0.0});
  for (double horizon : horizons) {
    if (!(horizon > 0.0)) throw ValidationError("dichotomy horizons must be > 0");
    const double s = entropy(cesaro_state(nu0, h1, horizon)) / n;
    rows.push_back({"cesaro", horizon, s, s - s0});
  }
  const double sd = entropy(dephased_state(nu0, h1)) / n;
  rows.push_back({"dephased", std::numeric_limits<double>::infinity(), sd, sd - s0});
  if (endpoint) {
    const Matrix u = propagate(endpoint->path, volume, endpoint->T, 0.0, 1.0, endpoint->cfg).unitary;
    const double se = entropy(nu0.conjugated(u)) / n;
    rows.push_back({"driven-endpoint", endpoint->T, se, se - s0});
  }
  return rows;
}

}  // namespace adialab
