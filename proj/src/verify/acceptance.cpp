#include "adialab/acceptance.hpp"

#include "adialab/adiabatic.hpp"
#include "adialab/dynamics.hpp"
#include "adialab/interactions.hpp"
#include "adialab/lattice.hpp"
#include "adialab/oracles.hpp"
#include "adialab/thermo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

namespace adialab {

namespace {

using Clock = std::chrono::steady_clock;

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

Matrix random_hermitian(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex{g(rng), g(rng)};
  return scale * hermitian_part(m);
}

DensityMatrix random_full_rank_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex{g(rng), g(rng)};
  Matrix rho = a * a.adjoint() + 1e-3 * Matrix::Identity(dim, dim);
  rho /= rho.trace().real();
  return DensityMatrix(hermitian_part(rho));
}

/// On-site, nearest-neighbour and optionally next-nearest-neighbour random terms.
Interaction random_interaction(std::mt19937_64& rng, int max_range, double scale = 1.0) {
  std::vector<LocalTerm> terms;
  terms.emplace_back(std::vector<Site>{{0}}, random_hermitian(2, rng, scale));
  if (max_range >= 1) terms.emplace_back(std::vector<Site>{{0}, {1}}, random_hermitian(4, rng, scale));
  if (max_range >= 2) terms.emplace_back(std::vector<Site>{{0}, {2}}, random_hermitian(4, rng, scale));
  return Interaction(std::move(terms), 1.0);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome weak_gibbs(double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> beta_dist(0.2, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int L = 2 + k % 3;
    const auto phi = random_interaction(rng, std::min(L - 1, 2));
    const auto volume = Volume::chain(L);
    const auto nu = random_full_rank_state(volume.hilbert_dimension(), rng);
    worst = std::max(worst, weak_gibbs_residual(nu, phi, volume, beta_dist(rng)));
  }
  return {worst <= 1e-10 * scale, "max residual " + sci(worst) + " over 200 states (tol " + sci(1e-10 * scale) + ")"};
}

Outcome pressure_oracle(double scale) {
  const auto phi = ising_chain(1.0, 0.0, 0.0);
  double worst = 0.0;
  std::vector<int> lengths;
  for (int L = 4; L <= 12; ++L) {
    lengths.push_back(L);
    const double p = pressure(phi, Volume::chain(L), 1.0);
    const double closed = std::log(2.0) + (1.0 - 1.0 / L) * std::log(std::cosh(1.0));
    worst = std::max({worst, std::abs(p - closed), std::abs(p - oracle::ising_open_pressure(L, 1.0, 0.0, 1.0))});
  }
  const auto fit = pressure_extrapolate(phi, lengths, 1.0);
  const double extrap = std::abs(fit.estimate - oracle::ising_infinite_pressure(1.0, 1.0));
  const bool ok = worst <= 1e-10 * scale && extrap <= 1e-6 * scale;
  return {ok, "max |P_L - oracle| " + sci(worst) + ", |P_extrap - log(2cosh 1)| " + sci(extrap)};
}

Outcome kato(double scale) {
  IntegratorConfig cfg;
  cfg.adaptive = true;
  cfg.tolerance = 1e-10;
  const auto r = kato_scan(models::two_level_gapped(), {10.0, 30.0, 100.0, 300.0, 1000.0}, uniform_grid(101), cfg);
  const double half = 0.3 * scale;
  const bool ok = std::abs(r.slope + 1.0) <= half;
  return {ok, "slope " + std::to_string(r.slope) + " (d(10) " + sci(r.rows.front().d) + ", d(1000) " +
                  sci(r.rows.back().d) + ", min gap " + std::to_string(r.min_gap) + ")"};
}

Outcome gapless() {
  IntegratorConfig cfg;
  cfg.adaptive = true;
  cfg.tolerance = 1e-10;
  const auto rows = gapless_scan(models::crossing(), {10.0, 100.0, 1000.0}, uniform_grid(101), cfg);
  const bool ok = rows.back().d < rows.front().d;
  return {ok, "d(10) " + sci(rows.front().d) + ", d(100) " + sci(rows[1].d) + ", d(1000) " + sci(rows.back().d)};
}

Outcome balance(double scale) {
  IntegratorConfig cfg;
  cfg.adaptive = true;
  cfg.tolerance = 1e-11;
  const auto chain = MatrixModel::from_path(models::transverse_field_path(), Volume::chain(4), 1.0, "transverse-4");
  double worst_two = 0.0;
  double worst_chain = 0.0;
  for (double T : {0.5, 1.0, 2.0}) {
    worst_two = std::max(worst_two, entropy_balance_check(models::two_level_gapped(), T, uniform_grid(21), cfg).max_residual);
    worst_chain = std::max(worst_chain, entropy_balance_check(chain, T, uniform_grid(21), cfg).max_residual);
  }
  const bool ok = std::max(worst_two, worst_chain) <= 1e-6 * scale;
  return {ok, "max residual 2-level " + sci(worst_two) + ", 4-site chain " + sci(worst_chain)};
}

Outcome gamma(double scale) {
  IntegratorConfig cfg;
  cfg.adaptive = true;
  cfg.tolerance = 1e-12;
  const auto r = gamma_factorization_check(models::two_level_gapped(), 2.0, 0.0, 1.0, cfg);
  const bool ok = r.defect <= 1e-7 * scale && r.delta_identity_defect <= 1e-8 * scale;
  return {ok, "defect " + sci(r.defect) + ", identity " + sci(r.delta_identity_defect) + ", unitarity " +
                  sci(r.gamma_unitarity)};
}

Outcome trotter(double scale) {
  const auto model = models::standard_two_level();
  const GeneratorRule h = model.generator();
  const double sigma = 0.0;
  const double tau = 0.1;
  const double T = 1.0;
  const auto ref = oracle::two_level_propagator(
      [&](double t) {
        const Matrix m = T * h(t);
        return oracle::Mat2{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
      },
      sigma, tau, 20000);
  Matrix u(2, 2);
  u << ref[0], ref[1], ref[2], ref[3];
  auto err = [&](int N) { return operator_norm(trotter_product(h, T, sigma, tau, N) - u); };
  std::ostringstream detail;
  bool ok = true;
  for (int N : {8, 16, 32}) {
    const double ratio = err(2 * N) / err(N);
    ok = ok && ratio >= 0.35 && ratio <= 0.65;
    detail << "r(" << N << ") " << std::fixed << std::setprecision(3) << ratio << ", ";
  }
  const double e256 = err(256);
  ok = ok && e256 <= 1e-4 * scale;
  detail << "error(256) " << sci(e256);
  return {ok, detail.str()};
}

struct ManyBodyRun {
  std::vector<ScanRecord> transverse;
  std::vector<ScanRecord> commuting;
  int sites = 0;
  std::vector<double> T;
  double transverse_seconds = 0.0;
  double commuting_seconds = 0.0;
};

ManyBodyRun many_body(bool fast, int threads) {
  ManyBodyRun run;
  run.sites = fast ? 6 : 8;
  run.T = fast ? std::vector<double>{1.0, 10.0} : std::vector<double>{1.0, 10.0, 100.0};
  ManyBodyOptions opt;
  opt.cfg.steps_factor = 2.0;
  opt.threads = threads;
  const auto volume = Volume::chain(run.sites);
  auto t0 = Clock::now();
  run.transverse = many_body_scan(models::transverse_field_path(), volume, run.T, uniform_grid(21), opt);
  run.transverse_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  t0 = Clock::now();
  run.commuting = many_body_scan(models::commuting_path(), volume, run.T, uniform_grid(21), opt);
  run.commuting_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return run;
}

Outcome entropy_constancy(const ManyBodyRun& run, double scale) {
  double drift = 0.0;
  for (const auto* rows : {&run.transverse, &run.commuting})
    for (const auto& r : *rows) drift = std::max(drift, r.entropy_drift);
  return {drift <= 1e-10 * scale, "max |S(tau) - S(0)| " + sci(drift) + " over " +
                                      std::to_string(run.transverse.size() + run.commuting.size()) + " cells"};
}

Outcome pressure_derivative(double scale) {
  const auto r = pressure_derivative_check(models::ising_to_transverse_path(), Volume::chain(4), uniform_grid(21), 1.0,
                                           1e-4, 1e-6 * scale);
  return {r.max_residual <= 1e-6 * scale,
          "max residual " + sci(r.max_residual) + (r.refined ? " (step refined)" : "")};
}

Outcome scan_integrity(const ManyBodyRun& run, double scale) {
  const double slack = 1e-12 * scale;
  int pinsker_bad = 0;
  double tau0 = 0.0;
  for (const auto* rows : {&run.transverse, &run.commuting})
    for (const auto& r : *rows) {
      RelativeEntropy s{r.relative_entropy, r.relative_entropy_finite};
      if (!pinsker_holds(r.trace_distance, s, slack)) ++pinsker_bad;
      if (r.tau == 0.0) tau0 = std::max({tau0, r.relative_entropy, r.trace_distance});
    }
  double closed = 0.0;
  for (const auto& r : run.commuting) {
    const double expected = oracle::commuting_relative_entropy_per_site(run.sites, 1.0, 0.3, r.tau, 1.0);
    closed = std::max(closed, std::abs(r.relative_entropy_per_site - expected));
  }
  double max_rel = 0.0;
  for (const auto& r : run.transverse) max_rel = std::max(max_rel, r.relative_entropy_per_site);
  const bool ok = pinsker_bad == 0 && tau0 <= 1e-10 * scale && closed <= 1e-8 * scale;
  return {ok, "L=" + std::to_string(run.sites) + ", " + std::to_string(run.T.size()) +
                  " T values: Pinsker violations " + std::to_string(pinsker_bad) + ", tau=0 max " + sci(tau0) +
                  ", commuting closed-form error " + sci(closed) + ", max S/L " + sci(max_rel)};
}

Outcome derivation_bound(std::mt19937_64& rng) {
  int violations = 0;
  double worst_ratio = 0.0;
  std::uniform_int_distribution<int> pick_n(1, 3);
  std::uniform_real_distribution<double> pick_scale(0.1, 2.0);
  for (int k = 0; k < 500; ++k) {
    const int n = pick_n(rng);
    const int range = n == 3 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 3);
    const auto phi = random_interaction(rng, range, pick_scale(rng));
    const bool two_site = rng() % 2 == 0;
    const LocalTerm a = two_site ? LocalTerm({{0}, {1}}, random_hermitian(4, rng)) : LocalTerm({{0}}, random_hermitian(2, rng));
    const auto r = derivation_bound_check(phi, a, n);
    if (!r.ok) ++violations;
    worst_ratio = std::max(worst_ratio, r.measured / r.bound);
  }
  return {violations == 0,
          std::to_string(violations) + " violations in 500 triples, max measured/bound " + sci(worst_ratio)};
}

Outcome variational(double scale, std::mt19937_64& rng) {
  const auto volume = Volume::chain(4);
  double worst_equal = 0.0;
  bool never_above = true;
  std::vector<Interaction> single{Interaction::zero()};
  for (int k = 0; k < 5; ++k) single.push_back(field_interaction(random_hermitian(2, rng)));
  for (const auto& phi : single) {
    const auto r = variational_scan(phi, volume, 1.0);
    never_above = never_above && r.value <= r.pressure + 1e-12 * scale;
    worst_equal = std::max(worst_equal, std::abs(r.gap));
  }
  const auto ising = variational_scan(ising_chain(1.0, 0.0, 0.0), Volume::chain(6), 1.0);
  never_above = never_above && ising.value <= ising.pressure + 1e-12 * scale;
  const bool ok = never_above && worst_equal <= 1e-8 * scale && ising.gap > 0.0;
  return {ok, "single-site max gap " + sci(worst_equal) + ", Ising gap " + sci(ising.gap) +
                  (never_above ? "" : ", value above pressure")};
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  " << std::left << std::setw(22) << r.name
     << std::right << "  " << r.detail << "  [" << std::fixed << std::setprecision(1) << r.seconds << " s / "
     << std::setprecision(0) << r.budget << " s]";
  return os.str();
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const double scale = options.tolerance_scale;
  std::mt19937_64 rng(options.seed);
  std::vector<CriterionResult> results;
  std::optional<ManyBodyRun> mb;
  std::string mb_error;
  double shared_seconds = 0.0;  // time of work reused from an earlier criterion

  auto record = [&](int id, const std::string& name, double budget, auto&& body) {
    CriterionResult r{id, name, false, "", 0.0, budget};
    const auto t0 = Clock::now();
    try {
      const Outcome o = body();
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count() + shared_seconds;
    shared_seconds = 0.0;
    if (r.seconds > budget) {
      r.pass = false;
      r.detail += " (over time budget)";
    }
    results.push_back(r);
    if (options.on_result) options.on_result(r);
  };

  record(1, "weak-gibbs identity", 10, [&] { return weak_gibbs(scale, rng); });
  record(2, "pressure oracle", 30, [&] { return pressure_oracle(scale); });
  record(3, "kato rate", 120, [&] { return kato(scale); });
  record(4, "gapless decay", 120, [&] { return gapless(); });
  record(5, "entropy balance", 120, [&] { return balance(scale); });
  record(6, "gamma factorization", 60, [&] { return gamma(scale); });
  record(7, "trotter limit", 60, [&] { return trotter(scale); });
  record(8, "entropy constancy", 900, [&] {
    try {
      mb = many_body(options.fast, options.threads);
    } catch (const std::exception& e) {
      mb_error = e.what();
      throw;
    }
    return entropy_constancy(*mb, scale);
  });
  record(9, "pressure derivative", 30, [&] { return pressure_derivative(scale); });
  // Criterion 10 shares the scan with 8 and is charged its full time.
  if (mb) shared_seconds = mb->transverse_seconds + mb->commuting_seconds;
  record(10, "many-body integrity", 900, [&] {
    if (!mb) throw std::runtime_error("many-body scan failed: " + mb_error);
    return scan_integrity(*mb, scale);
  });
  record(11, "derivation bound", 60, [&] { return derivation_bound(rng); });
  record(12, "variational principle", 60, [&] { return variational(scale, rng); });
  return results;
}

}  // namespace adialab
