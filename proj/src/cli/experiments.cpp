#include "adialab/experiments.hpp"

#include "adialab/adiabatic.hpp"
#include "adialab/errors.hpp"
#include "adialab/model_file.hpp"
#include "adialab/parallel.hpp"
#include "adialab/thermo.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace adialab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {
    "experiment", "description", "output", "seed",      "model",    "interaction", "path",     "volume",
    "beta",       "T",           "tau",    "integrator", "tolerance", "horizons",  "s",        "t",
    "fd_step",    "grid_points", "threads", "initial",   "endpoint_T"};

template <typename V>
V scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<V>();
  } catch (const YAML::Exception&) {
    throw ValidationError("config key '" + key + "' has an invalid value");
  }
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) throw ValidationError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

std::vector<double> real_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ValidationError("config key '" + key + "' must be a list");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(scalar<double>(v, key));
  if (out.empty()) throw ValidationError("config key '" + key + "' must not be empty");
  return out;
}

fs::path existing_file(const fs::path& base, const std::string& text, const std::string& key) {
  fs::path p(text);
  if (p.is_relative()) p = base / p;
  if (!fs::is_regular_file(p)) throw ValidationError("config key '" + key + "': file not found: " + p.string());
  return p;
}

std::vector<double> tau_grid(const YAML::Node& node) {
  if (node.IsMap()) {
    check_keys(node, {"points"}, "tau");
    const int points = scalar<int>(node["points"], "tau.points");
    if (points < 2) throw ValidationError("tau.points must be >= 2");
    return uniform_grid(points);
  }
  auto grid = real_list(node, "tau");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] < 0.0 || grid[k] > 1.0) throw ValidationError("tau values must lie in [0, 1]");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw ValidationError("tau values must increase strictly");
  }
  return grid;
}

IntegratorConfig integrator_config(const YAML::Node& node) {
  check_keys(node, {"scheme", "steps", "steps_factor", "adaptive", "tolerance", "max_steps", "reprojection_threshold"},
             "integrator");
  IntegratorConfig c;
  if (node["scheme"]) c.scheme = parse_scheme(scalar<std::string>(node["scheme"], "integrator.scheme"));
  if (node["steps"]) c.steps = scalar<int>(node["steps"], "integrator.steps");
  if (node["steps_factor"]) c.steps_factor = scalar<double>(node["steps_factor"], "integrator.steps_factor");
  if (node["adaptive"]) c.adaptive = scalar<bool>(node["adaptive"], "integrator.adaptive");
  if (node["tolerance"]) c.tolerance = scalar<double>(node["tolerance"], "integrator.tolerance");
  if (node["max_steps"]) c.max_steps = scalar<int>(node["max_steps"], "integrator.max_steps");
  if (node["reprojection_threshold"])
    c.reprojection_threshold = scalar<double>(node["reprojection_threshold"], "integrator.reprojection_threshold");
  c.validate();
  return c;
}

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      json j = json::object();
      for (const auto& kv : node) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      json j = json::array();
      for (const auto& v : node) j.push_back(yaml_to_json(v));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const auto text = node.Scalar();
      long long i = 0;
      auto [pi, ei] = std::from_chars(text.data(), text.data() + text.size(), i);
      if (ei == std::errc() && pi == text.data() + text.size()) return i;
      double d = 0.0;
      auto [pd, ed] = std::from_chars(text.data(), text.data() + text.size(), d);
      if (ed == std::errc() && pd == text.data() + text.size()) return d;
      if (text == "true") return true;
      if (text == "false") return false;
      return text;
    }
    default:
      return nullptr;
  }
}

json integrator_json(const IntegratorConfig& c) {
  json j = {{"scheme", to_string(c.scheme)},
            {"steps_factor", c.steps_factor},
            {"adaptive", c.adaptive},
            {"tolerance", c.tolerance},
            {"max_steps", c.max_steps},
            {"reprojection_threshold", c.reprojection_threshold}};
  j["steps"] = c.steps ? json(*c.steps) : json(nullptr);
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& file, const std::vector<std::string>& header) : out_(file), path_(file) {
    if (!out_) throw std::runtime_error("cannot write " + file.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
  }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  std::ofstream out_;
  fs::path path_;
};

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

/// Thrown when an experiment's own invariant check fails.
struct InvariantFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct Context {
  Context(const ExperimentConfig& c, fs::path out) : cfg(c), output(std::move(out)) {}

  const ExperimentConfig& cfg;
  fs::path output;
  json diagnostics = json::object();
  json tolerances = json::object();
  json hashes = json::object();
  std::vector<fs::path> outputs;
  std::vector<std::string> failures;

  CsvWriter csv(const std::vector<std::string>& header) {
    const auto file = output / (cfg.experiment + ".csv");
    outputs.push_back(file);
    return CsvWriter(file, header);
  }
  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

void require(bool present, const std::string& experiment, const std::string& key) {
  if (!present) throw ValidationError(experiment + " requires config key '" + key + "'");
}

Volume chain_volume(const ExperimentConfig& c) {
  require(c.has_volume && c.volume.sites.has_value(), c.experiment, "volume.sites");
  return Volume::chain(*c.volume.sites, c.volume.boundary, 0, c.volume.max_sites);
}

Interaction interaction_of(Context& ctx) {
  require(ctx.cfg.interaction.has_value(), ctx.cfg.experiment, "interaction");
  ctx.hashes[ctx.cfg.interaction->string()] = file_hash(*ctx.cfg.interaction);
  return load_interaction(*ctx.cfg.interaction);
}

InteractionPath path_of(Context& ctx) {
  require(ctx.cfg.path.has_value(), ctx.cfg.experiment, "path");
  ctx.hashes[ctx.cfg.path->string()] = file_hash(*ctx.cfg.path);
  auto p = load_path(*ctx.cfg.path);
  return p;
}

/// Builtin model, matrix-model file, or H_Lambda of a path on a chain.
MatrixModel matrix_model_of(Context& ctx) {
  const auto& c = ctx.cfg;
  if (c.model) return models::by_name(*c.model);
  if (c.model_file) {
    ctx.hashes[c.model_file->string()] = file_hash(*c.model_file);
    return load_matrix_model(*c.model_file);
  }
  if (c.path) {
    auto path = path_of(ctx);
    return MatrixModel::from_path(path, chain_volume(c), c.beta, c.path->stem().string());
  }
  throw ValidationError(c.experiment + " requires 'model' or 'path' with 'volume.sites'");
}

void require_T(const ExperimentConfig& c) {
  if (c.T.empty()) throw ValidationError(c.experiment + " requires a non-empty 'T' grid");
  for (double T : c.T)
    if (!(T > 0.0)) throw ValidationError("T values must be > 0");
}

void run_pressure(Context& ctx) {
  const auto& c = ctx.cfg;
  require(c.has_volume, c.experiment, "volume");
  auto lengths = c.volume.lengths;
  if (lengths.empty() && c.volume.sites) lengths = {*c.volume.sites};
  if (lengths.empty()) throw ValidationError("pressure requires volume.lengths or volume.sites");
  const auto phi = interaction_of(ctx);
  std::vector<double> pressures;
  for (int L : lengths) pressures.push_back(pressure(phi, Volume::chain(L, c.volume.boundary, 0, c.volume.max_sites), c.beta));
  double estimate = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> residuals(lengths.size(), std::numeric_limits<double>::quiet_NaN());
  if (lengths.size() >= 3) {
    const auto fit = pressure_extrapolate(phi, lengths, c.beta, c.volume.boundary, c.volume.max_sites);
    estimate = fit.estimate;
    residuals = fit.residuals;
    ctx.diagnostics["extrapolated"] = fit.estimate;
    ctx.diagnostics["slope"] = fit.slope;
    ctx.diagnostics["max_residual"] = fit.max_residual;
    if (c.tolerance) {
      ctx.tolerances["fit_residual"] = *c.tolerance;
      ctx.check(fit.max_residual <= *c.tolerance, "1/L fit residual exceeds tolerance");
    }
  }
  auto csv = ctx.csv({"L", "beta", "boundary", "pressure", "extrapolated", "residual"});
  for (std::size_t k = 0; k < lengths.size(); ++k)
    csv.row({num(lengths[k]), num(c.beta), to_string(c.volume.boundary), num(pressures[k]), num(estimate),
             num(residuals[k])});
}

void run_variational(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto phi = interaction_of(ctx);
  const auto volume = chain_volume(c);
  VariationalOptions opt;
  opt.grid_points = c.grid_points;
  const auto r = variational_scan(phi, volume, c.beta, opt);
  ctx.tolerances["value_above_pressure"] = 1e-12;
  ctx.check(r.value <= r.pressure + 1e-12, "product-state value exceeds the pressure");
  ctx.diagnostics["gap"] = r.gap;
  auto csv = ctx.csv({"L", "beta", "value", "pressure", "gap", "bloch_x", "bloch_y", "bloch_z", "evaluations"});
  csv.row({num(volume.num_sites()), num(c.beta), num(r.value), num(r.pressure), num(r.gap), num(r.bloch[0]),
           num(r.bloch[1]), num(r.bloch[2]), num(r.evaluations)});
}

void run_kato(Context& ctx) {
  const auto& c = ctx.cfg;
  require_T(c);
  const auto model = matrix_model_of(ctx);
  const auto r = kato_scan(model, c.T, c.tau, c.integrator, c.threads);
  ctx.diagnostics["slope"] = r.slope;
  ctx.diagnostics["min_gap"] = r.min_gap;
  ctx.diagnostics["min_gap_tau"] = r.min_gap_tau;
  auto csv = ctx.csv({"T", "d", "worst_tau", "steps", "slope", "min_gap"});
  for (const auto& row : r.rows)
    csv.row({num(row.T), num(row.d), num(row.worst_tau), num(row.steps), num(r.slope), num(r.min_gap)});
}

void run_gapless(Context& ctx) {
  const auto& c = ctx.cfg;
  require_T(c);
  const auto model = matrix_model_of(ctx);
  const auto rows = gapless_scan(model, c.T, c.tau, c.integrator, c.threads);
  if (rows.size() >= 2) {
    const auto lo = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.T < b.T; });
    const auto hi = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.T < b.T; });
    ctx.check(hi->d < lo->d, "d at the largest T is not below d at the smallest T");
  }
  auto csv = ctx.csv({"T", "d", "worst_tau", "steps"});
  for (const auto& row : rows) csv.row({num(row.T), num(row.d), num(row.worst_tau), num(row.steps)});
}

void run_balance(Context& ctx) {
  const auto& c = ctx.cfg;
  require_T(c);
  const auto model = matrix_model_of(ctx);
  const double tol = c.tolerance.value_or(1e-6);
  ctx.tolerances["balance_residual"] = tol;
  auto csv = ctx.csv({"T", "tau", "lhs", "rhs", "residual"});
  double worst = 0.0;
  for (double T : c.T) {
    const auto r = entropy_balance_check(model, T, c.tau, c.integrator);
    worst = std::max(worst, r.max_residual);
    for (const auto& row : r.rows) csv.row({num(T), num(row.tau), num(row.lhs), num(row.rhs), num(row.residual)});
  }
  ctx.diagnostics["max_residual"] = worst;
  ctx.check(worst <= tol, "entropy balance residual exceeds tolerance");
}

void run_gamma(Context& ctx) {
  const auto& c = ctx.cfg;
  require_T(c);
  const auto model = matrix_model_of(ctx);
  const double tol = c.tolerance.value_or(1e-7);
  ctx.tolerances["defect"] = tol;
  ctx.tolerances["delta_identity"] = 1e-8;
  auto csv = ctx.csv({"T", "s", "t", "defect", "delta_identity_defect", "gamma_unitarity",
                      "generator_quadrature_defect", "steps"});
  for (double T : c.T) {
    const auto r = gamma_factorization_check(model, T, c.s, c.t, c.integrator);
    ctx.check(r.defect <= tol, "factorization defect exceeds tolerance at T=" + num(T));
    ctx.check(r.delta_identity_defect <= 1e-8, "derivation identity defect exceeds 1e-8 at T=" + num(T));
    csv.row({num(T), num(c.s), num(c.t), num(r.defect), num(r.delta_identity_defect), num(r.gamma_unitarity),
             num(r.generator_quadrature_defect), num(r.steps)});
  }
}

void run_isothermal(Context& ctx) {
  const auto& c = ctx.cfg;
  require_T(c);
  const auto model = matrix_model_of(ctx);
  const auto rows = isothermal_equivalence_scan(model, c.T, c.tau, c.integrator, c.threads);
  auto csv = ctx.csv({"T", "sup_trace_distance", "sup_relative_entropy", "sup_pairing_defect", "pinsker_ok"});
  for (const auto& row : rows) {
    ctx.check(row.pinsker_ok, "Pinsker inequality violated at T=" + num(row.T));
    csv.row({num(row.T), num(row.sup_trace_distance), num(row.sup_relative_entropy), num(row.sup_pairing_defect),
             flag(row.pinsker_ok)});
  }
}

void run_many_body(Context& ctx) {
  const auto& c = ctx.cfg;
  require_T(c);
  const auto path = path_of(ctx);
  const auto volume = chain_volume(c);
  ManyBodyOptions opt;
  opt.cfg = c.integrator;
  opt.beta = c.beta;
  opt.threads = c.threads;
  const auto rows = many_body_scan(path, volume, c.T, c.tau, opt);
  ctx.tolerances["entropy_drift"] = 1e-10;
  ctx.tolerances["tau0"] = 1e-10;
  ctx.tolerances["pinsker_slack"] = 1e-12;
  ctx.diagnostics["equilibrium"] = kEquilibriumSurrogateNote;
  double drift = 0.0;
  auto csv = ctx.csv({"T", "tau", "relative_entropy", "relative_entropy_per_site", "relative_entropy_finite",
                      "trace_distance", "trace_distance_per_site", "pairing_driven", "pairing_instantaneous",
                      "entropy_per_site", "entropy_drift", "pinsker_ok", "steps"});
  for (const auto& r : rows) {
    drift = std::max(drift, r.entropy_drift);
    ctx.check(r.pinsker_ok, "Pinsker inequality violated at T=" + num(r.T) + " tau=" + num(r.tau));
    ctx.check(r.entropy_drift <= 1e-10, "entropy drift exceeds 1e-10 at T=" + num(r.T) + " tau=" + num(r.tau));
    if (r.tau == 0.0)
      ctx.check(r.relative_entropy <= 1e-10 && r.trace_distance <= 1e-10, "tau=0 row is not zero at T=" + num(r.T));
    csv.row({num(r.T), num(r.tau), num(r.relative_entropy), num(r.relative_entropy_per_site),
             flag(r.relative_entropy_finite), num(r.trace_distance), num(r.trace_distance_per_site),
             num(r.pairing_driven), num(r.pairing_instantaneous), num(r.entropy_per_site), num(r.entropy_drift),
             flag(r.pinsker_ok), num(r.steps)});
  }
  ctx.diagnostics["max_entropy_drift"] = drift;
}

void run_pressure_derivative(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto path = path_of(ctx);
  const auto volume = chain_volume(c);
  const double tol = c.tolerance.value_or(1e-6);
  ctx.tolerances["residual"] = tol;
  const auto r = pressure_derivative_check(path, volume, c.tau, c.beta, c.fd_step, tol);
  ctx.diagnostics["max_residual"] = r.max_residual;
  ctx.diagnostics["refined"] = r.refined;
  ctx.check(r.max_residual <= tol, "pressure-derivative residual exceeds tolerance");
  auto csv = ctx.csv({"tau", "fd_derivative", "gibbs_expectation", "residual", "step"});
  for (const auto& row : r.rows)
    csv.row({num(row.tau), num(row.fd_derivative), num(row.gibbs_expectation), num(row.residual), num(row.step)});
}

void run_dichotomy(Context& ctx) {
  const auto& c = ctx.cfg;
  if (c.horizons.empty()) throw ValidationError("dichotomy requires a non-empty 'horizons' list");
  const auto phi1 = interaction_of(ctx);
  const auto volume = chain_volume(c);
  const auto dim = volume.hilbert_dimension();
  std::optional<DensityMatrix> nu0;
  switch (c.initial) {
    case InitialState::pure_up: {
      Vector psi = Vector::Zero(dim);
      psi(0) = 1.0;
      nu0 = DensityMatrix::pure(psi);
      break;
    }
    case InitialState::maximally_mixed:
      nu0 = DensityMatrix::maximally_mixed(dim);
      break;
    case InitialState::gibbs: {
      require(c.initial_interaction.has_value(), c.experiment, "initial.interaction");
      ctx.hashes[c.initial_interaction->string()] = file_hash(*c.initial_interaction);
      const auto phi0 = load_interaction(*c.initial_interaction);
      nu0 = gibbs(local_hamiltonian(phi0, volume).matrix, c.initial_beta).state;
      break;
    }
  }
  std::optional<AdiabaticEndpoint> endpoint;
  if (c.path) {
    require(c.endpoint_T.has_value(), c.experiment, "endpoint_T");
    endpoint = AdiabaticEndpoint{path_of(ctx), *c.endpoint_T, c.integrator};
  }
  const auto rows = entropy_dichotomy_report(*nu0, phi1, volume, c.horizons, endpoint);
  ctx.tolerances["entropy"] = 1e-10;
  auto csv = ctx.csv({"label", "horizon", "entropy_per_site", "delta_vs_initial"});
  for (const auto& r : rows) {
    if (r.label == "driven-endpoint")
      ctx.check(std::abs(r.delta_vs_initial) <= 1e-10, "driven endpoint changed the entropy");
    else if (r.label != "initial")
      ctx.check(r.delta_vs_initial >= -1e-10, "time average lowered the entropy (" + r.label + ")");
    csv.row({r.label, num(r.horizon), num(r.entropy_per_site), num(r.delta_vs_initial)});
  }
}

using Runner = void (*)(Context&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"pressure", run_pressure},
      {"variational", run_variational},
      {"kato", run_kato},
      {"gapless", run_gapless},
      {"entropy-balance", run_balance},
      {"gamma-check", run_gamma},
      {"isothermal", run_isothermal},
      {"many-body", run_many_body},
      {"pressure-derivative", run_pressure_derivative},
      {"dichotomy", run_dichotomy},
  };
  return table;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

const std::vector<ExperimentInfo>& experiment_table() {
  static const std::vector<ExperimentInfo> table = {
      {"pressure", "interaction, volume.lengths | volume.sites", "beta, volume.boundary, tolerance",
       "L, beta, boundary, pressure, extrapolated, residual"},
      {"variational", "interaction, volume.sites", "beta, grid_points",
       "L, beta, value, pressure, gap, bloch_x, bloch_y, bloch_z, evaluations"},
      {"kato", "model | path + volume.sites, T", "tau, integrator, beta, threads",
       "T, d, worst_tau, steps, slope, min_gap"},
      {"gapless", "model (with projection), T", "tau, integrator, threads", "T, d, worst_tau, steps"},
      {"entropy-balance", "model | path + volume.sites, T", "tau, integrator, beta, tolerance",
       "T, tau, lhs, rhs, residual"},
      {"gamma-check", "model | path + volume.sites, T", "s, t, integrator, tolerance",
       "T, s, t, defect, delta_identity_defect, gamma_unitarity, generator_quadrature_defect, steps"},
      {"isothermal", "model | path + volume.sites, T", "tau, integrator, threads",
       "T, sup_trace_distance, sup_relative_entropy, sup_pairing_defect, pinsker_ok"},
      {"many-body", "path, volume.sites, T", "tau, integrator, beta, threads",
       "T, tau, relative_entropy(_per_site), relative_entropy_finite, trace_distance(_per_site), "
       "pairing_driven, pairing_instantaneous, entropy_per_site, entropy_drift, pinsker_ok, steps"},
      {"pressure-derivative", "path, volume.sites", "tau, beta, fd_step, tolerance",
       "tau, fd_derivative, gibbs_expectation, residual, step"},
      {"dichotomy", "interaction, volume.sites, horizons", "initial, path + endpoint_T, integrator",
       "label, horizon, entropy_per_site, delta_vs_initial"},
  };
  return table;
}

std::string list_experiments() {
  std::ostringstream os;
  os << std::left << std::setw(21) << "kind" << std::setw(45) << "required" << "optional\n";
  for (const auto& e : experiment_table())
    os << std::setw(21) << e.kind << std::setw(45) << e.required << e.optional << '\n';
  return os.str();
}

ExperimentConfig parse_config(const fs::path& file) {
  if (!fs::is_regular_file(file)) throw ValidationError("config not found: " + file.string());
  YAML::Node doc;
  try {
    doc = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw ValidationError("config parse error: " + std::string(e.what()));
  }
  check_keys(doc, kTopKeys, "config");
  const fs::path base = file.parent_path();
  ExperimentConfig c;
  c.source = file;
  if (!doc["experiment"]) throw ValidationError("config requires 'experiment'");
  c.experiment = scalar<std::string>(doc["experiment"], "experiment");
  if (!runners().contains(c.experiment)) throw ValidationError("unknown experiment kind '" + c.experiment + "'");
  c.output = doc["output"] ? fs::path(scalar<std::string>(doc["output"], "output")) : fs::path("results") / c.experiment;
  if (doc["seed"]) c.seed = scalar<std::uint64_t>(doc["seed"], "seed");
  if (doc["model"]) {
    const auto m = scalar<std::string>(doc["model"], "model");
    const auto builtin = models::names();
    if (std::find(builtin.begin(), builtin.end(), m) != builtin.end())
      c.model = m;
    else
      c.model_file = existing_file(base, m, "model");
  }
  if (doc["interaction"]) c.interaction = existing_file(base, scalar<std::string>(doc["interaction"], "interaction"), "interaction");
  if (doc["path"]) c.path = existing_file(base, scalar<std::string>(doc["path"], "path"), "path");
  if (doc["volume"]) {
    const auto v = doc["volume"];
    check_keys(v, {"sites", "lengths", "boundary", "max_sites"}, "volume");
    c.has_volume = true;
    if (v["sites"]) c.volume.sites = scalar<int>(v["sites"], "volume.sites");
    if (v["lengths"])
      for (double L : real_list(v["lengths"], "volume.lengths")) c.volume.lengths.push_back(static_cast<int>(L));
    if (v["boundary"]) c.volume.boundary = parse_boundary(scalar<std::string>(v["boundary"], "volume.boundary"));
    if (v["max_sites"]) c.volume.max_sites = scalar<int>(v["max_sites"], "volume.max_sites");
    if (c.volume.sites && *c.volume.sites < 1) throw ValidationError("volume.sites must be >= 1");
    for (int L : c.volume.lengths)
      if (L < 1) throw ValidationError("volume.lengths must be >= 1");
  }
  if (doc["beta"]) c.beta = scalar<double>(doc["beta"], "beta");
  if (!(c.beta >= 0.0) || !std::isfinite(c.beta)) throw ValidationError("beta must be finite and >= 0");
  if (doc["T"]) c.T = real_list(doc["T"], "T");
  c.tau = doc["tau"] ? tau_grid(doc["tau"]) : uniform_grid(21);
  if (doc["integrator"]) c.integrator = integrator_config(doc["integrator"]);
  if (c.experiment == "many-body" && !(doc["integrator"] && doc["integrator"]["reprojection_threshold"]))
    c.integrator.reprojection_threshold = ManyBodyOptions{}.cfg.reprojection_threshold;
  if (doc["tolerance"]) c.tolerance = scalar<double>(doc["tolerance"], "tolerance");
  if (doc["horizons"]) c.horizons = real_list(doc["horizons"], "horizons");
  if (doc["s"]) c.s = scalar<double>(doc["s"], "s");
  if (doc["t"]) c.t = scalar<double>(doc["t"], "t");
  if (doc["fd_step"]) c.fd_step = scalar<double>(doc["fd_step"], "fd_step");
  if (doc["grid_points"]) c.grid_points = scalar<int>(doc["grid_points"], "grid_points");
  if (doc["threads"]) c.threads = scalar<int>(doc["threads"], "threads");
  if (doc["initial"]) {
    const auto i = doc["initial"];
    check_keys(i, {"state", "interaction", "beta"}, "initial");
    const auto state = i["state"] ? scalar<std::string>(i["state"], "initial.state") : std::string("pure-up");
    if (state == "pure-up")
      c.initial = InitialState::pure_up;
    else if (state == "maximally-mixed")
      c.initial = InitialState::maximally_mixed;
    else if (state == "gibbs")
      c.initial = InitialState::gibbs;
    else
      throw ValidationError("initial.state must be pure-up, maximally-mixed or gibbs");
    if (i["interaction"])
      c.initial_interaction = existing_file(base, scalar<std::string>(i["interaction"], "initial.interaction"),
                                            "initial.interaction");
    if (i["beta"]) c.initial_beta = scalar<double>(i["beta"], "initial.beta");
  }
  if (doc["endpoint_T"]) c.endpoint_T = scalar<double>(doc["endpoint_T"], "endpoint_T");
  if (doc["T"] && c.T.empty()) throw ValidationError("T grid must not be empty");
  return c;
}

OutputLock::OutputLock(const fs::path& dir) : file_(dir / ".adialab.lock") {
  std::FILE* f = std::fopen(file_.c_str(), "wx");
  if (!f)
    throw ResourceLimitError("output directory " + dir.string() + " is locked by another run (remove " +
                             file_.string() + " if stale)");
  std::fclose(f);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  fs::remove(file_, ec);
}

fs::path append_manifest(const fs::path& dir, const std::string& json_line) {
  fs::create_directories(dir);
  const auto file = dir / "manifest.jsonl";
  std::ofstream out(file, std::ios::app);
  out << json_line << '\n';
  return file;
}

RunOutcome run_config(const fs::path& config, const std::optional<fs::path>& output_override, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  json entry = {{"timestamp", utc_timestamp()}, {"tool_version", kToolVersion}, {"config", config.string()}};
  fs::path output = output_override.value_or(fs::path("results"));

  // Snapshot what can be read even when validation later fails.
  try {
    const auto raw = YAML::LoadFile(config.string());
    entry["config_snapshot"] = yaml_to_json(raw);
    if (!output_override && raw.IsMap() && raw["output"] && raw["output"].IsScalar())
      output = raw["output"].as<std::string>();
    else if (!output_override && raw.IsMap() && raw["experiment"] && raw["experiment"].IsScalar())
      output = fs::path("results") / raw["experiment"].as<std::string>();
  } catch (const std::exception&) {
    entry["config_snapshot"] = nullptr;
  }

  std::optional<ExperimentConfig> cfg;
  json diagnostics = json::object();
  try {
    cfg = parse_config(config);
    if (output_override) cfg->output = *output_override;
    output = cfg->output;
    entry["experiment"] = cfg->experiment;
    entry["seed"] = cfg->seed;
    entry["integrator"] = integrator_json(cfg->integrator);
    entry["threads"] = thread_count(cfg->threads);
    fs::create_directories(output);
    OutputLock lock(output);
    Context ctx(*cfg, output);
    if (cfg->model) ctx.hashes["builtin:" + *cfg->model] = "builtin";
    try {
      runners().at(cfg->experiment)(ctx);
    } catch (...) {
      entry["model_hashes"] = ctx.hashes;
      entry["outputs"] = json::array();
      throw;
    }
    entry["model_hashes"] = ctx.hashes;
    entry["tolerances"] = ctx.tolerances;
    diagnostics = ctx.diagnostics;
    outcome.outputs = ctx.outputs;
    json outs = json::array();
    for (const auto& p : ctx.outputs) outs.push_back(p.string());
    entry["outputs"] = outs;
    if (!ctx.failures.empty()) {
      std::string msg;
      for (const auto& f : ctx.failures) msg += (msg.empty() ? "" : "; ") + f;
      throw InvariantFailure(msg);
    }
    outcome.exit_code = kExitOk;
    outcome.status = "ok";
  } catch (const GapClosedError& e) {
    outcome = {kExitNumerical, "numerical-error", e.what(), outcome.outputs, {}};
  } catch (const ValidationError& e) {
    outcome = {kExitValidation, "validation-error", e.what(), outcome.outputs, {}};
  } catch (const NumericalError& e) {
    outcome = {kExitNumerical, "numerical-error", e.what(), outcome.outputs, {}};
  } catch (const ResourceLimitError& e) {
    outcome = {kExitResource, "resource-limit", e.what(), outcome.outputs, {}};
  } catch (const YAML::Exception& e) {
    outcome = {kExitValidation, "validation-error", e.what(), outcome.outputs, {}};
  } catch (const std::exception& e) {
    outcome = {kExitInternal, "internal-error", e.what(), outcome.outputs, {}};
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  entry["status"] = outcome.status;
  entry["exit_code"] = outcome.exit_code;
  entry["message"] = outcome.message;
  entry["wall_time_s"] = seconds;
  entry["diagnostics"] = diagnostics;
  try {
    outcome.manifest = append_manifest(output, entry.dump());
  } catch (const std::exception& e) {
    if (log) *log << "warning: manifest not written: " << e.what() << '\n';
  }
  if (log) {
    if (outcome.exit_code == kExitOk) {
      *log << "ok: " << (cfg ? cfg->experiment : std::string("?")) << " in " << std::fixed << std::setprecision(2) << seconds
            << std::defaultfloat << " s\n";
      for (const auto& p : outcome.outputs) *log << "  wrote " << p.string() << '\n';
    } else {
      *log << "error (" << outcome.status << "): " << outcome.message << '\n';
    }
  }
  return outcome;
}

}  // namespace adialab
