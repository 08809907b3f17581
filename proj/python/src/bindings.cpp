#include "adialab/acceptance.hpp"
#include "adialab/adiabatic.hpp"
#include "adialab/errors.hpp"
#include "adialab/experiments.hpp"
#include "adialab/model_file.hpp"
#include "adialab/thermo.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>

namespace py = pybind11;
using namespace adialab;

namespace {

Volume chain(int sites, const std::string& boundary, int max_sites) {
  return Volume::chain(sites, parse_boundary(boundary), 0, max_sites);
}

Interaction make_interaction(const std::vector<std::pair<std::vector<int>, Matrix>>& terms, double weight_r) {
  std::vector<LocalTerm> out;
  for (const auto& [support, matrix] : terms) {
    std::vector<Site> sites;
    for (int x : support) sites.push_back(Site{x});
    out.emplace_back(std::move(sites), matrix);
  }
  return Interaction(std::move(out), weight_r);
}

IntegratorConfig integrator(const std::string& scheme, std::optional<int> steps, double steps_factor, bool adaptive,
                            double tolerance) {
  IntegratorConfig cfg;
  cfg.scheme = parse_scheme(scheme);
  cfg.steps = steps;
  cfg.steps_factor = steps_factor;
  cfg.adaptive = adaptive;
  cfg.tolerance = tolerance;
  cfg.validate();
  return cfg;
}

InteractionPath builtin_path(const std::string& name) {
  if (name == "transverse-field") return models::transverse_field_path();
  if (name == "commuting") return models::commuting_path();
  if (name == "ising-to-transverse") return models::ising_to_transverse_path();
  if (name == "standard-two-level") return models::standard_two_level_path();
  throw ValidationError("unknown builtin path '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-volume adiabatic and thermodynamic experiments";
  m.attr("__version__") = kToolVersion;

  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  static py::exception<ResourceLimitError> resource_error(m, "ResourceLimitError", PyExc_MemoryError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    } catch (const ResourceLimitError& e) {
      py::set_error(resource_error, e.what());
    }
  });

  m.def("pauli", &pauli::from_string, py::arg("word"), "Tensor product of Pauli matrices, e.g. 'ZZ'.");

  py::class_<Interaction>(m, "Interaction")
      .def(py::init(&make_interaction), py::arg("terms"), py::arg("weight_r") = 1.0,
           "Chain interaction from (support sites, matrix) pairs.")
      .def_property_readonly("weight_r", &Interaction::weight_r)
      .def_property_readonly("range", &Interaction::range)
      .def_property_readonly("terms",
                             [](const Interaction& phi) {
                               std::vector<std::pair<std::vector<int>, Matrix>> out;
                               for (const auto& t : phi.terms()) {
                                 std::vector<int> xs;
                                 for (const auto& s : t.support()) xs.push_back(s.x);
                                 out.emplace_back(xs, t.matrix());
                               }
                               return out;
                             })
      .def("norm_r", [](const Interaction& phi) { return norm_r(phi); });

  m.def("ising_chain", &ising_chain, py::arg("coupling"), py::arg("longitudinal") = 0.0,
        py::arg("transverse") = 0.0, py::arg("weight_r") = 1.0);
  m.def("load_interaction", &load_interaction, py::arg("file"));

  m.def(
      "local_hamiltonian",
      [](const Interaction& phi, int sites, const std::string& boundary, int max_sites) {
        return local_hamiltonian(phi, chain(sites, boundary, max_sites)).matrix;
      },
      py::arg("interaction"), py::arg("sites"), py::arg("boundary") = "free", py::arg("max_sites") = kDefaultMaxSites);
  m.def(
      "pressure",
      [](const Interaction& phi, int sites, double beta, const std::string& boundary, int max_sites) {
        return pressure(phi, chain(sites, boundary, max_sites), beta);
      },
      py::arg("interaction"), py::arg("sites"), py::arg("beta") = 1.0, py::arg("boundary") = "free",
      py::arg("max_sites") = kDefaultMaxSites);
  m.def(
      "pressure_extrapolate",
      [](const Interaction& phi, const std::vector<int>& lengths, double beta, const std::string& boundary) {
        const auto fit = pressure_extrapolate(phi, lengths, beta, parse_boundary(boundary));
        py::dict d;
        d["estimate"] = fit.estimate;
        d["slope"] = fit.slope;
        d["pressures"] = fit.pressures;
        d["max_residual"] = fit.max_residual;
        return d;
      },
      py::arg("interaction"), py::arg("lengths"), py::arg("beta") = 1.0, py::arg("boundary") = "free");

  m.def(
      "gibbs",
      [](const Matrix& h, double beta) {
        const auto g = gibbs(h, beta);
        return py::make_tuple(g.state.matrix(), g.log_partition);
      },
      py::arg("h"), py::arg("beta") = 1.0, "Returns (density matrix, log Z).");
  m.def(
      "entropy", [](const Matrix& rho) { return entropy(DensityMatrix(rho)); }, py::arg("rho"));
  m.def(
      "relative_entropy",
      [](const Matrix& nu, const Matrix& omega) {
        const auto s = relative_entropy(DensityMatrix(nu), DensityMatrix(omega));
        return s.finite ? s.value : std::numeric_limits<double>::infinity();
      },
      py::arg("nu"), py::arg("omega"));
  m.def(
      "trace_distance",
      [](const Matrix& nu, const Matrix& omega) { return trace_distance(DensityMatrix(nu), DensityMatrix(omega)); },
      py::arg("nu"), py::arg("omega"));
  m.def(
      "weak_gibbs_residual",
      [](const Matrix& nu, const Interaction& phi, int sites, double beta) {
        return weak_gibbs_residual(DensityMatrix(nu), phi, Volume::chain(sites), beta);
      },
      py::arg("nu"), py::arg("interaction"), py::arg("sites"), py::arg("beta") = 1.0);
  m.def(
      "variational_scan",
      [](const Interaction& phi, int sites, double beta) {
        const auto r = variational_scan(phi, Volume::chain(sites), beta);
        py::dict d;
        d["value"] = r.value;
        d["pressure"] = r.pressure;
        d["gap"] = r.gap;
        d["bloch"] = std::vector<double>(r.bloch.begin(), r.bloch.end());
        return d;
      },
      py::arg("interaction"), py::arg("sites"), py::arg("beta") = 1.0);

  m.def("model_names", &models::names);
  m.def(
      "propagate",
      [](const std::string& model, double T, double sigma, double tau, const std::string& scheme,
         std::optional<int> steps, double steps_factor, bool adaptive, double tolerance) {
        const auto cfg = integrator(scheme, steps, steps_factor, adaptive, tolerance);
        return propagate(models::by_name(model).generator(), T, sigma, tau, cfg).unitary;
      },
      py::arg("model"), py::arg("T"), py::arg("sigma") = 0.0, py::arg("tau") = 1.0, py::arg("scheme") = "cf4",
      py::arg("steps") = py::none(), py::arg("steps_factor") = 10.0, py::arg("adaptive") = false,
      py::arg("tolerance") = 1e-10, "Schrodinger propagator of a builtin matrix model.");
  m.def(
      "trotter_product",
      [](const std::string& model, double T, double sigma, double tau, int N) {
        return trotter_product(models::by_name(model).generator(), T, sigma, tau, N);
      },
      py::arg("model"), py::arg("T"), py::arg("sigma"), py::arg("tau"), py::arg("N"));
  m.def(
      "kato_scan",
      [](const std::string& model, const std::vector<double>& T, int tau_points, bool adaptive) {
        IntegratorConfig cfg;
        cfg.adaptive = adaptive;
        const auto r = kato_scan(models::by_name(model), T, uniform_grid(tau_points), cfg);
        std::vector<double> d;
        for (const auto& row : r.rows) d.push_back(row.d);
        py::dict out;
        out["T"] = T;
        out["d"] = d;
        out["slope"] = r.slope;
        out["min_gap"] = r.min_gap;
        return out;
      },
      py::arg("model"), py::arg("T"), py::arg("tau_points") = 101, py::arg("adaptive") = true);
  m.def(
      "many_body_scan",
      [](const std::string& path, int sites, const std::vector<double>& T, int tau_points, double beta,
         double steps_factor) {
        ManyBodyOptions opt;
        opt.beta = beta;
        opt.cfg.steps_factor = steps_factor;
        const auto rows = many_body_scan(builtin_path(path), Volume::chain(sites), T, uniform_grid(tau_points), opt);
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["T"] = r.T;
          d["tau"] = r.tau;
          d["relative_entropy_per_site"] = r.relative_entropy_per_site;
          d["trace_distance"] = r.trace_distance;
          d["entropy_per_site"] = r.entropy_per_site;
          d["entropy_drift"] = r.entropy_drift;
          d["pinsker_ok"] = r.pinsker_ok;
          out.append(d);
        }
        return out;
      },
      py::arg("path"), py::arg("sites"), py::arg("T"), py::arg("tau_points") = 21, py::arg("beta") = 1.0,
      py::arg("steps_factor") = 10.0, "Path names: transverse-field, commuting, ising-to-transverse.");

  m.def("list_experiments", &list_experiments);
  m.def(
      "run",
      [](const std::filesystem::path& config, std::optional<std::filesystem::path> output) {
        const auto r = run_config(config, output);
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["status"] = r.status;
        d["message"] = r.message;
        d["outputs"] = r.outputs;
        return d;
      },
      py::arg("config"), py::arg("output") = py::none(), "Runs an experiment config; returns its outcome.");
  m.def(
      "verify",
      [](bool fast, double tolerance_scale) {
        AcceptanceOptions opt;
        opt.fast = fast;
        opt.tolerance_scale = tolerance_scale;
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_acceptance(opt);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("fast") = true, py::arg("tolerance_scale") = 1.0);
}
