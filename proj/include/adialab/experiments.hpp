#pragma once

#include "adialab/dynamics.hpp"
#include "adialab/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace adialab {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitResource = 4,
};

struct VolumeSpec {
  std::optional<int> sites;
  std::vector<int> lengths;
  Boundary boundary = Boundary::free;
  int max_sites = kDefaultMaxSites;
};

enum class InitialState { pure_up, maximally_mixed, gibbs };

/// Parsed experiment config. Input file references are resolved against the
/// config file's directory; `output` is taken relative to the working directory.
struct ExperimentConfig {
  std::string experiment;
  std::filesystem::path source;
  std::filesystem::path output;
  std::uint64_t seed = 0;
  std::optional<std::string> model;                 // builtin name
  std::optional<std::filesystem::path> model_file;  // matrix-model file
  std::optional<std::filesystem::path> interaction;
  std::optional<std::filesystem::path> path;
  VolumeSpec volume;
  bool has_volume = false;
  double beta = 1.0;
  std::vector<double> T;
  std::vector<double> tau;
  IntegratorConfig integrator;
  std::optional<double> tolerance;
  std::vector<double> horizons;
  double s = 0.0;
  double t = 1.0;
  double fd_step = 1e-4;
  int grid_points = 9;
  int threads = 0;
  InitialState initial = InitialState::pure_up;
  std::optional<std::filesystem::path> initial_interaction;
  double initial_beta = 1.0;
  std::optional<double> endpoint_T;
};

struct ExperimentInfo {
  std::string kind;
  std::string required;
  std::string optional;
  std::string output;
};

const std::vector<ExperimentInfo>& experiment_table();
std::string list_experiments();

/// Reads and validates a config; ValidationError on any schema problem.
ExperimentConfig parse_config(const std::filesystem::path& file);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status;   // ok | validation-error | numerical-error | resource-limit | internal-error
  std::string message;
  std::vector<std::filesystem::path> outputs;
  std::filesystem::path manifest;
};

/// Runs one experiment, writes its CSV and appends one manifest entry, also on
/// failure. `output_override` replaces the config's output directory.
RunOutcome run_config(const std::filesystem::path& config,
                      const std::optional<std::filesystem::path>& output_override = std::nullopt,
                      std::ostream* log = nullptr);

/// Holds <dir>/.adialab.lock for the lifetime of the object.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path file_;
};

/// Appends one JSON object (serialized text) as a line to <dir>/manifest.jsonl.
std::filesystem::path append_manifest(const std::filesystem::path& dir, const std::string& json_line);

/// Decimal text with 17 significant digits (round-trips doubles).
std::string format_number(double v);

}  // namespace adialab
