#include "adialab/acceptance.hpp"
#include "adialab/experiments.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

int verify(bool fast, double tolerance_scale, const fs::path& output, int threads) {
  adialab::AcceptanceOptions opt;
  opt.fast = fast;
  opt.tolerance_scale = tolerance_scale;
  opt.threads = threads;
  opt.on_result = [](const adialab::CriterionResult& r) { std::cout << adialab::format_result(r) << std::endl; };
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json entry = {{"tool_version", adialab::kToolVersion},
                          {"command", "verify"},
                          {"fast", fast},
                          {"tolerance_scale", tolerance_scale}};
  int code = adialab::kExitOk;
  try {
    const auto results = adialab::run_acceptance(opt);
    nlohmann::json rows = nlohmann::json::array();
    int failed = 0;
    for (const auto& r : results) {
      failed += r.pass ? 0 : 1;
      rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
    }
    entry["criteria"] = rows;
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    code = failed == 0 ? adialab::kExitOk : adialab::kExitNumerical;
    entry["status"] = failed == 0 ? "ok" : "numerical-error";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = adialab::kExitNumerical;
    entry["status"] = "numerical-error";
    entry["message"] = e.what();
  }
  entry["exit_code"] = code;
  entry["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    adialab::append_manifest(output, entry.dump());
  } catch (const std::exception& e) {
    std::cerr << "warning: manifest not written: " << e.what() << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume adiabatic and thermodynamic experiments"};
  app.set_version_flag("--version", std::string(adialab::kToolVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config;
  std::string run_output;
  run->add_option("config", config, "Experiment config (YAML)")->required();
  run->add_option("-o,--output", run_output, "Output directory (overrides the config)");

  app.add_subcommand("list-experiments", "List experiment kinds and their config keys");

  auto* ver = app.add_subcommand("verify", "Run the acceptance criteria and print a pass/fail table");
  bool fast = false;
  double scale = 1.0;
  std::string verify_output = "results/verify";
  int threads = 0;
  ver->add_flag("--fast", fast, "Smaller many-body scan");
  ver->add_option("--tolerance-scale", scale, "Multiply every tolerance (negative control)")
      ->check(CLI::PositiveNumber);
  ver->add_option("-o,--output", verify_output, "Directory for the manifest entry");
  ver->add_option("-j,--threads", threads, "Worker threads (0: ADIALAB_THREADS or hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : adialab::kExitValidation;
  }

  if (app.got_subcommand("list-experiments")) {
    std::cout << adialab::list_experiments();
    return adialab::kExitOk;
  }
  if (app.got_subcommand("verify")) return verify(fast, scale, verify_output, threads);

  std::optional<fs::path> override_dir;
  if (!run_output.empty()) override_dir = run_output;
  const auto outcome = adialab::run_config(config, override_dir, &std::cerr);
  return outcome.exit_code;
}
