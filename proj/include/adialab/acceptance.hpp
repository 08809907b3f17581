#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace adialab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // wall-clock limit in seconds
};

struct AcceptanceOptions {
  /// Smaller many-body scan (L = 6, T in {1, 10}); everything else unchanged.
  bool fast = false;
  /// Multiplies every absolute tolerance; values far below 1 are a negative control.
  double tolerance_scale = 1.0;
  std::uint64_t seed = 20240611;
  int threads = 0;
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

/// The twelve acceptance criteria, in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line per criterion: PASS/FAIL, id, name, detail, time against budget.
std::string format_result(const CriterionResult& r);

}  // namespace adialab
