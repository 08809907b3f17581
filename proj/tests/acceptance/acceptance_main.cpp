#include "adialab/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  adialab::AcceptanceOptions opt;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--fast") opt.fast = true;
    else if (arg == "--tolerance-scale" && k + 1 < argc) opt.tolerance_scale = std::strtod(argv[++k], nullptr);
    else {
      std::cerr << "usage: acceptance [--fast] [--tolerance-scale x]\n";
      return 2;
    }
  }
  opt.on_result = [](const adialab::CriterionResult& r) { std::cout << adialab::format_result(r) << std::endl; };
  int failed = 0;
  for (const auto& r : adialab::run_acceptance(opt)) failed += r.pass ? 0 : 1;
  std::cout << (failed == 0 ? "acceptance: all 12 criteria passed" : "acceptance: " + std::to_string(failed) + " failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
