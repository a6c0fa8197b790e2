// Acceptance run: prints one CRITERION line per criterion and exits nonzero
// if any fails. Criteria 8 to 11 train desk-scale agents and take minutes.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "crx/verify.hpp"

int main(int argc, char** argv) {
  std::filesystem::path workdir = std::filesystem::temp_directory_path() / "crx_acceptance";
  std::uint64_t seed = 0;
  bool numerical_only = false;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else if (arg == "--seed" && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--numerical-only") {
      numerical_only = true;
    } else {
      std::cerr << "usage: crx_acceptance [--workdir DIR] [--seed N] [--numerical-only]\n";
      return 2;
    }
  }

  using crx::verify::CriterionResult;
  int failed = 0;
  auto report = [&](const CriterionResult& r) {
    std::cout << crx::verify::format(r) << std::endl;
    failed += !r.passed;
  };

  try {
    for (const auto& r : crx::verify::run_numerical(seed)) report(r);
    if (!numerical_only) {
      crx::verify::run_learning(crx::harness::ExperimentConfig::desk(), workdir, report);
    }
  } catch (const std::exception& e) {
    std::cout << "ERROR " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAIL")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
