#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "crx/harness.hpp"

namespace crx::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// "CRITERION <id> <PASS|FAIL> <name>: <detail> (<seconds> s)".
std::string format(const CriterionResult& r);

// Numerical checks. Each draws its instances from `seed`.
CriterionResult crb_fim_equivalence(std::uint64_t seed, int instances = 100);
CriterionResult likelihood_fim(std::uint64_t seed, int instances = 20);
CriterionResult derivative_oracles(std::uint64_t seed, int instances = 100);
CriterionResult sinr_monte_carlo(std::uint64_t seed, int instances = 10, int symbols = 100000);
CriterionResult feasibility(std::uint64_t seed, int actions = 10000);
CriterionResult snr_linearity(std::uint64_t seed);
CriterionResult network_gradients(std::uint64_t seed);

/// Trained strategies keyed by (strategy, seed), so checks that need the
/// same agent train it once.
class StrategyCache {
 public:
  explicit StrategyCache(harness::ExperimentConfig cfg) : cfg_(std::move(cfg)) {}
  const harness::ExperimentConfig& config() const { return cfg_; }
  const harness::PreparedStrategy& get(harness::Strategy s, std::uint64_t seed);

 private:
  harness::ExperimentConfig cfg_;
  std::map<std::pair<harness::Strategy, std::uint64_t>, harness::PreparedStrategy> cache_;
};

// Learning checks on the cache's configuration.
CriterionResult learning_signal(StrategyCache& cache, const std::vector<std::uint64_t>& seeds);
CriterionResult strategy_ordering(StrategyCache& cache, const std::vector<std::uint64_t>& seeds,
                                  int required);
CriterionResult region_monotonicity(const harness::ExperimentConfig& cfg,
                                    const std::vector<std::uint64_t>& seeds);

/// Runs training and an SNR sweep twice from `cfg` and compares the CSV
/// bytes. Files are written under `workdir`.
CriterionResult determinism(const harness::ExperimentConfig& cfg, std::uint64_t seed,
                            const std::filesystem::path& workdir);

/// Criteria 1 to 7.
std::vector<CriterionResult> run_numerical(std::uint64_t seed);

/// Criteria 8 to 11 on `cfg`: learning signal on seeds 0..2, ordering on
/// seeds 0..9 (8 required), region trend on seeds 0..2 and determinism on
/// seed 0 under `workdir`. `report` is called as each result arrives.
std::vector<CriterionResult> run_learning(const harness::ExperimentConfig& cfg,
                                          const std::filesystem::path& workdir,
                                          const std::function<void(const CriterionResult&)>& report);

}  // namespace crx::verify
