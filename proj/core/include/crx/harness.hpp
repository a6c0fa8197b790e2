#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crx/experiment_config.hpp"
#include "crx/td3.hpp"

namespace crx::harness {

/// Held-out evaluation scenario seeds for a run seed; shared by every
/// strategy so comparisons see identical channels.
std::vector<std::uint64_t> evaluation_seeds(const ExperimentConfig& cfg, std::uint64_t seed);

/// A ready-to-evaluate strategy: a trained agent or the random-beamforming
/// sampler.
struct PreparedStrategy {
  Strategy strategy = Strategy::CrMaTd3;
  std::uint64_t seed = 0;
  std::optional<td3::Agent> agent;
  std::vector<td3::EpisodeLog> training_log;
};

/// Trains a learned strategy at cfg.train_snr_db (no-op for FPA_RBF).
/// `warm_start` copies networks from a previous agent before training.
PreparedStrategy prepare_strategy(Strategy s, const ExperimentConfig& cfg, std::uint64_t seed,
                                  const td3::Agent* warm_start = nullptr,
                                  bool record_wall_time = false);

struct EvalRecord {
  Strategy strategy = Strategy::CrMaTd3;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  double region_wavelengths = 0.0;
  double mean_crb_db = 0.0;
  std::vector<double> sinr_db;  // per-user mean
  double min_sinr_db = 0.0;
  double feasibility_rate = 0.0;
  double mean_reward = 0.0;

  bool operator==(const EvalRecord&) const = default;
};

/// Evaluates on the run's held-out scenarios at the given SNR with the true
/// coupling matrix.
EvalRecord evaluate_strategy(const PreparedStrategy& prepared, const ExperimentConfig& cfg,
                             double snr_db);

/// Random beamforming on the half-wavelength ULA: i.i.d. CN(0, 1) precoder
/// entries rescaled to the power budget, CRB averaged over cfg.rbf_draws
/// draws per scenario.
EvalRecord evaluate_random_beamforming(const ExperimentConfig& cfg, std::uint64_t seed,
                                       double snr_db);

/// prepare_strategy + evaluate_strategy at cfg.train_snr_db.
EvalRecord run_strategy(Strategy s, const ExperimentConfig& cfg, std::uint64_t seed);

/// Uniform-random policy baseline on the same held-out scenarios.
td3::EvalSummary random_policy_baseline(const ExperimentConfig& cfg, Strategy s,
                                        std::uint64_t seed);

struct SweepRow {
  double x = 0.0;  // SNR in dB or region in wavelengths
  Strategy strategy = Strategy::CrMaTd3;
  std::uint64_t seed = 0;
  double mean_crb_db = 0.0;
  double min_sinr_db = 0.0;
  double feasibility_rate = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::string x_name;  // "snr_db" or "region_lambda"
  std::vector<SweepRow> rows;
  std::vector<td3::EpisodeLog> first_training_log;

  /// Mean of mean_crb_db over seeds, per (x, strategy), in grid order.
  std::vector<SweepRow> averaged() const;
};

/// Trains each learned strategy once per seed at the training SNR and
/// evaluates it across the SNR grid (retrains per point when
/// cfg.retrain_per_snr). N0 = P_sum / SNR for users and sensing alike.
SweepResult snr_sweep(const ExperimentConfig& cfg);

/// Trains a fresh agent per region point (or warm-starts from the previous
/// point when cfg.region_fine_tune) and evaluates at the training SNR.
SweepResult region_sweep(const ExperimentConfig& cfg);

/// Worker count: CRX_ISAC_THREADS when set, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Exceptions
/// are rethrown on the calling thread (first failing index wins).
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace crx::harness
