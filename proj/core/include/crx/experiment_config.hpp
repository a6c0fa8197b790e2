#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crx/channel.hpp"
#include "crx/env.hpp"
#include "crx/td3.hpp"

namespace crx::harness {

enum class Strategy { FpaRbf, FpaTd3, MaTd3, CrMaTd3 };

/// "FPA_RBF", "FPA_TD3", "MA_TD3", "CR_MA_TD3".
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& tag);
const std::vector<Strategy>& all_strategies();
bool is_learned(Strategy s);

/// Everything needed to reproduce a run. Serialized with these exact member
/// names; unknown keys in a config file are rejected.
struct ExperimentConfig {
  std::string profile = "paper";

  // System model.
  int n_elements = 16;
  int n_users = 4;
  int n_paths = 3;
  double carrier_ghz = 30.0;
  double p_min_m = 0.0;
  double p_max_m = 0.15;
  double d0_wavelengths = 0.5;
  int estimation_samples = 128;
  double alpha_s = 0.4;
  double theta_s_deg = 60.0;
  double p_sum_dbm = 10.0;
  double clutter_power_w = 0.0;
  channel::CrosstalkParams crosstalk;

  // Problem and reward.
  double gamma_db = 5.0;
  double penalty_factor = 0.1;
  double train_snr_db = 10.0;
  bool learn_sensing_precoder = true;
  bool observe_target_angle = false;

  // TD3.
  double discount = 0.98;
  double tau = 0.003;
  double smoothing_variance = 0.15;
  double smoothing_clip = 0.01;
  int policy_delay = 2;
  double ou_sigma0 = 0.1;
  double ou_sigma_min = 0.005;
  double ou_decay = 0.006;
  double ou_theta = 0.15;
  double ou_dt = 1.0;
  int warmup_episodes = 30;
  int episodes = 500;
  int steps_per_episode = 100;
  int batch_size = 128;
  int buffer_capacity = 100000;
  std::vector<int> actor_hidden{256, 256};
  std::vector<int> critic_hidden{256, 256};
  double actor_lr = 1e-4;
  double critic_lr = 3e-4;
  double logit_penalty = 1e-3;
  double actor_head_init = 3e-3;
  bool critic_phase_features = true;
  bool normalize_rewards = true;
  int eval_interval = 10;
  int final_eval_window = 20;

  // Experiment protocol.
  std::string strategy = "CR_MA_TD3";
  std::vector<std::uint64_t> seeds{0};
  int eval_scenarios = 5;
  int rbf_draws = 10000;
  std::vector<double> snr_grid_db{0.0, 4.0, 8.0, 12.0, 16.0, 20.0};
  std::vector<std::string> snr_strategies{"FPA_RBF", "FPA_TD3", "MA_TD3", "CR_MA_TD3"};
  bool retrain_per_snr = false;
  std::vector<double> region_grid_wavelengths{7.5, 10.0, 15.0, 20.0};
  std::vector<std::string> region_strategies{"CR_MA_TD3"};
  bool region_fine_tune = false;

  double wavelength() const;
  double p_sum_w() const;
  double noise_power_at(double snr_db) const { return p_sum_w() / db_to_linear(snr_db); }

  /// Throws ConfigError for inconsistent settings (region too small for
  /// N and d0, empty grids, unknown strategies, ...).
  void validate() const;

  /// Environment for a strategy at a given SNR (and optionally a region
  /// upper bound in meters).
  env::EnvConfig env_config(Strategy s, double snr_db) const;
  td3::TD3Config td3_config() const;

  /// Paper-scale defaults (N = 16, K = 4, L_p = 3).
  static ExperimentConfig paper();
  /// Laptop-scale defaults (N = 8, K = 2, L_p = 2, 300 episodes).
  static ExperimentConfig desk();
  static ExperimentConfig for_profile(const std::string& profile);
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Starts from the profile named in j (default "paper") and applies every
/// present key. Throws ConfigError on unknown keys.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::string& path);

/// Keys whose values differ from the profile defaults.
nlohmann::json overrides(const ExperimentConfig& c);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// Published simulation parameter symbol -> config key and default.
struct TableEntry {
  std::string symbol;
  std::string key;
  double value;
};
const std::vector<TableEntry>& table_one();

}  // namespace crx::harness
