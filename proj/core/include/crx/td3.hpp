#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "crx/checkpoint.hpp"
#include "crx/env.hpp"
#include "crx/nn.hpp"

namespace crx::td3 {

/// Exploration noise schedule: scale(zeta) = sigma0 * exp(-decay * zeta) + sigma_min.
struct OUConfig {
  double sigma0 = 0.1;
  double sigma_min = 0.005;
  double decay = 0.006;
  double theta = 0.15;  // mean reversion
  double dt = 1.0;
};

struct TD3Config {
  double discount = 0.98;
  double tau = 0.003;
  double smoothing_variance = 0.15;
  double smoothing_clip = 0.01;
  int policy_delay = 2;  // critic updates per actor update
  OUConfig ou;
  int warmup_episodes = 30;
  int batch_size = 128;
  int buffer_capacity = 100000;
  std::vector<int> actor_hidden{256, 256};
  std::vector<int> critic_hidden{256, 256};
  double actor_lr = 1e-4;
  double critic_lr = 3e-4;
  /// Weight of mean ||logits||^2 in the actor loss; keeps the terminal
  /// softmax and tanh units out of saturation.
  double logit_penalty = 1e-3;
  /// Half-width of the uniform init of the actor's terminal layer.
  double actor_head_init = 3e-3;
  /// Critics see each phase fraction a as (cos pi a, sin pi a).
  bool critic_phase_features = true;
  /// Standardize rewards with statistics of the buffer contents at the
  /// first gradient update.
  bool normalize_rewards = true;
  int eval_interval = 10;
  int final_eval_window = 20;
  int eval_scenarios = 5;

  void validate() const;
};

void to_json(nlohmann::json& j, const OUConfig& c);
void from_json(const nlohmann::json& j, OUConfig& c);
void to_json(nlohmann::json& j, const TD3Config& c);
void from_json(const nlohmann::json& j, TD3Config& c);

struct Transition {
  VectorXd state;
  VectorXd action;
  double reward = 0.0;
  VectorXd next_state;
  bool done = false;
};

/// Column-per-sample batch.
struct Batch {
  MatrixXd states;
  MatrixXd actions;
  VectorXd rewards;
  MatrixXd next_states;
  VectorXd done;  // 1.0 for terminal transitions

  int size() const { return static_cast<int>(rewards.size()); }
};

/// Fixed-capacity ring buffer; overwrites the oldest record when full.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int state_dim, int action_dim);

  void push(const Transition& t);
  int size() const { return size_; }
  int capacity() const { return capacity_; }

  /// Indices drawn uniformly with replacement over the filled region.
  std::vector<int> sample_indices(int n, Rng& rng) const;
  Batch gather(const std::vector<int>& indices) const;
  Batch sample(int n, Rng& rng) const { return gather(sample_indices(n, rng)); }

  Transition at(int index) const;
  const VectorXd& rewards() const { return rewards_; }

 private:
  int capacity_;
  int size_ = 0;
  int cursor_ = 0;
  MatrixXd states_, actions_, next_states_;
  VectorXd rewards_, done_;
};

/// Ornstein-Uhlenbeck process in logit space with an episode-indexed scale.
class OUProcess {
 public:
  OUProcess(int dim, OUConfig cfg);

  void reset();
  /// Sets the scale for episode zeta.
  void set_episode(int zeta);
  double sigma() const { return sigma_; }
  /// x <- x - theta x dt + sigma sqrt(dt) N(0, I); returns the new x.
  const VectorXd& sample(Rng& rng);
  const VectorXd& state() const { return x_; }

  static double scale(const OUConfig& cfg, int zeta);

 private:
  OUConfig cfg_;
  VectorXd x_;
  double sigma_;
};

/// Fixed map from activated actions to critic input features. With phase
/// features on, the phase block becomes [cos(pi a); sin(pi a)], the form in
/// which phases enter the precoder; power and displacement pass through.
struct ActionFeatures {
  env::ActionLayout layout;
  bool phase_features = true;

  int dim() const;
  MatrixXd map(const MatrixXd& actions) const;
  /// Chain rule: dL/d(actions) from dL/d(features).
  MatrixXd backward(const MatrixXd& actions, const MatrixXd& d_features) const;
};

struct Networks {
  nn::DenseNetwork actor, actor_target;
  nn::DenseNetwork critic1, critic2, critic1_target, critic2_target;
  nn::AdamState actor_opt, critic1_opt, critic2_opt;
};

/// pi'(s') with clipped Gaussian noise added to the logits before the
/// terminal activations.
MatrixXd smooth_target_action(const MatrixXd& next_states, const nn::DenseNetwork& target_actor,
                              const TD3Config& cfg, Rng& rng);

/// r + discount * (1 - done) * min(Q1'(s', a~'), Q2'(s', a~')).
VectorXd bellman_targets(const Batch& batch, const MatrixXd& smoothed_actions,
                         const Networks& nets, const ActionFeatures& features, double discount,
                         double reward_shift = 0.0, double reward_scale = 1.0);

struct CriticLosses {
  double q1 = 0.0;
  double q2 = 0.0;
};

class Agent {
 public:
  Agent(int state_dim, env::ActionLayout layout, TD3Config cfg, std::uint64_t seed);

  const TD3Config& config() const { return cfg_; }
  const env::ActionLayout& layout() const { return layout_; }
  ActionFeatures features() const { return {layout_, cfg_.critic_phase_features}; }
  Networks& networks() { return nets_; }
  const Networks& networks() const { return nets_; }
  Rng& rng() { return rng_; }

  /// Greedy activated action.
  VectorXd act(const VectorXd& state) const;
  /// Actor logits plus exploration noise, then terminal activations.
  VectorXd act_with_noise(const VectorXd& state, const VectorXd& logit_noise) const;

  CriticLosses critic_update(const Batch& batch);
  /// Ascends mean Q1(s, pi(s)); returns that mean before the step.
  double actor_update(const Batch& batch);
  void update_targets();

  /// One critic update; every policy_delay-th call also runs the actor
  /// update and soft target updates. Returns true when the actor moved.
  bool train_step(const Batch& batch);
  std::int64_t critic_updates() const { return critic_updates_; }

  void set_reward_normalization(double shift, double scale);
  double reward_shift() const { return reward_shift_; }
  double reward_scale() const { return reward_scale_; }

  nn::Checkpoint to_checkpoint() const;
  static Agent from_checkpoint(const nn::Checkpoint& ckpt);

 private:
  Agent() = default;

  int state_dim_ = 0;
  env::ActionLayout layout_;
  TD3Config cfg_;
  Networks nets_;
  Rng rng_;
  std::int64_t critic_updates_ = 0;
  double reward_shift_ = 0.0;
  double reward_scale_ = 1.0;
};

/// Uniform-random activated action: tanh outputs U(-1, 1), power fractions
/// uniform on the simplex, displacement fractions uniform on
/// {f >= 0, sum f <= 1}.
VectorXd uniform_random_action(const env::ActionLayout& layout, Rng& rng);

struct EvalSummary {
  double mean_reward = 0.0;
  double mean_crb = 0.0;  // linear, true coupling
  double crb_db = 0.0;    // 10 log10(mean_crb)
  double mean_min_sinr_db = 0.0;
  double feasibility_rate = 0.0;
  std::vector<double> mean_sinr_db;  // per user
};

using Policy = std::function<VectorXd(const VectorXd& state)>;

/// Rolls a policy out for one episode on each scenario seed and averages
/// step rewards (agent's view) and true-coupling CRB.
EvalSummary evaluate_policy(const Policy& policy, const env::EnvConfig& env_cfg,
                            const std::vector<std::uint64_t>& scenario_seeds);

struct EpisodeLog {
  int episode = 0;
  double mean_step_reward = 0.0;
  double episode_reward = 0.0;
  std::optional<EvalSummary> eval;
  double sigma_ou = 0.0;
  double wall_time_s = 0.0;
};

struct TrainOptions {
  int episodes = 300;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> eval_seeds;
  bool record_wall_time = false;
  /// Copy networks and optimizer state from this agent before training.
  const Agent* warm_start = nullptr;
};

struct TrainResult {
  Agent agent;
  std::vector<EpisodeLog> log;
};

/// Warm-up episodes act uniformly at random and never update. Afterwards
/// one critic update per step and one actor and target update per
/// policy_delay critic updates. Throws DivergenceError naming the episode
/// and step on NaN.
TrainResult train(const env::EnvConfig& env_cfg, const TD3Config& cfg, const TrainOptions& opts);

/// CSV columns: episode,mean_step_reward,episode_reward,eval_mean_reward,
/// eval_crb_db,eval_min_sinr_db,sigma_ou,wall_time_s.
void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log);

}  // namespace crx::td3
