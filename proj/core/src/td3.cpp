#include "crx/td3.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "crx/errors.hpp"

namespace crx::td3 {

void TD3Config::validate() const {
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("td3: discount must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("td3: tau must lie in (0, 1]");
  if (!(smoothing_variance >= 0.0)) throw ConfigError("td3: smoothing variance must be >= 0");
  if (!(smoothing_clip >= 0.0)) throw ConfigError("td3: smoothing clip must be >= 0");
  if (policy_delay < 1) throw ConfigError("td3: policy_delay must be at least 1");
  if (warmup_episodes < 0) throw ConfigError("td3: warmup_episodes must be >= 0");
  if (batch_size < 1) throw ConfigError("td3: batch_size must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("td3: buffer smaller than a batch");
  if (!(actor_lr > 0.0 && critic_lr > 0.0)) throw ConfigError("td3: learning rates must be > 0");
  if (!(logit_penalty >= 0.0)) throw ConfigError("td3: logit_penalty must be >= 0");
  if (!(actor_head_init > 0.0)) throw ConfigError("td3: actor_head_init must be > 0");
  if (eval_interval < 1 || final_eval_window < 0 || eval_scenarios < 1) {
    throw ConfigError("td3: invalid evaluation schedule");
  }
  if (!(ou.sigma0 >= 0.0 && ou.sigma_min >= 0.0 && ou.decay >= 0.0 && ou.theta >= 0.0 &&
        ou.dt > 0.0)) {
    throw ConfigError("td3: invalid OU parameters");
  }
}

void to_json(nlohmann::json& j, const OUConfig& c) {
  j = {{"sigma0", c.sigma0}, {"sigma_min", c.sigma_min}, {"decay", c.decay},
       {"theta", c.theta},   {"dt", c.dt}};
}

void from_json(const nlohmann::json& j, OUConfig& c) {
  OUConfig d;
  c.sigma0 = j.value("sigma0", d.sigma0);
  c.sigma_min = j.value("sigma_min", d.sigma_min);
  c.decay = j.value("decay", d.decay);
  c.theta = j.value("theta", d.theta);
  c.dt = j.value("dt", d.dt);
}

void to_json(nlohmann::json& j, const TD3Config& c) {
  j = {{"discount", c.discount},
       {"tau", c.tau},
       {"smoothing_variance", c.smoothing_variance},
       {"smoothing_clip", c.smoothing_clip},
       {"policy_delay", c.policy_delay},
       {"ou", c.ou},
       {"warmup_episodes", c.warmup_episodes},
       {"batch_size", c.batch_size},
       {"buffer_capacity", c.buffer_capacity},
       {"actor_hidden", c.actor_hidden},
       {"critic_hidden", c.critic_hidden},
       {"actor_lr", c.actor_lr},
       {"critic_lr", c.critic_lr},
       {"logit_penalty", c.logit_penalty},
       {"actor_head_init", c.actor_head_init},
       {"critic_phase_features", c.critic_phase_features},
       {"normalize_rewards", c.normalize_rewards},
       {"eval_interval", c.eval_interval},
       {"final_eval_window", c.final_eval_window},
       {"eval_scenarios", c.eval_scenarios}};
}

void from_json(const nlohmann::json& j, TD3Config& c) {
  TD3Config d;
  c.discount = j.value("discount", d.discount);
  c.tau = j.value("tau", d.tau);
  c.smoothing_variance = j.value("smoothing_variance", d.smoothing_variance);
  c.smoothing_clip = j.value("smoothing_clip", d.smoothing_clip);
  c.policy_delay = j.value("policy_delay", d.policy_delay);
  c.ou = j.value("ou", d.ou);
  c.warmup_episodes = j.value("warmup_episodes", d.warmup_episodes);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.buffer_capacity = j.value("buffer_capacity", d.buffer_capacity);
  c.actor_hidden = j.value("actor_hidden", d.actor_hidden);
  c.critic_hidden = j.value("critic_hidden", d.critic_hidden);
  c.actor_lr = j.value("actor_lr", d.actor_lr);
  c.critic_lr = j.value("critic_lr", d.critic_lr);
  c.logit_penalty = j.value("logit_penalty", d.logit_penalty);
  c.actor_head_init = j.value("actor_head_init", d.actor_head_init);
  c.critic_phase_features = j.value("critic_phase_features", d.critic_phase_features);
  c.normalize_rewards = j.value("normalize_rewards", d.normalize_rewards);
  c.eval_interval = j.value("eval_interval", d.eval_interval);
  c.final_eval_window = j.value("final_eval_window", d.final_eval_window);
  c.eval_scenarios = j.value("eval_scenarios", d.eval_scenarios);
}

// ---------------------------------------------------------------------------
// Replay buffer

ReplayBuffer::ReplayBuffer(int capacity, int state_dim, int action_dim)
    : capacity_(capacity),
      states_(state_dim, capacity),
      actions_(action_dim, capacity),
      next_states_(state_dim, capacity),
      rewards_(VectorXd::Zero(capacity)),
      done_(VectorXd::Zero(capacity)) {
  if (capacity < 1) throw ConfigError("replay: capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (t.state.size() != states_.rows() || t.next_state.size() != states_.rows() ||
      t.action.size() != actions_.rows()) {
    throw ConfigError("replay: transition dimensions do not match the buffer");
  }
  states_.col(cursor_) = t.state;
  actions_.col(cursor_) = t.action;
  next_states_.col(cursor_) = t.next_state;
  rewards_[cursor_] = t.reward;
  done_[cursor_] = t.done ? 1.0 : 0.0;
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

std::vector<int> ReplayBuffer::sample_indices(int n, Rng& rng) const {
  if (size_ == 0) throw ProtocolError("replay: sampling from an empty buffer");
  std::uniform_int_distribution<int> pick(0, size_ - 1);
  std::vector<int> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

Batch ReplayBuffer::gather(const std::vector<int>& indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.states.resize(states_.rows(), n);
  b.actions.resize(actions_.rows(), n);
  b.next_states.resize(next_states_.rows(), n);
  b.rewards.resize(n);
  b.done.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    int i = indices[c];
    b.states.col(c) = states_.col(i);
    b.actions.col(c) = actions_.col(i);
    b.next_states.col(c) = next_states_.col(i);
    b.rewards[c] = rewards_[i];
    b.done[c] = done_[i];
  }
  return b;
}

Transition ReplayBuffer::at(int i) const {
  if (i < 0 || i >= size_) throw ProtocolError("replay: index out of range");
  return {states_.col(i), actions_.col(i), rewards_[i], next_states_.col(i), done_[i] > 0.5};
}

// ---------------------------------------------------------------------------
// OU noise

OUProcess::OUProcess(int dim, OUConfig cfg)
    : cfg_(cfg), x_(VectorXd::Zero(dim)), sigma_(scale(cfg, 0)) {}

void OUProcess::reset() { x_.setZero(); }

void OUProcess::set_episode(int zeta) { sigma_ = scale(cfg_, zeta); }

double OUProcess::scale(const OUConfig& cfg, int zeta) {
  return cfg.sigma0 * std::exp(-cfg.decay * zeta) + cfg.sigma_min;
}

const VectorXd& OUProcess::sample(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double diffusion = sigma_ * std::sqrt(cfg_.dt);
  for (Eigen::Index i = 0; i < x_.size(); ++i) {
    x_[i] += -cfg_.theta * x_[i] * cfg_.dt + diffusion * normal(rng);
  }
  return x_;
}

// ---------------------------------------------------------------------------
// Updates

namespace {

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom) {
  MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DivergenceError(std::string("td3: non-finite ") + what);
}

}  // namespace

MatrixXd smooth_target_action(const MatrixXd& next_states, const nn::DenseNetwork& target_actor,
                              const TD3Config& cfg, Rng& rng) {
  MatrixXd z = target_actor.logits(next_states);
  if (cfg.smoothing_variance > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(cfg.smoothing_variance));
    const double c = cfg.smoothing_clip;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) += std::clamp(normal(rng), -c, c);
  }
  return nn::activate(target_actor.head(), z);
}

int ActionFeatures::dim() const {
  return layout.dim() + (phase_features ? layout.phase_count() : 0);
}

MatrixXd ActionFeatures::map(const MatrixXd& a) const {
  if (!phase_features) return a;
  const int P = layout.phase_count();
  const int rest = layout.dim() - P;
  MatrixXd out(dim(), a.cols());
  out.topRows(P) = (kPi * a.topRows(P)).array().cos().matrix();
  out.middleRows(P, P) = (kPi * a.topRows(P)).array().sin().matrix();
  out.bottomRows(rest) = a.bottomRows(rest);
  return out;
}

MatrixXd ActionFeatures::backward(const MatrixXd& a, const MatrixXd& d) const {
  if (!phase_features) return d;
  const int P = layout.phase_count();
  const int rest = layout.dim() - P;
  MatrixXd out(layout.dim(), a.cols());
  const auto phi = (kPi * a.topRows(P)).array();
  out.topRows(P) = (kPi * (d.middleRows(P, P).array() * phi.cos() -
                           d.topRows(P).array() * phi.sin()))
                       .matrix();
  out.bottomRows(rest) = d.bottomRows(rest);
  return out;
}

VectorXd bellman_targets(const Batch& batch, const MatrixXd& smoothed_actions,
                         const Networks& nets, const ActionFeatures& features, double discount,
                         double reward_shift, double reward_scale) {
  MatrixXd input = stack(batch.next_states, features.map(smoothed_actions));
  VectorXd q1 = nets.critic1_target.forward(input).row(0).transpose();
  VectorXd q2 = nets.critic2_target.forward(input).row(0).transpose();
  VectorXd r = ((batch.rewards.array() - reward_shift) * reward_scale).matrix();
  return (r.array() + discount * (1.0 - batch.done.array()) * q1.cwiseMin(q2).array()).matrix();
}

Agent::Agent(int state_dim, env::ActionLayout layout, TD3Config cfg, std::uint64_t seed)
    : state_dim_(state_dim), layout_(layout), cfg_(std::move(cfg)), rng_(seed) {
  cfg_.validate();
  const int action_dim = layout_.dim();
  const std::vector<nn::Segment> q_head{{0, 1, nn::Activation::Identity}};
  nets_.actor = nn::DenseNetwork::mlp(state_dim, cfg_.actor_hidden, nn::Activation::Relu,
                                      action_dim, layout_.terminal_segments(), rng_,
                                      cfg_.actor_head_init);
  const int critic_in = state_dim + features().dim();
  nets_.critic1 = nn::DenseNetwork::mlp(critic_in, cfg_.critic_hidden,
                                        nn::Activation::Relu, 1, q_head, rng_);
  nets_.critic2 = nn::DenseNetwork::mlp(critic_in, cfg_.critic_hidden,
                                        nn::Activation::Relu, 1, q_head, rng_);
  nets_.actor_target = nets_.actor;
  nets_.critic1_target = nets_.critic1;
  nets_.critic2_target = nets_.critic2;
  nets_.actor_opt = nn::AdamState::for_size(nets_.actor.parameter_count(), cfg_.actor_lr);
  nets_.critic1_opt = nn::AdamState::for_size(nets_.critic1.parameter_count(), cfg_.critic_lr);
  nets_.critic2_opt = nn::AdamState::for_size(nets_.critic2.parameter_count(), cfg_.critic_lr);
}

VectorXd Agent::act(const VectorXd& state) const { return nets_.actor.forward(state); }

VectorXd Agent::act_with_noise(const VectorXd& state, const VectorXd& logit_noise) const {
  MatrixXd z = nets_.actor.logits(MatrixXd(state));
  z.col(0) += logit_noise;
  return nn::activate(nets_.actor.head(), z).col(0);
}

CriticLosses Agent::critic_update(const Batch& batch) {
  MatrixXd smoothed = smooth_target_action(batch.next_states, nets_.actor_target, cfg_, rng_);
  VectorXd y =
      bellman_targets(batch, smoothed, nets_, features(), cfg_.discount, reward_shift_,
                      reward_scale_);
  MatrixXd input = stack(batch.states, features().map(batch.actions));
  const double n = batch.size();

  CriticLosses losses;
  auto fit = [&](nn::DenseNetwork& critic, nn::AdamState& opt, const char* name) {
    nn::ForwardCache cache;
    VectorXd q = critic.forward(input, cache).row(0).transpose();
    VectorXd err = q - y;
    double loss = err.squaredNorm() / n;
    check_finite(loss, name);
    MatrixXd upstream = (2.0 / n) * err.transpose();
    nn::Backprop bp = critic.backward(cache, upstream);
    nn::adam_step(opt, critic.parameters(), bp.param_grad, name);
    return loss;
  };
  losses.q1 = fit(nets_.critic1, nets_.critic1_opt, "critic1");
  losses.q2 = fit(nets_.critic2, nets_.critic2_opt, "critic2");
  ++critic_updates_;
  return losses;
}

double Agent::actor_update(const Batch& batch) {
  const double n = batch.size();
  nn::ForwardCache actor_cache;
  MatrixXd actions = nets_.actor.forward(batch.states, actor_cache);
  nn::ForwardCache critic_cache;
  const ActionFeatures fmap = features();
  MatrixXd q = nets_.critic1.forward(stack(batch.states, fmap.map(actions)), critic_cache);
  double objective = q.mean();
  check_finite(objective, "actor objective");

  // Minimize -mean(Q1) + penalty * mean ||z||^2 over the actor logits z;
  // only the action rows of the critic input gradient flow into the actor.
  // Critic parameters are left untouched.
  MatrixXd upstream = MatrixXd::Constant(1, batch.size(), -1.0 / n);
  nn::Backprop critic_bp = nets_.critic1.backward(critic_cache, upstream);
  MatrixXd d_action = fmap.backward(actions, critic_bp.input_grad.bottomRows(fmap.dim()));
  MatrixXd d_logits = (2.0 * cfg_.logit_penalty / n) * actor_cache.pre.back();
  nn::Backprop actor_bp = nets_.actor.backward(actor_cache, d_action, &d_logits);
  nn::adam_step(nets_.actor_opt, nets_.actor.parameters(), actor_bp.param_grad, "actor");
  return objective;
}

void Agent::update_targets() {
  nn::soft_update(nets_.actor, nets_.actor_target, cfg_.tau);
  nn::soft_update(nets_.critic1, nets_.critic1_target, cfg_.tau);
  nn::soft_update(nets_.critic2, nets_.critic2_target, cfg_.tau);
}

bool Agent::train_step(const Batch& batch) {
  critic_update(batch);
  if (critic_updates_ % cfg_.policy_delay != 0) return false;
  actor_update(batch);
  update_targets();
  return true;
}

void Agent::set_reward_normalization(double shift, double scale) {
  if (!std::isfinite(shift) || !(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("td3: invalid reward normalization");
  }
  reward_shift_ = shift;
  reward_scale_ = scale;
}

nn::Checkpoint Agent::to_checkpoint() const {
  nn::Checkpoint c;
  c.networks = {{"actor", nets_.actor},
                {"actor_target", nets_.actor_target},
                {"critic1", nets_.critic1},
                {"critic2", nets_.critic2},
                {"critic1_target", nets_.critic1_target},
                {"critic2_target", nets_.critic2_target}};
  c.optimizers = {{"actor", nets_.actor_opt},
                  {"critic1", nets_.critic1_opt},
                  {"critic2", nets_.critic2_opt}};
  c.rng_state = nn::rng_to_string(rng_);
  nlohmann::json meta = {{"kind", "td3_agent"},
                         {"state_dim", state_dim_},
                         {"n_elements", layout_.n_elements},
                         {"n_users", layout_.n_users},
                         {"critic_updates", critic_updates_},
                         {"reward_shift", reward_shift_},
                         {"reward_scale", reward_scale_},
                         {"td3", cfg_}};
  c.metadata = meta.dump();
  return c;
}

Agent Agent::from_checkpoint(const nn::Checkpoint& c) {
  auto meta = nlohmann::json::parse(c.metadata);
  if (meta.value("kind", "") != "td3_agent") throw IoError("checkpoint: not a TD3 agent");
  Agent a;
  a.state_dim_ = meta.at("state_dim").get<int>();
  a.layout_ = {meta.at("n_elements").get<int>(), meta.at("n_users").get<int>()};
  a.cfg_ = meta.at("td3").get<TD3Config>();
  a.critic_updates_ = meta.at("critic_updates").get<std::int64_t>();
  a.reward_shift_ = meta.at("reward_shift").get<double>();
  a.reward_scale_ = meta.at("reward_scale").get<double>();
  a.nets_.actor = c.network("actor");
  a.nets_.actor_target = c.network("actor_target");
  a.nets_.critic1 = c.network("critic1");
  a.nets_.critic2 = c.network("critic2");
  a.nets_.critic1_target = c.network("critic1_target");
  a.nets_.critic2_target = c.network("critic2_target");
  a.nets_.actor_opt = c.optimizer("actor");
  a.nets_.critic1_opt = c.optimizer("critic1");
  a.nets_.critic2_opt = c.optimizer("critic2");
  a.rng_ = nn::rng_from_string(c.rng_state);
  if (a.nets_.actor.input_dim() != a.state_dim_ || a.nets_.actor.output_dim() != a.layout_.dim()) {
    throw IoError("checkpoint: actor shape inconsistent with metadata");
  }
  return a;
}

// ---------------------------------------------------------------------------
// Rollouts and training

VectorXd uniform_random_action(const env::ActionLayout& layout, Rng& rng) {
  VectorXd a(layout.dim());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (int i = 0; i < layout.phase_count(); ++i) a[layout.phase_offset() + i] = unit(rng);

  VectorXd w(layout.power_count());
  for (auto& v : w) v = expo(rng);
  a.segment(layout.power_offset(), layout.power_count()) = w / w.sum();

  // Dirichlet(1, ..., 1) over N + 1 parts, last part dropped as slack.
  VectorXd d(layout.displacement_count() + 1);
  for (auto& v : d) v = expo(rng);
  a.segment(layout.displacement_offset(), layout.displacement_count()) =
      d.head(layout.displacement_count()) / d.sum();
  return a;
}

EvalSummary evaluate_policy(const Policy& policy, const env::EnvConfig& env_cfg,
                            const std::vector<std::uint64_t>& scenario_seeds) {
  EvalSummary s;
  const int K = env_cfg.scenario.n_users;
  s.mean_sinr_db.assign(K, 0.0);
  int count = 0;
  for (std::uint64_t seed : scenario_seeds) {
    auto [state, scenario] = env::reset(seed, env_cfg);
    for (int t = 0; t < env_cfg.steps_per_episode; ++t) {
      VectorXd a = policy(state.vector());
      env::Decoded d = env::decode_activated(a, env_cfg);
      env::Evaluation ev = env::evaluate(d, scenario, env_cfg);
      env::StepResult res = env::step_activated(state, a, scenario, env_cfg, t);
      s.mean_reward += res.reward;
      s.mean_crb += ev.crb;
      double min_db = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        double db = linear_to_db(ev.sinr[k]);
        s.mean_sinr_db[k] += db;
        min_db = std::min(min_db, db);
      }
      s.mean_min_sinr_db += min_db;
      s.feasibility_rate += ev.sinr_feasible ? 1.0 : 0.0;
      ++count;
      state = std::move(res.next);
    }
  }
  if (count == 0) throw ConfigError("evaluate: no scenarios");
  s.mean_reward /= count;
  s.mean_crb /= count;
  s.crb_db = metrics::crb_db(s.mean_crb);
  s.mean_min_sinr_db /= count;
  s.feasibility_rate /= count;
  for (auto& v : s.mean_sinr_db) v /= count;
  return s;
}

TrainResult train(const env::EnvConfig& env_cfg, const TD3Config& cfg, const TrainOptions& opts) {
  env_cfg.validate();
  cfg.validate();
  if (opts.episodes < 0) throw ConfigError("train: episodes must be >= 0");
  const auto start = std::chrono::steady_clock::now();

  const env::ActionLayout layout = env_cfg.layout();
  TrainResult out{Agent(env_cfg.state_dim(), layout, cfg, mix_seed(opts.seed, 1)), {}};
  Agent& agent = out.agent;
  if (opts.warm_start != nullptr) {
    const Networks& src = opts.warm_start->networks();
    if (src.actor.layers() != agent.networks().actor.layers() ||
        src.critic1.layers() != agent.networks().critic1.layers()) {
      throw ConfigError("train: warm-start agent has different network shapes");
    }
    agent.networks() = src;
  }
  ReplayBuffer buffer(cfg.buffer_capacity, env_cfg.state_dim(), layout.dim());
  OUProcess ou(layout.dim(), cfg.ou);
  Rng explore_rng(mix_seed(opts.seed, 2));
  Rng sample_rng(mix_seed(opts.seed, 3));
  bool normalized = !cfg.normalize_rewards;

  std::vector<std::uint64_t> eval_seeds = opts.eval_seeds;
  if (eval_seeds.empty()) {
    for (int i = 0; i < cfg.eval_scenarios; ++i) eval_seeds.push_back(mix_seed(opts.seed, 1000 + i));
  }

  for (int episode = 0; episode < opts.episodes; ++episode) {
    const bool warmup = episode < cfg.warmup_episodes;
    auto [state, scenario] = env::reset(mix_seed(opts.seed, 10000 + episode), env_cfg);
    ou.reset();
    ou.set_episode(episode);

    EpisodeLog row;
    row.episode = episode;
    row.sigma_ou = ou.sigma();
    for (int t = 0; t < env_cfg.steps_per_episode; ++t) {
      VectorXd s = state.vector();
      VectorXd a = warmup ? uniform_random_action(layout, explore_rng)
                          : agent.act_with_noise(s, ou.sample(explore_rng));
      env::StepResult res = env::step_activated(state, a, scenario, env_cfg, t);
      if (!std::isfinite(res.reward)) {
        throw DivergenceError("train: non-finite reward at episode " + std::to_string(episode) +
                              ", step " + std::to_string(t));
      }
      buffer.push({s, a, res.reward, res.next.vector(), res.done});
      row.episode_reward += res.reward;

      if (!warmup && buffer.size() >= cfg.batch_size) {
        if (!normalized) {
          const VectorXd r = buffer.rewards().head(buffer.size());
          double mean = r.mean();
          double sd = std::sqrt((r.array() - mean).square().mean());
          agent.set_reward_normalization(mean, sd > 1e-12 ? 1.0 / sd : 1.0);
          normalized = true;
        }
        try {
          agent.train_step(buffer.sample(cfg.batch_size, sample_rng));
        } catch (const DivergenceError& e) {
          throw DivergenceError(std::string(e.what()) + " (episode " + std::to_string(episode) +
                                ", step " + std::to_string(t) + ")");
        }
      }
      state = std::move(res.next);
    }
    row.mean_step_reward = row.episode_reward / env_cfg.steps_per_episode;

    const bool periodic = (episode + 1) % cfg.eval_interval == 0;
    const bool final_window = episode >= opts.episodes - cfg.final_eval_window;
    if (periodic || final_window) {
      const Agent& frozen = agent;
      row.eval = evaluate_policy([&](const VectorXd& s) { return frozen.act(s); }, env_cfg,
                                 eval_seeds);
    }
    if (opts.record_wall_time) {
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    out.log.push_back(std::move(row));
  }
  return out;
}

void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log) {
  out << "episode,mean_step_reward,episode_reward,eval_mean_reward,eval_crb_db,"
         "eval_min_sinr_db,sigma_ou,wall_time_s\n";
  out << std::setprecision(12);
  for (const auto& r : log) {
    out << r.episode << ',' << r.mean_step_reward << ',' << r.episode_reward << ',';
    if (r.eval) {
      out << r.eval->mean_reward << ',' << r.eval->crb_db << ',' << r.eval->mean_min_sinr_db;
    } else {
      out << ",,";
    }
    out << ',' << r.sigma_ou << ',';
    if (r.wall_time_s > 0.0) out << r.wall_time_s;
    out << '\n';
  }
}

}  // namespace crx::td3
