#include "crx/env.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "crx/errors.hpp"

namespace crx::env {

std::vector<nn::Segment> ActionLayout::terminal_segments() const {
  return {{phase_offset(), phase_count(), nn::Activation::Tanh},
          {power_offset(), power_count(), nn::Activation::Softmax},
          {displacement_offset(), displacement_count(), nn::Activation::GatedSoftmax}};
}

void EnvConfig::validate() const {
  array.validate();
  scenario.crosstalk.validate();
  if (scenario.n_users < 1 || scenario.n_paths < 1) {
    throw ConfigError("env: need at least one user and one path");
  }
  if (static_cast<int>(gamma_k.size()) != scenario.n_users) {
    throw ConfigError("env: gamma_k needs one threshold per user");
  }
  if (!(p_sum > 0.0)) throw ConfigError("env: p_sum must be positive");
  if (!(upsilon >= 0.0)) throw ConfigError("env: upsilon must be nonnegative");
  if (steps_per_episode < 1) throw ConfigError("env: steps_per_episode must be at least 1");
  if (!(scenario.noise_power > 0.0)) throw ConfigError("env: noise power must be positive");
  if (scenario.n_samples < 1) throw ConfigError("env: n_samples must be at least 1");
}

int EnvConfig::channel_feature_dim() const {
  return 3 * scenario.n_users * scenario.n_paths + (observe_target_angle ? 1 : 0);
}

VectorXd EnvState::vector() const {
  VectorXd v(rho_re.size() + rho_im.size() + theta_flat.size() + target.size() +
             prev_action.size());
  v << rho_re, rho_im, theta_flat, target, prev_action;
  return v;
}

VectorXd activate_action(const VectorXd& raw, const ActionLayout& layout) {
  if (raw.size() != layout.dim()) {
    throw ConfigError("action: expected " + std::to_string(layout.dim()) + " logits, got " +
                      std::to_string(raw.size()));
  }
  return nn::activate(layout.terminal_segments(), MatrixXd(raw)).col(0);
}

Decoded decode_activated(const VectorXd& a, const EnvConfig& cfg) {
  const ActionLayout layout = cfg.layout();
  if (a.size() != layout.dim()) {
    throw ConfigError("action: expected " + std::to_string(layout.dim()) + " entries, got " +
                      std::to_string(a.size()));
  }
  const int N = layout.n_elements;
  const int K = layout.n_users;
  const int cols = layout.columns();

  VectorXd q = a.segment(layout.power_offset(), layout.power_count());
  if (!cfg.learn_sensing_precoder) {
    q.tail(N).setZero();
    double s = q.head(K).sum();
    q.head(K) = s > 0.0 ? VectorXd(q.head(K) / s) : VectorXd::Constant(K, 1.0 / K);
  }
  // Guard the simplex against accumulated rounding so trace(F F^H) == p_sum.
  q /= q.sum();

  MatrixXcd F(N, cols);
  for (int j = 0; j < cols; ++j) {
    double amp = std::sqrt(cfg.p_sum * q[j] / N);
    for (int n = 0; n < N; ++n) {
      double phi = kPi * a[layout.phase_offset() + j * N + n];
      F(n, j) = std::polar(amp, phi);
    }
  }

  Decoded out{metrics::Precoder{std::move(F), cfg.p_sum, K}, {}};
  if (cfg.movable) {
    VectorXd fractions = a.segment(layout.displacement_offset(), N).cwiseMax(0.0);
    double total = fractions.sum();
    if (total > 1.0) fractions /= total;
    array::DisplacementVector delta(fractions * cfg.array.max_displacement());
    out.positions = array::displacements_to_positions(delta, cfg.array);
  } else {
    out.positions = array::AntennaPositions::uniform(cfg.array);
  }
  return out;
}

Decoded decode_action(const EnvAction& raw, const EnvConfig& cfg) {
  return decode_activated(activate_action(raw.raw, cfg.layout()), cfg);
}

MatrixXcd agent_coupling(const array::AntennaPositions& p, const channel::Scenario& scenario,
                         const EnvConfig& cfg) {
  if (!cfg.crosstalk_aware) return MatrixXcd::Identity(p.size(), p.size());
  return channel::coupling_matrix(p, scenario.crosstalk);
}

RewardBreakdown reward_breakdown(const Decoded& d, const channel::Scenario& scenario,
                                 const EnvConfig& cfg, const MatrixXcd& C) {
  const double wavelength = cfg.array.wavelength;
  auto sensing = channel::effective_sensing_channel(d.positions, C, scenario.theta_s, wavelength);
  auto gains = metrics::BeamGains::compute(sensing.g, sensing.g_dot, d.precoder.F);
  if (!(gains.gg > 1e-300)) {
    throw UnobservableError("reward: no transmit energy toward the target");
  }

  RewardBreakdown out;
  out.core = gains.schur_core();
  MatrixXcd Fc = d.precoder.fc();
  for (int k = 0; k < scenario.n_users(); ++k) {
    VectorXcd h = channel::user_channel(d.positions, scenario.users[k], wavelength);
    double gamma = metrics::sinr(h, C, Fc, k, scenario.sigma2_k[k]);
    out.sinr.push_back(gamma);
    out.penalty += std::min(0.0, gamma - cfg.gamma_k[k]);
  }
  out.penalty *= cfg.upsilon;
  out.reward = out.core + out.penalty;
  return out;
}

double reward(const metrics::Precoder& F, const array::AntennaPositions& p,
              const channel::Scenario& scenario, const EnvConfig& cfg) {
  Decoded d{F, p};
  return reward_breakdown(d, scenario, cfg, agent_coupling(p, scenario, cfg)).reward;
}

Evaluation evaluate(const Decoded& d, const channel::Scenario& scenario, const EnvConfig& cfg) {
  MatrixXcd C = channel::coupling_matrix(d.positions, scenario.crosstalk);
  RewardBreakdown rb = reward_breakdown(d, scenario, cfg, C);
  Evaluation e;
  auto sensing = channel::effective_sensing_channel(d.positions, C, scenario.theta_s,
                                                    cfg.array.wavelength);
  e.crb = metrics::crb_theta(sensing.g, sensing.g_dot, d.precoder, scenario.alpha_s,
                             scenario.sigma2_n(), scenario.n_samples);
  e.crb_db = metrics::crb_db(e.crb);
  e.sinr = rb.sinr;
  e.sinr_feasible = true;
  for (std::size_t k = 0; k < rb.sinr.size(); ++k) {
    if (rb.sinr[k] < cfg.gamma_k[k]) e.sinr_feasible = false;
  }
  e.reward = rb.reward;
  e.penalty = rb.penalty;
  return e;
}

EnvState initial_state(const channel::Scenario& scenario, const EnvConfig& cfg) {
  const int K = scenario.n_users();
  const int Lp = cfg.scenario.n_paths;
  EnvState s;
  s.rho_re.resize(K * Lp);
  s.rho_im.resize(K * Lp);
  s.theta_flat.resize(K * Lp);
  for (int k = 0; k < K; ++k) {
    const auto& u = scenario.users[k];
    if (u.n_paths() != Lp) throw ConfigError("state: scenario path count differs from config");
    for (int l = 0; l < Lp; ++l) {
      s.rho_re[k * Lp + l] = u.gains[l].real();
      s.rho_im[k * Lp + l] = u.gains[l].imag();
      s.theta_flat[k * Lp + l] = u.angles[l];
    }
  }
  if (cfg.observe_target_angle) s.target = VectorXd::Constant(1, scenario.theta_s);
  s.prev_action = VectorXd::Zero(cfg.layout().dim());
  return s;
}

std::pair<EnvState, channel::Scenario> reset(std::uint64_t seed, const EnvConfig& cfg) {
  Rng rng(seed);
  channel::Scenario scenario = channel::sample_scenario(rng, cfg.scenario);
  EnvState state = initial_state(scenario, cfg);
  return {std::move(state), std::move(scenario)};
}

StepResult step_activated(const EnvState& state, const VectorXd& activated,
                          const channel::Scenario& scenario, const EnvConfig& cfg, int t) {
  if (t < 0 || t >= cfg.steps_per_episode) {
    throw ProtocolError("env: step " + std::to_string(t) + " outside episode of " +
                        std::to_string(cfg.steps_per_episode) + " steps");
  }
  Decoded d = decode_activated(activated, cfg);
  StepResult out;
  out.reward = reward_breakdown(d, scenario, cfg, agent_coupling(d.positions, scenario, cfg))
                   .reward;
  out.next = state;
  out.next.prev_action = activated;
  out.done = t + 1 == cfg.steps_per_episode;
  return out;
}

StepResult step(const EnvState& state, const EnvAction& raw, const channel::Scenario& scenario,
                const EnvConfig& cfg, int t) {
  return step_activated(state, activate_action(raw.raw, cfg.layout()), scenario, cfg, t);
}

void write_episode_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
  std::size_t users = rows.empty() ? 0 : rows.front().sinr_db.size();
  out << "step,reward,penalty,crb_db";
  for (std::size_t k = 0; k < users; ++k) out << ",sinr_db_" << k;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.step << ',' << r.reward << ',' << r.penalty << ',' << r.crb_db;
    for (double s : r.sinr_db) out << ',' << s;
    out << '\n';
  }
}

}  // namespace crx::env
