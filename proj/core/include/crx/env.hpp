#pragma once

#include <iosfwd>
#include <vector>

#include "crx/array.hpp"
#include "crx/channel.hpp"
#include "crx/metrics.hpp"
#include "crx/nn.hpp"

namespace crx::env {

/// Partition of the action vector:
/// [phase: N (K+N) | power: K+N | displacement: N].
/// Phases are stored column-major, i.e. entry (n, j) of F at j*N + n.
struct ActionLayout {
  int n_elements = 0;
  int n_users = 0;

  int columns() const { return n_users + n_elements; }
  int phase_offset() const { return 0; }
  int phase_count() const { return n_elements * columns(); }
  int power_offset() const { return phase_count(); }
  int power_count() const { return columns(); }
  int displacement_offset() const { return power_offset() + power_count(); }
  int displacement_count() const { return n_elements; }
  int dim() const { return displacement_offset() + displacement_count(); }

  /// Terminal activation map realizing the decoding contract:
  /// tanh on phases, softmax on powers, gated softmax on displacements.
  std::vector<nn::Segment> terminal_segments() const;
};

struct EnvConfig {
  array::ArrayConfig array;
  channel::ScenarioConfig scenario;
  std::vector<double> gamma_k;  // linear SINR thresholds, one per user
  double p_sum = 0.01;          // watts
  double upsilon = 0.1;
  int steps_per_episode = 100;

  bool movable = true;                // false pins the array to the uniform ULA
  bool crosstalk_aware = true;        // false: reward and SINR use C = I
  bool learn_sensing_precoder = true; // false: F_s = 0, power split over F_c only
  bool observe_target_angle = false;

  void validate() const;
  ActionLayout layout() const { return {array.n_elements, scenario.n_users}; }
  int channel_feature_dim() const;
  int state_dim() const { return channel_feature_dim() + layout().dim(); }
};

/// Raw pre-activation action logits.
struct EnvAction {
  VectorXd raw;
};

struct EnvState {
  VectorXd rho_re;
  VectorXd rho_im;
  VectorXd theta_flat;
  VectorXd target;       // empty unless observe_target_angle
  VectorXd prev_action;  // activated action of the previous step, zero at reset

  VectorXd vector() const;
  bool operator==(const EnvState& o) const { return vector() == o.vector(); }
};

struct Decoded {
  metrics::Precoder precoder;
  array::AntennaPositions positions;
};

/// Maps raw logits through the terminal activations.
VectorXd activate_action(const VectorXd& raw, const ActionLayout& layout);

/// Decodes an activated action (tanh phases, simplex powers, displacement
/// fractions) into a feasible precoder and array.
Decoded decode_activated(const VectorXd& activated, const EnvConfig& cfg);

/// decode_activated(activate_action(raw)). Every raw vector decodes to a
/// point satisfying the spacing, region and power constraints.
Decoded decode_action(const EnvAction& raw, const EnvConfig& cfg);

struct RewardBreakdown {
  double core = 0.0;     // Schur-complement term of the CRB denominator
  double penalty = 0.0;  // upsilon * sum min(0, gamma_i - Gamma_i)
  double reward = 0.0;
  std::vector<double> sinr;  // linear, per user
};

/// Reward and its parts. `coupling` is the matrix the agent believes in
/// (true C or identity for crosstalk-unaware training).
RewardBreakdown reward_breakdown(const Decoded& d, const channel::Scenario& scenario,
                                 const EnvConfig& cfg, const MatrixXcd& coupling);

/// Reward as seen by the configured agent (coupling per crosstalk_aware).
double reward(const metrics::Precoder& F, const array::AntennaPositions& p,
              const channel::Scenario& scenario, const EnvConfig& cfg);

/// Coupling matrix the reward uses for cfg.
MatrixXcd agent_coupling(const array::AntennaPositions& p, const channel::Scenario& scenario,
                         const EnvConfig& cfg);

/// Physical performance of a decoded action under the true coupling.
struct Evaluation {
  double crb = 0.0;
  double crb_db = 0.0;
  std::vector<double> sinr;  // linear
  bool sinr_feasible = false;
  double reward = 0.0;       // reward under the true coupling
  double penalty = 0.0;
};

Evaluation evaluate(const Decoded& d, const channel::Scenario& scenario, const EnvConfig& cfg);

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool done = false;
};

EnvState initial_state(const channel::Scenario& scenario, const EnvConfig& cfg);

std::pair<EnvState, channel::Scenario> reset(std::uint64_t seed, const EnvConfig& cfg);

/// Pure transition for a raw action. Throws ProtocolError when
/// t >= steps_per_episode.
StepResult step(const EnvState& state, const EnvAction& raw, const channel::Scenario& scenario,
                const EnvConfig& cfg, int t);

/// Same transition for an already activated action.
StepResult step_activated(const EnvState& state, const VectorXd& activated,
                          const channel::Scenario& scenario, const EnvConfig& cfg, int t);

/// One row of an episode trace.
struct TraceRow {
  int step = 0;
  double reward = 0.0;
  double penalty = 0.0;
  double crb_db = 0.0;
  std::vector<double> sinr_db;
};

/// CSV with columns step,reward,penalty,crb_db,sinr_db_0..sinr_db_{K-1}.
void write_episode_trace(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace crx::env
