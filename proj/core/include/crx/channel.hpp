#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "crx/array.hpp"
#include "crx/types.hpp"

namespace crx::channel {

/// Linear-phase power-series crosstalk model
/// c_mn = eta * d^-iota * exp(-j (nu d + xi)), d = |p_m - p_n|.
struct CrosstalkParams {
  double eta = 3.5e-5;
  double iota = 1.9;
  double nu = 600.4;   // rad/m
  double xi = 252.8;   // rad
  bool enabled = true;
  double self_coupling = 1.0;  // diagonal c_nn

  void validate() const;
  bool operator==(const CrosstalkParams&) const = default;
};

/// Multipath channel of one user: L_p complex gains and departure angles.
struct UserChannelSpec {
  VectorXcd gains;
  VectorXd angles;  // radians in [0, pi]

  int n_paths() const { return static_cast<int>(gains.size()); }
  bool operator==(const UserChannelSpec& o) const {
    return gains == o.gains && angles == o.angles;
  }
};

/// One random channel realization plus the sensing parameters it is
/// evaluated under.
struct Scenario {
  std::vector<UserChannelSpec> users;
  double theta_s = deg_to_rad(60.0);
  cd alpha_s{0.4, 0.0};
  double sigma2_s = 1e-3;
  double sigma2_c = 0.0;
  std::vector<double> sigma2_k;
  CrosstalkParams crosstalk;
  int n_samples = 128;

  int n_users() const { return static_cast<int>(users.size()); }
  /// Effective sensing noise: sensing noise plus absorbed clutter power.
  double sigma2_n() const { return sigma2_s + sigma2_c; }

  void validate() const;
  bool operator==(const Scenario&) const = default;
};

/// Non-random inputs to sample_scenario.
struct ScenarioConfig {
  int n_users = 4;
  int n_paths = 3;
  double theta_s = deg_to_rad(60.0);
  cd alpha_s{0.4, 0.0};
  double noise_power = 1e-3;  // N0, shared by users and the sensing receiver
  double clutter_power = 0.0;
  CrosstalkParams crosstalk;
  int n_samples = 128;
};

/// Draws gains ~ CN(0, 1) and angles ~ U(0, pi) for every user path.
Scenario sample_scenario(Rng& rng, const ScenarioConfig& cfg);

/// N x N complex coupling matrix; identity when crosstalk is disabled.
/// Throws GeometryError for coincident elements.
MatrixXcd coupling_matrix(const array::AntennaPositions& p, const CrosstalkParams& params);

/// sqrt(N / L_p) * sum_l rho_l a(p, theta_l).
VectorXcd user_channel(const array::AntennaPositions& p, const UserChannelSpec& spec,
                       double wavelength);

struct SensingChannel {
  VectorXcd g;      // C^H a_s
  VectorXcd g_dot;  // C^H da_s/dtheta_s
};

SensingChannel effective_sensing_channel(const array::AntennaPositions& p, const MatrixXcd& C,
                                         double theta_s, double wavelength);

void to_json(nlohmann::json& j, const CrosstalkParams& c);
void from_json(const nlohmann::json& j, CrosstalkParams& c);
void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

}  // namespace crx::channel
