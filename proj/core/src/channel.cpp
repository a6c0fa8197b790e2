#include "crx/channel.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "crx/errors.hpp"

namespace crx::channel {

void CrosstalkParams::validate() const {
  if (!(eta >= 0.0)) throw ConfigError("crosstalk: eta must be nonnegative");
  if (!(iota > 0.0)) throw ConfigError("crosstalk: iota must be positive");
}

void Scenario::validate() const {
  if (users.empty()) throw ConfigError("scenario: at least one user required");
  if (!(sigma2_s > 0.0)) throw ConfigError("scenario: sigma2_s must be positive");
  if (!(sigma2_c >= 0.0)) throw ConfigError("scenario: sigma2_c must be nonnegative");
  if (sigma2_k.size() != users.size()) throw ConfigError("scenario: one sigma2_k per user");
  for (double s : sigma2_k) {
    if (!(s > 0.0)) throw ConfigError("scenario: user noise powers must be positive");
  }
  if (n_samples < 1) throw ConfigError("scenario: n_samples must be at least 1");
  for (const auto& u : users) {
    if (u.gains.size() != u.angles.size() || u.gains.size() == 0) {
      throw ConfigError("scenario: each user needs matching, nonempty gains and angles");
    }
    for (double a : u.angles) {
      if (a < 0.0 || a > kPi) throw ConfigError("scenario: path angles must lie in [0, pi]");
    }
  }
  crosstalk.validate();
}

Scenario sample_scenario(Rng& rng, const ScenarioConfig& cfg) {
  if (cfg.n_users < 1 || cfg.n_paths < 1) {
    throw ConfigError("scenario: need at least one user and one path");
  }
  std::normal_distribution<double> half_normal(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> angle(0.0, kPi);

  Scenario s;
  s.users.resize(cfg.n_users);
  for (auto& u : s.users) {
    u.gains.resize(cfg.n_paths);
    u.angles.resize(cfg.n_paths);
    for (int l = 0; l < cfg.n_paths; ++l) {
      double re = half_normal(rng);
      double im = half_normal(rng);
      u.gains[l] = cd(re, im);
    }
    for (int l = 0; l < cfg.n_paths; ++l) u.angles[l] = angle(rng);
  }
  s.theta_s = cfg.theta_s;
  s.alpha_s = cfg.alpha_s;
  s.sigma2_s = cfg.noise_power;
  s.sigma2_c = cfg.clutter_power;
  s.sigma2_k.assign(cfg.n_users, cfg.noise_power);
  s.crosstalk = cfg.crosstalk;
  s.n_samples = cfg.n_samples;
  return s;
}

MatrixXcd coupling_matrix(const array::AntennaPositions& p, const CrosstalkParams& params) {
  const int n = p.size();
  MatrixXcd C = MatrixXcd::Identity(n, n);
  if (!params.enabled) return C;
  for (int m = 0; m < n; ++m) {
    C(m, m) = params.self_coupling;
    for (int k = m + 1; k < n; ++k) {
      double d = std::abs(p[m] - p[k]);
      if (!(d > 0.0)) {
        throw GeometryError("coupling: elements " + std::to_string(m) + " and " +
                            std::to_string(k) + " coincide");
      }
      cd c = std::polar(params.eta * std::pow(d, -params.iota), -(params.nu * d + params.xi));
      C(m, k) = c;
      C(k, m) = c;
    }
  }
  return C;
}

VectorXcd user_channel(const array::AntennaPositions& p, const UserChannelSpec& spec,
                       double wavelength) {
  VectorXcd h = VectorXcd::Zero(p.size());
  for (int l = 0; l < spec.n_paths(); ++l) {
    h += spec.gains[l] * array::steering_vector(p, spec.angles[l], wavelength);
  }
  return h * std::sqrt(static_cast<double>(p.size()) / spec.n_paths());
}

SensingChannel effective_sensing_channel(const array::AntennaPositions& p, const MatrixXcd& C,
                                         double theta_s, double wavelength) {
  SensingChannel out;
  out.g = C.adjoint() * array::steering_vector(p, theta_s, wavelength);
  out.g_dot = C.adjoint() * array::steering_derivative(p, theta_s, wavelength);
  return out;
}

namespace {

nlohmann::json complex_pair(cd z) { return nlohmann::json::array({z.real(), z.imag()}); }

cd complex_from(const nlohmann::json& j) {
  return cd(j.at(0).get<double>(), j.at(1).get<double>());
}

}  // namespace

void to_json(nlohmann::json& j, const CrosstalkParams& c) {
  j = nlohmann::json{{"eta", c.eta}, {"iota", c.iota}, {"nu", c.nu}, {"xi", c.xi},
                     {"enabled", c.enabled}};
  if (c.self_coupling != 1.0) j["self_coupling"] = c.self_coupling;
}

void from_json(const nlohmann::json& j, CrosstalkParams& c) {
  c.eta = j.at("eta").get<double>();
  c.iota = j.at("iota").get<double>();
  c.nu = j.at("nu").get<double>();
  c.xi = j.at("xi").get<double>();
  c.enabled = j.at("enabled").get<bool>();
  c.self_coupling = j.value("self_coupling", 1.0);
}

void to_json(nlohmann::json& j, const Scenario& s) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : s.users) {
    nlohmann::json gains = nlohmann::json::array();
    for (cd g : u.gains) gains.push_back(complex_pair(g));
    std::vector<double> angles(u.angles.data(), u.angles.data() + u.angles.size());
    users.push_back({{"gains", gains}, {"angles_rad", angles}});
  }
  j = nlohmann::json{{"users", users},
                     {"theta_s_rad", s.theta_s},
                     {"alpha_s", complex_pair(s.alpha_s)},
                     {"sigma2_s", s.sigma2_s},
                     {"sigma2_c", s.sigma2_c},
                     {"sigma2_k", s.sigma2_k},
                     {"crosstalk", s.crosstalk},
                     {"n_samples", s.n_samples}};
}

void from_json(const nlohmann::json& j, Scenario& s) {
  s.users.clear();
  for (const auto& ju : j.at("users")) {
    UserChannelSpec u;
    const auto& gains = ju.at("gains");
    auto angles = ju.at("angles_rad").get<std::vector<double>>();
    u.gains.resize(static_cast<Eigen::Index>(gains.size()));
    for (std::size_t l = 0; l < gains.size(); ++l) {
      u.gains[static_cast<Eigen::Index>(l)] = complex_from(gains[l]);
    }
    u.angles = Eigen::Map<VectorXd>(angles.data(), static_cast<Eigen::Index>(angles.size()));
    s.users.push_back(std::move(u));
  }
  s.theta_s = j.at("theta_s_rad").get<double>();
  s.alpha_s = complex_from(j.at("alpha_s"));
  s.sigma2_s = j.at("sigma2_s").get<double>();
  s.sigma2_c = j.at("sigma2_c").get<double>();
  s.sigma2_k = j.at("sigma2_k").get<std::vector<double>>();
  s.crosstalk = j.at("crosstalk").get<CrosstalkParams>();
  s.n_samples = j.at("n_samples").get<int>();
  s.validate();
}

}  // namespace crx::channel
