#include "crx/experiment_config.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "crx/errors.hpp"

namespace crx::harness {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::FpaRbf: return "FPA_RBF";
    case Strategy::FpaTd3: return "FPA_TD3";
    case Strategy::MaTd3: return "MA_TD3";
    case Strategy::CrMaTd3: return "CR_MA_TD3";
  }
  return "?";
}

Strategy parse_strategy(const std::string& tag) {
  for (Strategy s : all_strategies())
    if (to_string(s) == tag) return s;
  throw ConfigError("unknown strategy '" + tag + "' (expected FPA_RBF, FPA_TD3, MA_TD3 or CR_MA_TD3)");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> v{Strategy::FpaRbf, Strategy::FpaTd3, Strategy::MaTd3,
                                       Strategy::CrMaTd3};
  return v;
}

bool is_learned(Strategy s) { return s != Strategy::FpaRbf; }

double ExperimentConfig::wavelength() const { return kSpeedOfLight / (carrier_ghz * 1e9); }

double ExperimentConfig::p_sum_w() const { return dbm_to_watt(p_sum_dbm); }

void ExperimentConfig::validate() const {
  if (profile != "paper" && profile != "desk") throw ConfigError("config: profile must be paper or desk");
  if (!(carrier_ghz > 0.0)) throw ConfigError("config: carrier_ghz must be positive");
  if (!(d0_wavelengths > 0.0)) throw ConfigError("config: d0_wavelengths must be positive");
  if (episodes < 0) throw ConfigError("config: episodes must be >= 0");
  if (eval_scenarios < 1) throw ConfigError("config: eval_scenarios must be positive");
  if (rbf_draws < 1) throw ConfigError("config: rbf_draws must be positive");
  if (seeds.empty()) throw ConfigError("config: at least one seed required");
  if (snr_grid_db.empty()) throw ConfigError("config: snr_grid_db must not be empty");
  if (region_grid_wavelengths.empty()) throw ConfigError("config: region grid must not be empty");
  parse_strategy(strategy);
  for (const auto& s : snr_strategies) parse_strategy(s);
  for (const auto& s : region_strategies) parse_strategy(s);

  env_config(Strategy::CrMaTd3, train_snr_db).validate();
  td3_config().validate();

  const double lambda = wavelength();
  const double footprint = (n_elements - 1) * d0_wavelengths;
  for (double r : region_grid_wavelengths) {
    if (r < footprint - 1e-9) {
      std::ostringstream os;
      os << "config: region " << r << " wavelengths cannot host " << n_elements
         << " elements at spacing " << d0_wavelengths << " wavelengths (needs " << footprint << ")";
      throw ConfigError(os.str());
    }
  }
  (void)lambda;
}

env::EnvConfig ExperimentConfig::env_config(Strategy s, double snr_db) const {
  env::EnvConfig e;
  e.array = array::ArrayConfig::for_carrier(n_elements, carrier_ghz * 1e9, p_min_m, p_max_m);
  e.array.d0 = d0_wavelengths * e.array.wavelength;
  e.scenario.n_users = n_users;
  e.scenario.n_paths = n_paths;
  e.scenario.theta_s = deg_to_rad(theta_s_deg);
  e.scenario.alpha_s = cd(alpha_s, 0.0);
  e.scenario.noise_power = noise_power_at(snr_db);
  e.scenario.clutter_power = clutter_power_w;
  e.scenario.crosstalk = crosstalk;
  e.scenario.n_samples = estimation_samples;
  e.gamma_k.assign(n_users, db_to_linear(gamma_db));
  e.p_sum = p_sum_w();
  e.upsilon = penalty_factor;
  e.steps_per_episode = steps_per_episode;
  e.learn_sensing_precoder = learn_sensing_precoder;
  e.observe_target_angle = observe_target_angle;
  e.movable = s != Strategy::FpaRbf && s != Strategy::FpaTd3;
  e.crosstalk_aware = s != Strategy::MaTd3;
  return e;
}

td3::TD3Config ExperimentConfig::td3_config() const {
  td3::TD3Config t;
  t.discount = discount;
  t.tau = tau;
  t.smoothing_variance = smoothing_variance;
  t.smoothing_clip = smoothing_clip;
  t.policy_delay = policy_delay;
  t.ou = {ou_sigma0, ou_sigma_min, ou_decay, ou_theta, ou_dt};
  t.warmup_episodes = warmup_episodes;
  t.batch_size = batch_size;
  t.buffer_capacity = buffer_capacity;
  t.actor_hidden = actor_hidden;
  t.critic_hidden = critic_hidden;
  t.actor_lr = actor_lr;
  t.critic_lr = critic_lr;
  t.logit_penalty = logit_penalty;
  t.actor_head_init = actor_head_init;
  t.critic_phase_features = critic_phase_features;
  t.normalize_rewards = normalize_rewards;
  t.eval_interval = eval_interval;
  t.final_eval_window = final_eval_window;
  t.eval_scenarios = eval_scenarios;
  return t;
}

ExperimentConfig ExperimentConfig::paper() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  c.profile = "desk";
  c.n_elements = 8;
  c.n_users = 2;
  c.n_paths = 2;
  c.episodes = 300;
  c.steps_per_episode = 20;
  c.batch_size = 64;
  c.actor_hidden = {64, 64};
  c.critic_hidden = {64, 64};
  c.actor_lr = 3e-4;
  c.critic_lr = 3e-4;
  c.logit_penalty = 1e-2;
  c.actor_head_init = 1.0;
  c.rbf_draws = 10000;
  c.region_grid_wavelengths = {7.5, 10.0, 15.0, 20.0};
  return c;
}

ExperimentConfig ExperimentConfig::for_profile(const std::string& profile) {
  if (profile == "paper") return paper();
  if (profile == "desk") return desk();
  throw ConfigError("config: unknown profile '" + profile + "'");
}

namespace {

struct Field {
  const char* name;
  std::function<nlohmann::json(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const nlohmann::json&)> set;
};

#define CRX_FIELD(member)                                                              \
  Field {                                                                              \
    #member, [](const ExperimentConfig& c) { return nlohmann::json(c.member); },       \
        [](ExperimentConfig& c, const nlohmann::json& j) { j.get_to(c.member); }       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      CRX_FIELD(profile),
      CRX_FIELD(n_elements),
      CRX_FIELD(n_users),
      CRX_FIELD(n_paths),
      CRX_FIELD(carrier_ghz),
      CRX_FIELD(p_min_m),
      CRX_FIELD(p_max_m),
      CRX_FIELD(d0_wavelengths),
      CRX_FIELD(estimation_samples),
      CRX_FIELD(alpha_s),
      CRX_FIELD(theta_s_deg),
      CRX_FIELD(p_sum_dbm),
      CRX_FIELD(clutter_power_w),
      CRX_FIELD(crosstalk),
      CRX_FIELD(gamma_db),
      CRX_FIELD(penalty_factor),
      CRX_FIELD(train_snr_db),
      CRX_FIELD(learn_sensing_precoder),
      CRX_FIELD(observe_target_angle),
      CRX_FIELD(discount),
      CRX_FIELD(tau),
      CRX_FIELD(smoothing_variance),
      CRX_FIELD(smoothing_clip),
      CRX_FIELD(policy_delay),
      CRX_FIELD(ou_sigma0),
      CRX_FIELD(ou_sigma_min),
      CRX_FIELD(ou_decay),
      CRX_FIELD(ou_theta),
      CRX_FIELD(ou_dt),
      CRX_FIELD(warmup_episodes),
      CRX_FIELD(episodes),
      CRX_FIELD(steps_per_episode),
      CRX_FIELD(batch_size),
      CRX_FIELD(buffer_capacity),
      CRX_FIELD(actor_hidden),
      CRX_FIELD(critic_hidden),
      CRX_FIELD(actor_lr),
      CRX_FIELD(critic_lr),
      CRX_FIELD(logit_penalty),
      CRX_FIELD(actor_head_init),
      CRX_FIELD(critic_phase_features),
      CRX_FIELD(normalize_rewards),
      CRX_FIELD(eval_interval),
      CRX_FIELD(final_eval_window),
      CRX_FIELD(strategy),
      CRX_FIELD(seeds),
      CRX_FIELD(eval_scenarios),
      CRX_FIELD(rbf_draws),
      CRX_FIELD(snr_grid_db),
      CRX_FIELD(snr_strategies),
      CRX_FIELD(retrain_per_snr),
      CRX_FIELD(region_grid_wavelengths),
      CRX_FIELD(region_strategies),
      CRX_FIELD(region_fine_tune),
  };
  return f;
}

#undef CRX_FIELD

}  // namespace

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json::object();
  for (const auto& f : fields()) j[f.name] = f.get(c);
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  c = ExperimentConfig::for_profile(j.value("profile", std::string("paper")));
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& f : fields()) {
      if (key == f.name) {
        try {
          f.set(c, value);
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError("config: bad value for '" + key + "': " + e.what());
        }
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("config: unknown key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return j.get<ExperimentConfig>();
}

nlohmann::json overrides(const ExperimentConfig& c) {
  nlohmann::json current = c;
  nlohmann::json base = ExperimentConfig::for_profile(c.profile);
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : current.items()) {
    if (base[key] != value) out[key] = value;
  }
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  std::string text = nlohmann::json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

const std::vector<TableEntry>& table_one() {
  static const std::vector<TableEntry> t{
      {"K", "n_users", 4},
      {"L_p", "n_paths", 3},
      {"f_c", "carrier_ghz", 30},
      {"p_min", "p_min_m", 0},
      {"p_max", "p_max_m", 0.15},
      {"L", "estimation_samples", 128},
      {"alpha_s", "alpha_s", 0.4},
      {"sigma_cn^2", "smoothing_variance", 0.15},
      {"c", "smoothing_clip", 0.01},
      {"varrho", "discount", 0.98},
      {"tau", "tau", 0.003},
      {"sigma_ou,0", "ou_sigma0", 0.1},
      {"sigma_ou,min", "ou_sigma_min", 0.005},
      {"varpi", "ou_decay", 0.006},
      {"upsilon", "penalty_factor", 0.1},
  };
  return t;
}

}  // namespace crx::harness
