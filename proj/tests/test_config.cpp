#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "crx/errors.hpp"
#include "crx/experiment_config.hpp"

namespace crx::harness {
namespace {

TEST(TableOne, EveryRowMapsToOneConfigField) {
  nlohmann::json j = ExperimentConfig::paper();
  std::set<std::string> keys, symbols;
  for (const auto& row : table_one()) {
    ASSERT_TRUE(j.contains(row.key)) << row.key;
    EXPECT_DOUBLE_EQ(j[row.key].get<double>(), row.value) << row.symbol;
    EXPECT_TRUE(keys.insert(row.key).second) << "duplicate key " << row.key;
    EXPECT_TRUE(symbols.insert(row.symbol).second) << "duplicate symbol " << row.symbol;
  }
  EXPECT_EQ(table_one().size(), 15u);
}

TEST(TableOne, PublishedValues) {
  // K, L_p, f_c, region, L, alpha_s, smoothing, discount, tau, OU rows,
  // decay and penalty factor.
  const std::vector<std::pair<std::string, double>> expected{
      {"n_users", 4},          {"n_paths", 3},        {"carrier_ghz", 30},
      {"p_min_m", 0},          {"p_max_m", 0.15},     {"estimation_samples", 128},
      {"alpha_s", 0.4},        {"smoothing_variance", 0.15}, {"smoothing_clip", 0.01},
      {"discount", 0.98},      {"tau", 0.003},        {"ou_sigma0", 0.1},
      {"ou_sigma_min", 0.005}, {"ou_decay", 0.006},   {"penalty_factor", 0.1}};
  nlohmann::json j = ExperimentConfig::paper();
  for (const auto& [key, value] : expected) EXPECT_DOUBLE_EQ(j[key].get<double>(), value) << key;
}

TEST(Profiles, PaperScale) {
  ExperimentConfig c = ExperimentConfig::paper();
  EXPECT_EQ(c.n_elements, 16);
  EXPECT_DOUBLE_EQ(c.p_sum_dbm, 10.0);
  EXPECT_NEAR(c.p_sum_w(), 0.01, 1e-15);
  EXPECT_DOUBLE_EQ(c.theta_s_deg, 60.0);
  EXPECT_EQ(c.steps_per_episode, 100);
  EXPECT_EQ(c.warmup_episodes, 30);
  EXPECT_DOUBLE_EQ(c.crosstalk.eta, 3.5e-5);
  EXPECT_DOUBLE_EQ(c.crosstalk.iota, 1.9);
  EXPECT_DOUBLE_EQ(c.crosstalk.nu, 600.4);
  EXPECT_DOUBLE_EQ(c.crosstalk.xi, 252.8);
  EXPECT_NO_THROW(c.validate());
}

TEST(Profiles, DeskScale) {
  ExperimentConfig c = ExperimentConfig::desk();
  EXPECT_EQ(c.n_elements, 8);
  EXPECT_EQ(c.n_users, 2);
  EXPECT_EQ(c.n_paths, 2);
  EXPECT_EQ(c.episodes, 300);
  EXPECT_EQ(c.region_grid_wavelengths.size(), 4u);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(ExperimentConfig::for_profile("desk").n_elements, 8);
  EXPECT_THROW(ExperimentConfig::for_profile("huge"), ConfigError);
}

TEST(Json, RoundTrip) {
  ExperimentConfig c = ExperimentConfig::desk();
  c.seeds = {3, 4};
  c.gamma_db = 2.5;
  c.crosstalk.enabled = false;
  nlohmann::json j = c;
  ExperimentConfig back = nlohmann::json::parse(j.dump()).get<ExperimentConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Json, StartsFromNamedProfile) {
  ExperimentConfig c = nlohmann::json{{"profile", "desk"}, {"episodes", 12}}.get<ExperimentConfig>();
  EXPECT_EQ(c.n_elements, 8);
  EXPECT_EQ(c.episodes, 12);
  ExperimentConfig p = nlohmann::json{{"n_users", 2}}.get<ExperimentConfig>();
  EXPECT_EQ(p.n_elements, 16);
  EXPECT_EQ(p.n_users, 2);
}

TEST(Json, UnknownKeysRejected) {
  EXPECT_THROW((nlohmann::json{{"n_element", 8}}.get<ExperimentConfig>()), ConfigError);
}

TEST(Overrides, ListsExactlyTheChangedFields) {
  ExperimentConfig c = ExperimentConfig::desk();
  EXPECT_TRUE(overrides(c).empty());
  c.gamma_db = 3.0;
  c.seeds = {1, 2, 3};
  nlohmann::json o = overrides(c);
  EXPECT_EQ(o.size(), 2u);
  EXPECT_EQ(o["gamma_db"], 3.0);
  EXPECT_EQ(o["seeds"], nlohmann::json({1, 2, 3}));
}

TEST(Hash, StableAndSensitive) {
  ExperimentConfig a = ExperimentConfig::desk();
  ExperimentConfig b = ExperimentConfig::desk();
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.tau = 0.004;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Validation, Errors) {
  ExperimentConfig c = ExperimentConfig::desk();
  c.region_grid_wavelengths = {3.0};  // 8 elements at half wavelength need 3.5
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig::desk();
  c.region_grid_wavelengths = {3.5};
  EXPECT_NO_THROW(c.validate());
  c = ExperimentConfig::desk();
  c.strategy = "BEST";
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig::desk();
  c.seeds.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig::desk();
  c.snr_grid_db.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig::desk();
  c.p_max_m = 0.01;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig::desk();
  c.discount = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(EnvMapping, StrategiesAndNoise) {
  ExperimentConfig c = ExperimentConfig::desk();
  auto fpa = c.env_config(Strategy::FpaTd3, 10.0);
  auto ma = c.env_config(Strategy::MaTd3, 10.0);
  auto cr = c.env_config(Strategy::CrMaTd3, 10.0);
  EXPECT_FALSE(fpa.movable);
  EXPECT_TRUE(fpa.crosstalk_aware);
  EXPECT_TRUE(ma.movable);
  EXPECT_FALSE(ma.crosstalk_aware);
  EXPECT_TRUE(cr.movable);
  EXPECT_TRUE(cr.crosstalk_aware);
  EXPECT_NEAR(cr.scenario.noise_power, 0.01 / 10.0, 1e-15);
  EXPECT_NEAR(c.env_config(Strategy::CrMaTd3, 0.0).scenario.noise_power, 0.01, 1e-15);
  EXPECT_NEAR(cr.array.d0, cr.array.wavelength / 2.0, 1e-15);
  ASSERT_EQ(cr.gamma_k.size(), 2u);
  EXPECT_NEAR(cr.gamma_k[0], db_to_linear(5.0), 1e-12);
}

TEST(Files, LoadConfig) {
  auto dir = std::filesystem::temp_directory_path() / "crx_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << R"({"profile": "desk", "seeds": [7]})";
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  EXPECT_EQ(load_config((dir / "ok.json").string()).seeds, std::vector<std::uint64_t>{7});
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
  EXPECT_THROW(load_config((dir / "missing.json").string()), IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace crx::harness
